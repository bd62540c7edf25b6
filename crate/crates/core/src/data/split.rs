use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, DatasetView};
use crate::error::{Error, Result};
use crate::numerics::rng::{Rng, STREAM_SPLIT};

/// Where the leave-out set `O` is drawn from. Either way `O` ends up inside
/// the baseline training set, since its points are removed one at a time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeaveOutSource {
    /// Sample `O` from the training ids.
    #[default]
    Train,
    /// Sample `O` from the held-out ids and move it into the training set.
    Holdout,
}

/// Disjoint train/test ids with the leave-out set `O ⊆ train`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub train_ids: Vec<u64>,
    pub leave_out_ids: Vec<u64>,
    pub test_ids: Vec<u64>,
    pub seed: u64,
    #[serde(default)]
    pub leave_out_source: LeaveOutSource,
}

impl SplitPlan {
    /// Validates the plan against a dataset. Ids keep the order given.
    pub fn new(dataset: &Dataset, train_ids: Vec<u64>, leave_out_ids: Vec<u64>, test_ids: Vec<u64>, seed: u64) -> Result<Self> {
        dataset.rows_of(&train_ids)?;
        dataset.rows_of(&test_ids)?;
        let train: std::collections::HashSet<u64> = train_ids.iter().copied().collect();
        if train.len() != train_ids.len() {
            return Err(Error::Argument("duplicate id in the training set".into()));
        }
        if let Some(id) = leave_out_ids.iter().find(|id| !train.contains(id)) {
            return Err(Error::Argument(format!("leave-out id {id} is not a training id")));
        }
        if let Some(id) = test_ids.iter().find(|id| train.contains(id)) {
            return Err(Error::Argument(format!("id {id} is in both train and test")));
        }
        Ok(SplitPlan {
            train_ids,
            leave_out_ids,
            test_ids,
            seed,
            leave_out_source: LeaveOutSource::Train,
        })
    }

    /// Every point trains, every point is left out once, no test set.
    pub fn exhaustive(dataset: &Dataset) -> SplitPlan {
        let ids = dataset.point_ids().to_vec();
        SplitPlan {
            train_ids: ids.clone(),
            leave_out_ids: ids,
            test_ids: Vec::new(),
            seed: 0,
            leave_out_source: LeaveOutSource::Train,
        }
    }

    pub fn train_view<'a>(&self, dataset: &'a Dataset) -> Result<DatasetView<'a>> {
        dataset.view(&self.train_ids)
    }

    /// Copy of the plan with a different leave-out set (must stay inside train).
    pub fn with_leave_out(&self, leave_out_ids: Vec<u64>) -> Result<SplitPlan> {
        let train: std::collections::HashSet<u64> = self.train_ids.iter().copied().collect();
        if let Some(id) = leave_out_ids.iter().find(|id| !train.contains(id)) {
            return Err(Error::Argument(format!("leave-out id {id} is not a training id")));
        }
        Ok(SplitPlan {
            leave_out_ids,
            ..self.clone()
        })
    }
}

pub fn make_split(dataset: &Dataset, train_fraction: f64, o_size: usize, seed: u64) -> Result<SplitPlan> {
    make_split_with_source(dataset, train_fraction, o_size, seed, LeaveOutSource::Train)
}

/// Seeded shuffle into train/test, then a uniform draw of `o_size` ids for `O`.
/// All id lists come back in dataset order.
pub fn make_split_with_source(
    dataset: &Dataset,
    train_fraction: f64,
    o_size: usize,
    seed: u64,
    source: LeaveOutSource,
) -> Result<SplitPlan> {
    if !(train_fraction > 0.0 && train_fraction <= 1.0) {
        return Err(Error::Config(format!(
            "train_fraction must lie in (0, 1], got {train_fraction}"
        )));
    }
    let n = dataset.len();
    let n_train = ((n as f64 * train_fraction).round() as usize).clamp(1, n);
    let mut rng = Rng::derive(seed, STREAM_SPLIT);
    let perm = rng.permutation(n);
    let mut train_rows: Vec<usize> = perm[..n_train].to_vec();
    let mut test_rows: Vec<usize> = perm[n_train..].to_vec();
    train_rows.sort_unstable();
    test_rows.sort_unstable();

    let pool = match source {
        LeaveOutSource::Train => &train_rows,
        LeaveOutSource::Holdout => &test_rows,
    };
    if o_size > pool.len() {
        return Err(Error::Config(format!(
            "o_size {o_size} exceeds the {} available {} points",
            pool.len(),
            match source {
                LeaveOutSource::Train => "training",
                LeaveOutSource::Holdout => "held-out",
            }
        )));
    }
    let mut picks = pool.clone();
    rng.shuffle(&mut picks);
    let mut o_rows: Vec<usize> = picks[..o_size].to_vec();
    o_rows.sort_unstable();

    if source == LeaveOutSource::Holdout {
        test_rows.retain(|r| o_rows.binary_search(r).is_err());
        train_rows.extend_from_slice(&o_rows);
        train_rows.sort_unstable();
    }

    let ids = dataset.point_ids();
    let to_ids = |rows: &[usize]| rows.iter().map(|&r| ids[r]).collect::<Vec<_>>();
    Ok(SplitPlan {
        train_ids: to_ids(&train_rows),
        leave_out_ids: to_ids(&o_rows),
        test_ids: to_ids(&test_rows),
        seed,
        leave_out_source: source,
    })
}

/// The baseline training view with exactly `removed_id` masked out.
pub fn leave_one_out<'a>(dataset: &'a Dataset, plan: &SplitPlan, removed_id: u64) -> Result<DatasetView<'a>> {
    if !plan.leave_out_ids.contains(&removed_id) {
        return Err(Error::Argument(format!(
            "point {removed_id} is not in the leave-out set"
        )));
    }
    let ids: Vec<u64> = plan
        .train_ids
        .iter()
        .copied()
        .filter(|&id| id != removed_id)
        .collect();
    dataset.view(&ids)
}
