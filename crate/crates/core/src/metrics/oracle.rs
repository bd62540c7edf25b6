//! Brute-force LUF for small deterministic instances. Shares nothing with the
//! audit path beyond `train`: every leave-one-out set is materialized as its
//! own dataset and every comparison is done here.

use super::report::LufEstimate;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::rules::{train, LearningRule, Model};

/// Largest training set the oracle accepts.
pub const ORACLE_CAP: usize = 64;

fn check(rule: &LearningRule, dataset: &Dataset) -> Result<()> {
    if !rule.is_deterministic() {
        return Err(Error::Config(format!(
            "the oracle needs a deterministic rule, got {}",
            rule.kind_name()
        )));
    }
    if dataset.len() > ORACLE_CAP {
        return Err(Error::OracleRefused {
            size: dataset.len(),
            cap: ORACLE_CAP,
        });
    }
    if dataset.len() < 2 {
        return Err(Error::Argument("the oracle needs at least two training points".into()));
    }
    Ok(())
}

fn without(dataset: &Dataset, skip: usize) -> Result<Dataset> {
    let mut rows = Vec::with_capacity(dataset.len() - 1);
    let mut labels = Vec::with_capacity(dataset.len() - 1);
    let mut ids = Vec::with_capacity(dataset.len() - 1);
    for r in 0..dataset.len() {
        if r == skip {
            continue;
        }
        rows.push(dataset.features().row(r).to_vec());
        labels.push(dataset.labels()[r]);
        ids.push(dataset.point_ids()[r]);
    }
    Dataset::new(Matrix::from_rows(&rows)?, labels, dataset.num_classes(), ids)
}

fn labels_of(model: &Model, probes: &Matrix) -> Result<Vec<usize>> {
    let p = model.predict_proba(probes)?;
    Ok((0..p.rows())
        .map(|r| {
            let row = p.row(r);
            let mut best = 0;
            for k in 1..row.len() {
                if row[k] > row[best] {
                    best = k;
                }
            }
            best
        })
        .collect())
}

/// Exact LUF of `rule` trained on all of `dataset`, at each probe row.
/// Probe estimates carry the probe's row index as `point_id`; the responsible
/// id is the first removed point (in ascending id order) that flips it.
pub fn luf_oracle_at(rule: &LearningRule, dataset: &Dataset, probes: &Matrix) -> Result<Vec<LufEstimate>> {
    check(rule, dataset)?;
    let full = labels_of(&train(rule, &dataset.full_view())?, probes)?;
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    order.sort_by_key(|&r| dataset.point_ids()[r]);
    let mut responsible: Vec<Option<u64>> = vec![None; probes.rows()];
    for &r in &order {
        let reduced = without(dataset, r)?;
        let labels = labels_of(&train(rule, &reduced.full_view())?, probes)?;
        for (p, who) in responsible.iter_mut().enumerate() {
            if who.is_none() && labels[p] != full[p] {
                *who = Some(dataset.point_ids()[r]);
            }
        }
    }
    Ok(responsible
        .into_iter()
        .enumerate()
        .map(|(p, who)| LufEstimate {
            point_id: p as u64,
            luf_value: if who.is_some() { 1.0 } else { 0.0 },
            responsible_removed_id: who,
            num_leave_out_models: dataset.len(),
        })
        .collect())
}

/// Exact LUF at every training point, in dataset order.
pub fn luf_oracle(rule: &LearningRule, dataset: &Dataset) -> Result<Vec<LufEstimate>> {
    let mut out = luf_oracle_at(rule, dataset, dataset.features())?;
    for (e, &id) in out.iter_mut().zip(dataset.point_ids()) {
        e.point_id = id;
    }
    Ok(out)
}

/// Exact own-point 0-1 loss change rate over every training point.
pub fn oracle_stability_rate(rule: &LearningRule, dataset: &Dataset) -> Result<f64> {
    check(rule, dataset)?;
    let full = labels_of(&train(rule, &dataset.full_view())?, dataset.features())?;
    let mut changed = 0usize;
    for r in 0..dataset.len() {
        let reduced = without(dataset, r)?;
        let probe = Matrix::from_rows(&[dataset.features().row(r).to_vec()])?;
        let own = labels_of(&train(rule, &reduced.full_view())?, &probe)?[0];
        let y = dataset.labels()[r];
        if (full[r] != y) != (own != y) {
            changed += 1;
        }
    }
    Ok(changed as f64 / dataset.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::table_dataset;

    #[test]
    fn refuses_large_and_randomized() {
        let rows: Vec<Vec<f64>> = (0..65).map(|i| vec![i as f64]).collect();
        let labels = (0..65).map(|i| i % 2).collect();
        let big = Dataset::with_row_ids(Matrix::from_rows(&rows).unwrap(), labels, 2).unwrap();
        assert!(matches!(
            luf_oracle(&LearningRule::knn(1), &big),
            Err(Error::OracleRefused { size: 65, cap: 64 })
        ));
        assert!(luf_oracle(&LearningRule::noisy_majority(1.0), &table_dataset()).is_err());
    }

    #[test]
    fn table_rule_everything_unfair() {
        let est = luf_oracle(&LearningRule::table(), &table_dataset()).unwrap();
        assert!(est.iter().all(|e| e.luf_value == 1.0));
        assert_eq!(oracle_stability_rate(&LearningRule::table(), &table_dataset()).unwrap(), 0.0);
    }
}
