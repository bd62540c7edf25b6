use super::raster::Raster;
use super::result::{Claim, Comparison, ScenarioResult};
use crate::data::{sample_synthetic, Dataset, SyntheticSpec};
use crate::error::{Error, Result};
use crate::numerics::rng::{Rng, STREAM_SPLIT};
use crate::numerics::OptimizerKind;
use crate::metrics::{DirectTrainer, Trainer};
use crate::rules::{argmax, LearningRule};

pub const FIGURE1_LAYER_DIMS: [usize; 5] = [2, 64, 64, 64, 1];
pub const FIGURE1_EPOCHS: usize = 500;
/// Flips farther than this from the removed point count as far away.
pub const FAR_DISTANCE: f64 = 0.25;

/// Baseline, leave-one-out and difference rasters of one removal.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryRasters {
    pub removed_id: u64,
    pub baseline: Raster,
    pub variant: Raster,
    pub difference: Raster,
    pub flipped_cells: usize,
    pub far_flipped_cells: usize,
}

impl BoundaryRasters {
    pub fn flipped_fraction(&self) -> f64 {
        self.flipped_cells as f64 / self.baseline.values.len() as f64
    }
}

fn class_of(p1: f64) -> usize {
    argmax(&[1.0 - p1, p1])
}

/// Trains `rule` on `dataset` with and without `removed_id` and rasterizes
/// both class-1 probability maps over the unit square.
pub fn boundary_rasters(rule: &LearningRule, dataset: &Dataset, removed_id: u64, resolution: usize) -> Result<BoundaryRasters> {
    boundary_rasters_with(&DirectTrainer, rule, dataset, removed_id, resolution)
}

/// [`boundary_rasters`] with models obtained from `trainer`.
pub fn boundary_rasters_with(
    trainer: &dyn Trainer,
    rule: &LearningRule,
    dataset: &Dataset,
    removed_id: u64,
    resolution: usize,
) -> Result<BoundaryRasters> {
    if dataset.dim() != 2 {
        return Err(Error::Config(format!(
            "boundary rasters need 2-d data, got dimension {}",
            dataset.dim()
        )));
    }
    if dataset.num_classes() != 2 {
        return Err(Error::Config("boundary rasters need binary labels".into()));
    }
    let row = dataset
        .row_of(removed_id)
        .ok_or_else(|| Error::Argument(format!("unknown point id {removed_id}")))?;
    let removed = dataset.features().row(row).to_vec();
    let rest: Vec<u64> = dataset.point_ids().iter().copied().filter(|&i| i != removed_id).collect();
    let baseline = Raster::of_model(&trainer.train(rule, &dataset.full_view(), 0)?, resolution)?;
    let variant = Raster::of_model(&trainer.train(rule, &dataset.view(&rest)?, 0)?, resolution)?;
    let (mut flipped, mut far) = (0, 0);
    for r in 0..resolution {
        for c in 0..resolution {
            let i = r * resolution + c;
            if class_of(baseline.values[i]) != class_of(variant.values[i]) {
                flipped += 1;
                let [x, y] = baseline.cell_center(r, c);
                if (x - removed[0]).hypot(y - removed[1]) > FAR_DISTANCE {
                    far += 1;
                }
            }
        }
    }
    let difference = baseline.difference(&variant);
    Ok(BoundaryRasters {
        removed_id,
        baseline,
        variant,
        difference,
        flipped_cells: flipped,
        far_flipped_cells: far,
    })
}

/// The MLP rule used for the boundary figure.
pub fn figure1_rule(layer_dims: &[usize], seed: u64) -> Result<LearningRule> {
    if layer_dims.len() < 2 || layer_dims[0] != 2 {
        return Err(Error::Config(format!(
            "layer_dims must start with input width 2, got {layer_dims:?}"
        )));
    }
    if *layer_dims.last().unwrap() != 1 {
        return Err(Error::Config("layer_dims must end with a single sigmoid output".into()));
    }
    Ok(LearningRule::mlp(&layer_dims[1..layer_dims.len() - 1])
        .with_epochs(FIGURE1_EPOCHS)
        .with_optimizer(OptimizerKind::Adam, 1e-3)
        .with_seed(seed))
}

/// Random-label points on the unit square; remove one seeded point and look
/// for boundary changes, including far from the removed point.
pub fn run_figure1_scenario(n: usize, layer_dims: &[usize], grid_resolution: usize, seed: u64) -> Result<(ScenarioResult, BoundaryRasters)> {
    let rule = figure1_rule(layer_dims, seed)?;
    let data = sample_synthetic(&SyntheticSpec::uniform_bernoulli_square(n, 0.5, seed))?;
    let removed_id = data.point_ids()[Rng::derive(seed, STREAM_SPLIT).below(n as u64) as usize];
    let rasters = boundary_rasters(&rule, &data, removed_id, grid_resolution)?;
    let mut out = ScenarioResult::new("figure1");
    out.claims.push(Claim::new(
        "flipped-cell fraction",
        0.0,
        rasters.flipped_fraction(),
        Comparison::Above,
    ));
    out.claims.push(Claim::new(
        "flipped cells farther than 0.25 from the removed point",
        1.0,
        rasters.far_flipped_cells as f64,
        Comparison::AtLeast,
    ));
    out.note("removed_id", removed_id);
    out.note("layer_dims", layer_dims);
    out.note("optimizer", "adam");
    out.note("learning_rate", 1e-3);
    out.note("epochs", FIGURE1_EPOCHS);
    out.note("batch_size", rule.schedule().map(|s| s.batch_size));
    out.note("seed", seed);
    Ok((out, rasters))
}
