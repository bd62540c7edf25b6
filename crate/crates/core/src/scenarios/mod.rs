//! Self-checking constructions: the table rule, two separated discs under
//! 1-NN, the noisy-majority DP bound and the boundary figure.

pub mod dp;
pub mod figure1;
pub mod prop1;
pub mod raster;
pub mod result;
pub mod two_circles;

pub use dp::{balanced_dataset, dp_slack, run_dp_bound_scenario};
pub use figure1::{boundary_rasters, boundary_rasters_with, figure1_rule, run_figure1_scenario, BoundaryRasters, FIGURE1_LAYER_DIMS};
pub use prop1::{prop1_report, run_prop1_scenario};
pub use raster::Raster;
pub use result::{Claim, Comparison, ScenarioResult};
pub use two_circles::{run_two_circles_scenario, DpWitness};
