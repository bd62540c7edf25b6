//! Leave-one-out unfairness, LOO-stability, DP bounds, instability reports
//! and a brute-force oracle.

pub mod audit;
pub mod bound;
pub mod instability;
pub mod oracle;
pub mod prop2;
pub mod report;
pub mod stability;

pub use audit::{all_ids, audit_deterministic, audit_randomized, Auditor, DirectTrainer, Trainer};
pub use bound::dp_luf_bound;
pub use instability::{architecture_instability, seed_instability};
pub use oracle::{luf_oracle, luf_oracle_at, oracle_stability_rate, ORACLE_CAP};
pub use prop2::{prop2_check, Prop2Verdict};
pub use report::{confidence, confidence_grid, LufEstimate, LufReport, PredictionRecord};
pub use stability::{loo_stability, StabilityEstimate};
