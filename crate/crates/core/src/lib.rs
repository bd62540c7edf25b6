//! Leave-one-out auditing for small learning rules.
//!
//! Trains families of models that differ in exactly one training point and
//! measures how often individual predictions depend on that point (leave-one-out
//! unfairness), next to the classical LOO-stability rate and the bound implied
//! by differential privacy.

pub mod data;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod numerics;
pub mod rules;
pub mod scenarios;

pub use error::{Error, Result};
