//! Config-driven runs: parsing, scheduling, model caching, report export,
//! plots and the command-line front end.

pub mod cache;
pub mod cli;
pub mod config;
pub mod export;
pub mod plots;
pub mod run;

pub use cache::{CachingTrainer, ModelCache};
pub use cli::cli_main;
pub use config::{parse_config, parse_config_str, AuditConfig, Mode};
pub use export::write_report;
pub use plots::emit_plots;
pub use run::{run_audit, RunManifest, RunOptions, RunStatus};
