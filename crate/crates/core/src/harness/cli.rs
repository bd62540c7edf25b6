//! `looaudit` command line. Exit codes: 0 success, 1 failed claim or audit,
//! 2 usage or configuration error.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use super::config::{parse_config, Mode, ScenarioConfig, SCENARIOS};
use super::run::{run_audit, run_scenario, RunOptions, RunStatus};
use crate::error::Error;
use crate::metrics::dp_luf_bound;
use crate::scenarios::ScenarioResult;

#[derive(Debug, Parser)]
#[command(name = "looaudit", version, about = "Leave-one-out unfairness audits")]
struct Cli {
    /// Worker threads for variant training.
    #[arg(long, global = true, value_name = "N")]
    parallelism: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Model cache directory (default: <out>/.cache).
    #[arg(long, global = true, value_name = "DIR")]
    cache: Option<PathBuf>,
    /// Train every model from scratch and store nothing.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the audit described by a config file.
    Audit { config: PathBuf },
    /// Run a built-in scenario: prop1, two-circles, dp-bound or figure1.
    Scenario {
        name: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        diameter: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Rasterize the decision boundary with and without one training point.
    Boundary { config: PathBuf },
    /// Print the LUF bound e^epsilon - 1 + delta of an (epsilon, delta)-DP rule.
    Bound {
        #[arg(long, allow_hyphen_values = true)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        delta: f64,
    },
    /// Parse and validate a config file without running it.
    Validate { config: PathBuf },
}

fn usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_) | Error::ConfigSyntax(_) | Error::ConfigSemantic { .. } | Error::Argument(_) | Error::Io { .. }
    )
}

fn fail(e: Error) -> i32 {
    eprintln!("error: {e}");
    if usage_error(&e) {
        2
    } else {
        1
    }
}

fn print_claims(result: &ScenarioResult) {
    for c in &result.claims {
        println!(
            "{}  {}: expected {} observed {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.description,
            c.expected,
            c.observed
        );
    }
}

fn options(cli: &Cli) -> RunOptions {
    RunOptions {
        parallelism: cli.parallelism,
        output_dir: cli.out.clone(),
        cache_dir: cli.cache.clone(),
        no_cache: cli.no_cache,
    }
}

fn run_config(cli: &Cli, path: &Path, force_boundary: bool) -> i32 {
    let mut config = match parse_config(path) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    if force_boundary && config.mode != Mode::Boundary {
        config.mode = Mode::Boundary;
        if let Err(e) = config.validate() {
            return fail(e);
        }
    }
    match run_audit(&config, &options(cli)) {
        Ok(m) => {
            println!("{:?}: {} trained, {} from cache", m.status, m.trainings, m.cache_hits);
            if let Some(e) = &m.error {
                eprintln!("error: {e}");
            }
            if !m.failed_ids.is_empty() {
                eprintln!("failed leave-out ids: {:?}", m.failed_ids);
            }
            i32::from(m.status != RunStatus::Complete)
        }
        Err(e) => fail(e),
    }
}

/// Entry point; `argv` includes the program name.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if cli.parallelism == Some(0) {
        eprintln!("error: --parallelism must be at least 1");
        return 2;
    }
    match &cli.command {
        Command::Audit { config } => run_config(&cli, config, false),
        Command::Boundary { config } => run_config(&cli, config, true),
        Command::Validate { config } => match parse_config(config) {
            Ok(c) => {
                println!("{} is valid (mode {:?}, hash {})", config.display(), c.mode, c.hash());
                0
            }
            Err(e) => fail(e),
        },
        Command::Bound { epsilon, delta } => match dp_luf_bound(*epsilon, *delta) {
            Ok(b) => {
                println!("{b}");
                0
            }
            Err(e) => fail(e),
        },
        Command::Scenario {
            name,
            seed,
            diameter,
            n,
            grid,
            epsilon,
            trials,
        } => {
            if !SCENARIOS.contains(&name.as_str()) {
                eprintln!("error: unknown scenario '{name}'; expected one of {}", SCENARIOS.join(", "));
                return 2;
            }
            let config = super::config::AuditConfig {
                mode: Mode::Scenario,
                eval: Default::default(),
                trials: None,
                seeds: None,
                parallelism: None,
                output_dir: None,
                cache_dir: None,
                dataset: None,
                split: Default::default(),
                rules: Vec::new(),
                smoothing: None,
                scenario: Some(ScenarioConfig {
                    name: name.clone(),
                    seed: *seed,
                    diameter: *diameter,
                    n: *n,
                    grid: *grid,
                    epsilon: *epsilon,
                    trials: *trials,
                    layer_dims: None,
                }),
                boundary: None,
            };
            if cli.out.is_some() {
                return run_config_value(&cli, &config);
            }
            match run_scenario(config.scenario.as_ref().unwrap()) {
                Ok((result, _)) => {
                    print_claims(&result);
                    i32::from(!result.passed())
                }
                Err(e) => fail(e),
            }
        }
    }
}

fn run_config_value(cli: &Cli, config: &super::config::AuditConfig) -> i32 {
    match run_audit(config, &options(cli)) {
        Ok(m) => {
            if let Some(dir) = &cli.out {
                if let Ok(text) = std::fs::read_to_string(dir.join("scenario.json")) {
                    if let Ok(result) = serde_json::from_str::<ScenarioResult>(&text) {
                        print_claims(&result);
                    }
                }
            }
            i32::from(m.status != RunStatus::Complete)
        }
        Err(e) => fail(e),
    }
}
