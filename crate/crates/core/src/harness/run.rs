//! Executes a validated [`AuditConfig`] and writes its artifacts.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::cache::{CachingTrainer, ModelCache, TrainingRecord, TrainingStatus};
use super::config::{AuditConfig, EvalSet, Mode, ScenarioConfig};
use super::export::write_report;
use super::plots::emit_plots;
use crate::data::preprocess::{dataset_from_table, fit_preprocess, load_table};
use crate::data::{make_split_with_source, sample_synthetic, Dataset, FittedPreprocess, LeaveOutSource, RawTable, SplitPlan};
use crate::error::{Error, Result};
use crate::metrics::{Auditor, LufReport};
use crate::scenarios::{
    boundary_rasters_with, prop1_report, run_dp_bound_scenario, run_figure1_scenario, run_prop1_scenario,
    run_two_circles_scenario, BoundaryRasters, ScenarioResult, FIGURE1_LAYER_DIMS,
};

pub const DEFAULT_OUTPUT_DIR: &str = "looaudit-out";

/// Command-line overrides of the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub parallelism: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub no_cache: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Complete,
    /// Ran to the end but at least one scenario claim failed.
    ClaimsFailed,
    /// A training failed; `failed_ids` names the leave-out points involved.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub toolkit_version: String,
    pub mode: Mode,
    pub status: RunStatus,
    pub error: Option<String>,
    pub failed_ids: Vec<u64>,
    pub trainings: usize,
    pub cache_hits: usize,
    pub variants: Vec<TrainingRecord>,
    pub artifacts: Vec<String>,
    pub wall_seconds: f64,
}

impl RunManifest {
    pub fn succeeded(&self) -> bool {
        self.status == RunStatus::Complete
    }
}

/// The dataset, the fitted preprocessing when it came from a CSV, and the split.
pub fn prepare_data(config: &AuditConfig) -> Result<(Dataset, Option<FittedPreprocess>, SplitPlan)> {
    let dc = config
        .dataset
        .as_ref()
        .ok_or_else(|| Error::Config("no dataset configured".into()))?;
    let split = &config.split;
    let o_size_for = |data: &Dataset| {
        split.o_size.unwrap_or_else(|| {
            let n = data.len();
            let n_train = ((n as f64 * split.train_fraction).round() as usize).clamp(1, n);
            match split.leave_out_source {
                LeaveOutSource::Train => n_train,
                LeaveOutSource::Holdout => n - n_train,
            }
        })
    };
    match (&dc.csv, &dc.synthetic) {
        (Some(path), _) => {
            let spec = dc.preprocess_spec();
            let label = dc.label.as_deref().expect("validated");
            let table = RawTable::read(path, spec.missing_values)?;
            table.warn_dropped();
            // the split depends only on the ids, so a provisional fit is enough to draw it
            let (provisional, _) = load_table(&table, &spec, label)?;
            let plan = make_split_with_source(
                &provisional,
                split.train_fraction,
                o_size_for(&provisional),
                split.seed,
                split.leave_out_source,
            )?;
            let position: HashMap<u64, usize> = table
                .source_rows
                .iter()
                .enumerate()
                .map(|(pos, &r)| (r as u64, pos))
                .collect();
            let fit_rows: Vec<usize> = plan.train_ids.iter().map(|id| position[id]).collect();
            let fitted = fit_preprocess(&table, &spec, label, &fit_rows)?;
            Ok((dataset_from_table(&table, &fitted)?, Some(fitted), plan))
        }
        (None, Some(s)) => {
            let data = sample_synthetic(&s.to_spec()?)?;
            let plan = make_split_with_source(&data, split.train_fraction, o_size_for(&data), split.seed, split.leave_out_source)?;
            Ok((data, None, plan))
        }
        (None, None) => Err(Error::Config("dataset needs csv or synthetic".into())),
    }
}

fn eval_ids(config: &AuditConfig, data: &Dataset, plan: &SplitPlan) -> Result<Vec<u64>> {
    match config.eval {
        EvalSet::All => Ok(data.point_ids().to_vec()),
        EvalSet::Test if plan.test_ids.is_empty() => Err(Error::ConfigSemantic {
            key: "eval".into(),
            message: "the split has no test points".into(),
        }),
        EvalSet::Test => Ok(plan.test_ids.clone()),
    }
}

struct Output {
    dir: PathBuf,
    artifacts: Vec<String>,
}

impl Output {
    fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, serde_json::to_string_pretty(value)?)
    }

    fn report(&mut self, report: &LufReport) -> Result<()> {
        for list in [write_report(report, &self.dir)?, emit_plots(report, &self.dir)?] {
            for p in list {
                self.artifacts.push(file_name(&p));
            }
        }
        Ok(())
    }

    fn rasters(&mut self, r: &BoundaryRasters) -> Result<()> {
        self.write("baseline.ppm", r.baseline.to_ppm())?;
        self.write("leave_one_out.ppm", r.variant.to_ppm())?;
        self.write("difference.ppm", r.difference.to_diverging_ppm())
    }
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned())
}

#[derive(Serialize)]
struct BoundarySummary {
    removed_id: u64,
    resolution: usize,
    flipped_cells: usize,
    far_flipped_cells: usize,
    flipped_fraction: f64,
}

impl From<&BoundaryRasters> for BoundarySummary {
    fn from(r: &BoundaryRasters) -> Self {
        BoundarySummary {
            removed_id: r.removed_id,
            resolution: r.baseline.resolution,
            flipped_cells: r.flipped_cells,
            far_flipped_cells: r.far_flipped_cells,
            flipped_fraction: r.flipped_fraction(),
        }
    }
}

#[derive(Serialize)]
struct SmoothSummary {
    base_expected_luf: f64,
    smoothed_expected_luf: f64,
    base_flipped_fraction: f64,
    smoothed_flipped_fraction: f64,
}

/// Runs a named scenario with config overrides; returns the result and any rasters.
pub fn run_scenario(s: &ScenarioConfig) -> Result<(ScenarioResult, Option<BoundaryRasters>)> {
    let seed = s.seed.unwrap_or(0);
    Ok(match s.name.as_str() {
        "prop1" => (run_prop1_scenario()?, None),
        "two-circles" => (
            run_two_circles_scenario(s.diameter.unwrap_or(1.0), s.n.unwrap_or(20), s.grid.unwrap_or(25), seed)?,
            None,
        ),
        "dp-bound" => (
            run_dp_bound_scenario(s.epsilon.unwrap_or(0.5), s.trials.unwrap_or(10_000), seed)?,
            None,
        ),
        "figure1" => {
            let dims = s.layer_dims.clone().unwrap_or_else(|| FIGURE1_LAYER_DIMS.to_vec());
            let (r, rasters) = run_figure1_scenario(s.n.unwrap_or(100), &dims, s.grid.unwrap_or(200), seed)?;
            (r, Some(rasters))
        }
        other => return Err(Error::Config(format!("unknown scenario '{other}'"))),
    })
}

fn execute(config: &AuditConfig, trainer: &CachingTrainer, out: &mut Output) -> Result<RunStatus> {
    let auditor = Auditor::new(trainer);
    if config.mode == Mode::Scenario {
        let s = config.scenario.as_ref().expect("validated");
        let (result, rasters) = run_scenario(s)?;
        out.write("scenario.json", result.to_json())?;
        if let Some(r) = rasters {
            out.rasters(&r)?;
        }
        if s.name == "prop1" {
            out.report(&prop1_report()?)?;
        }
        return Ok(if result.passed() {
            RunStatus::Complete
        } else {
            RunStatus::ClaimsFailed
        });
    }

    let (data, fitted, plan) = prepare_data(config)?;
    if let Some(f) = &fitted {
        out.write("preprocess.json", f.canonical_json())?;
    }
    out.json("split.json", &plan)?;
    let rules = config
        .rules
        .iter()
        .enumerate()
        .map(|(i, r)| r.to_rule(&format!("rules[{i}]"), Some(&data)))
        .collect::<Result<Vec<_>>>()?;
    let eval = eval_ids(config, &data, &plan)?;
    match config.mode {
        Mode::Luf => out.report(&auditor.audit_deterministic(&rules[0], &data, &plan, &eval)?)?,
        Mode::LufRandomized => out.report(&auditor.audit_randomized(&rules[0], &data, &plan, &eval, config.num_trials())?)?,
        Mode::Stability => out.json("stability.json", &auditor.loo_stability(&rules[0], &data, &plan)?)?,
        Mode::SeedInstability => out.report(&auditor.seed_instability(&rules[0], &data, &plan, &config.seed_list(), &eval)?)?,
        Mode::ArchInstability => out.report(&auditor.architecture_instability(&rules, &data, &plan, &eval)?)?,
        Mode::Boundary => {
            let b = config.boundary.clone().unwrap_or_default();
            let train = data.subset(&plan.train_ids)?;
            let removed = match b.removed_id {
                Some(id) => id,
                None => *plan
                    .leave_out_ids
                    .first()
                    .or(plan.train_ids.first())
                    .ok_or_else(|| Error::Config("the training set is empty".into()))?,
            };
            if train.row_of(removed).is_none() {
                return Err(Error::ConfigSemantic {
                    key: "boundary.removed_id".into(),
                    message: format!("{removed} is not a training point"),
                });
            }
            let r = boundary_rasters_with(trainer, &rules[0], &train, removed, b.resolution.unwrap_or(200))?;
            out.rasters(&r)?;
            out.json("boundary.json", &BoundarySummary::from(&r))?;
        }
        Mode::SmoothAudit => {
            let smoothed_rule = rules[0].clone().with_smoothing(config.smoothing.unwrap_or_default());
            let base = auditor.audit_deterministic(&rules[0], &data, &plan, &eval)?;
            let smoothed = auditor.audit_deterministic(&smoothed_rule, &data, &plan, &eval)?;
            out.write("base_report.json", base.to_json())?;
            out.json(
                "smoothing.json",
                &SmoothSummary {
                    base_expected_luf: base.expected_luf,
                    smoothed_expected_luf: smoothed.expected_luf,
                    base_flipped_fraction: base.flipped_fraction(),
                    smoothed_flipped_fraction: smoothed.flipped_fraction(),
                },
            )?;
            out.report(&smoothed)?;
        }
        Mode::Scenario => unreachable!("handled above"),
    }
    Ok(RunStatus::Complete)
}

fn collect_failed(err: &Error, into: &mut Vec<u64>) {
    if let Error::Audit { removed_id, .. } = err {
        into.push(*removed_id);
    }
}

/// Runs the config on a dedicated thread pool and writes every artifact plus
/// `manifest.json`. A training failure still produces a manifest, with status
/// `failed`; other errors are returned.
pub fn run_audit(config: &AuditConfig, options: &RunOptions) -> Result<RunManifest> {
    config.validate()?;
    let start = Instant::now();
    let dir = options
        .output_dir
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let cache = if options.no_cache {
        None
    } else {
        Some(ModelCache::new(
            options
                .cache_dir
                .clone()
                .or_else(|| config.cache_dir.clone())
                .unwrap_or_else(|| dir.join(".cache")),
        ))
    };
    let trainer = CachingTrainer::new(cache);
    let threads = options
        .parallelism
        .or(config.parallelism)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {threads} worker threads: {e}")))?;
    let mut out = Output {
        dir: dir.clone(),
        artifacts: Vec::new(),
    };
    let outcome = pool.install(|| execute(config, &trainer, &mut out));

    let records = trainer.records();
    let mut failed_ids = Vec::new();
    let (status, error) = match outcome {
        Ok(s) => (s, None),
        Err(e) if records.iter().any(|r| r.status == TrainingStatus::Failed) => {
            collect_failed(&e, &mut failed_ids);
            (RunStatus::Failed, Some(e.to_string()))
        }
        Err(e) => return Err(e),
    };
    out.artifacts.push("manifest.json".into());
    let manifest = RunManifest {
        config_hash: config.hash(),
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        mode: config.mode,
        status,
        error,
        failed_ids,
        trainings: records.iter().filter(|r| r.status == TrainingStatus::Trained).count(),
        cache_hits: records.iter().filter(|r| r.status == TrainingStatus::Cached).count(),
        variants: records,
        artifacts: out.artifacts.clone(),
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}
