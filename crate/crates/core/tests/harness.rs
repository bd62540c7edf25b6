use std::fs;
use std::path::{Path, PathBuf};

use loo_audit::harness::{cli_main, parse_config, run_audit, RunOptions, RunStatus};
use loo_audit::metrics::LufReport;
use serde_json::Value;

const KNN_CONFIG: &str = r#"
mode = "luf"

[dataset.synthetic]
kind = "two-circles"
n = 12
diameter = 1.0
seed = 3

[split]
train_fraction = 0.75
o_size = 5
seed = 1

[[rules]]
kind = "knn"
k = 1
"#;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn cli(args: &[&str]) -> i32 {
    cli_main(std::iter::once("looaudit").chain(args.iter().copied()))
}

fn first_file(dir: &Path) -> PathBuf {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for e in entries {
        if e.is_file() {
            return e;
        }
        if e.is_dir() {
            return first_file(&e);
        }
    }
    panic!("no file under {}", dir.display())
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.toml", KNN_CONFIG);
    let bad = write(dir.path(), "bad.toml", "mode = \"luf\"\nmode = \"luf\"\n");
    let semantic = write(dir.path(), "sem.toml", &KNN_CONFIG.replace("o_size = 5", "o_size = 500"));
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    assert_eq!(cli(&[]), 2);
    assert_eq!(cli(&["frobnicate"]), 2);
    assert_eq!(cli(&["validate", good.to_str().unwrap()]), 0);
    assert_eq!(cli(&["validate", bad.to_str().unwrap()]), 2);
    assert_eq!(cli(&["validate", semantic.to_str().unwrap()]), 2);
    assert_eq!(cli(&["validate", "/nonexistent/config.toml"]), 2);
    assert_eq!(cli(&["bound", "--epsilon", "1"]), 0);
    assert_eq!(cli(&["bound", "--epsilon", "-1"]), 2);
    assert_eq!(cli(&["scenario", "nope"]), 2);
    assert_eq!(cli(&["--parallelism", "0", "audit", good.to_str().unwrap()]), 2);
    assert_eq!(cli(&["--out", out, "audit", good.to_str().unwrap()]), 0);
    assert_eq!(cli(&["--out", out, "scenario", "prop1"]), 0);
}

#[test]
fn warm_cache_retrains_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let config = parse_config(&write(dir.path(), "c.toml", KNN_CONFIG)).unwrap();
    let options = RunOptions {
        output_dir: Some(dir.path().join("out")),
        ..Default::default()
    };
    let cold = run_audit(&config, &options).unwrap();
    assert!(cold.succeeded());
    assert_eq!(cold.trainings, 6);
    assert_eq!(cold.cache_hits, 0);
    let report_cold = fs::read(dir.path().join("out/report.json")).unwrap();

    let warm = run_audit(&config, &options).unwrap();
    assert_eq!(warm.trainings, 0);
    assert_eq!(warm.cache_hits, 6);
    assert_eq!(fs::read(dir.path().join("out/report.json")).unwrap(), report_cold);
    assert_eq!(cold.config_hash, warm.config_hash);
}

#[test]
fn corrupted_cache_entry_is_retrained() {
    let dir = tempfile::tempdir().unwrap();
    let config = parse_config(&write(dir.path(), "c.toml", KNN_CONFIG)).unwrap();
    let cache = dir.path().join("models");
    let options = RunOptions {
        output_dir: Some(dir.path().join("out")),
        cache_dir: Some(cache.clone()),
        ..Default::default()
    };
    run_audit(&config, &options).unwrap();
    let victim = first_file(&cache);
    let mut bytes = fs::read(&victim).unwrap();
    bytes[0] ^= 0xff;
    fs::write(&victim, bytes).unwrap();
    let again = run_audit(&config, &options).unwrap();
    assert_eq!(again.trainings, 1);
    assert_eq!(again.cache_hits, 5);
}

#[test]
fn artifacts_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = parse_config(&write(dir.path(), "c.toml", KNN_CONFIG)).unwrap();
    let out = dir.path().join("out");
    let m = run_audit(
        &config,
        &RunOptions {
            output_dir: Some(out.clone()),
            no_cache: true,
            ..Default::default()
        },
    )
    .unwrap();
    for name in ["report.json", "per_point.csv", "split.json", "manifest.json", "confidence_curve.svg"] {
        assert!(out.join(name).exists(), "{name} missing");
        assert!(m.artifacts.iter().any(|a| a == name), "{name} not listed");
    }
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["status"], "complete");
    assert_eq!(manifest["mode"], "luf");
    let report: LufReport = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    report.check_consistency().unwrap();
    assert_eq!(report.estimates.len(), 12);
    let per_point = fs::read_to_string(out.join("per_point.csv")).unwrap();
    assert_eq!(per_point.lines().count(), 13);
}

#[test]
fn parallelism_does_not_change_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let text = KNN_CONFIG.replace("kind = \"knn\"\nk = 1", "kind = \"standard-mlp\"\nhidden = [8]\nepochs = 20\nseed = 2");
    let config = parse_config(&write(dir.path(), "c.toml", &text)).unwrap();
    let run = |threads| {
        let out = dir.path().join(format!("p{threads}"));
        run_audit(
            &config,
            &RunOptions {
                parallelism: Some(threads),
                output_dir: Some(out.clone()),
                no_cache: true,
                ..Default::default()
            },
        )
        .unwrap();
        (fs::read(out.join("report.json")).unwrap(), fs::read(out.join("split.json")).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn stability_mode_writes_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let text = KNN_CONFIG.replace("mode = \"luf\"", "mode = \"stability\"");
    let config = parse_config(&write(dir.path(), "c.toml", &text)).unwrap();
    let out = dir.path().join("out");
    run_audit(
        &config,
        &RunOptions {
            output_dir: Some(out.clone()),
            ..Default::default()
        },
    )
    .unwrap();
    let s = read_json(&out.join("stability.json"));
    let rate = s["loo_stability_rate"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&rate));
}

#[test]
fn smooth_audit_mode() {
    let dir = tempfile::tempdir().unwrap();
    let text = KNN_CONFIG.replace("mode = \"luf\"", "mode = \"smooth-audit\"")
        + "\n[smoothing]\nsigma_squared = 0.01\nnum_samples = 200\nnoise_seed = 1\n";
    let config = parse_config(&write(dir.path(), "c.toml", &text)).unwrap();
    let out = dir.path().join("out");
    let m = run_audit(
        &config,
        &RunOptions {
            output_dir: Some(out.clone()),
            ..Default::default()
        },
    )
    .unwrap();
    assert!(m.succeeded());
    let s = read_json(&out.join("smoothing.json"));
    assert!(s["smoothed_expected_luf"].as_f64().is_some());
    assert!(out.join("base_report.json").exists());
}

#[test]
fn boundary_mode_writes_rasters() {
    let dir = tempfile::tempdir().unwrap();
    let text = KNN_CONFIG.replace("mode = \"luf\"", "mode = \"boundary\"") + "\n[boundary]\nresolution = 20\n";
    let config = parse_config(&write(dir.path(), "c.toml", &text)).unwrap();
    let out = dir.path().join("out");
    let m = run_audit(
        &config,
        &RunOptions {
            output_dir: Some(out.clone()),
            ..Default::default()
        },
    )
    .unwrap();
    assert!(m.succeeded());
    assert!(m.artifacts.iter().filter(|a| a.ends_with(".ppm")).count() >= 2);
    let b = read_json(&out.join("boundary.json"));
    assert!(b.is_object());
}

#[test]
fn scenario_mode_via_config() {
    let dir = tempfile::tempdir().unwrap();
    let text = "mode = \"scenario\"\n[scenario]\nname = \"two-circles\"\nn = 10\ngrid = 10\n";
    let config = parse_config(&write(dir.path(), "c.toml", text)).unwrap();
    let out = dir.path().join("out");
    let m = run_audit(
        &config,
        &RunOptions {
            output_dir: Some(out.clone()),
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(m.status, RunStatus::Complete);
    let s = read_json(&out.join("scenario.json"));
    assert_eq!(s["name"], "two-circles");
}

#[test]
fn csv_audit_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("age,colour,score,label\n");
    for i in 0..30 {
        let colour = ["red", "green", "blue"][i % 3];
        let label = usize::from(i % 3 == 0 || i > 24);
        csv.push_str(&format!("{},{colour},{}.5,{label}\n", 20 + i, i % 7));
    }
    csv.push_str("99,,1.0,1\n");
    write(dir.path(), "people.csv", &csv);
    let text = r#"
mode = "luf"
eval = "test"

[dataset]
csv = "people.csv"
label = "label"
columns = { age = "standardize", colour = "one-hot", score = "min-max" }

[split]
train_fraction = 0.7
o_size = 4
seed = 2

[[rules]]
kind = "knn"
k = 3
"#;
    let config = parse_config(&write(dir.path(), "c.toml", text)).unwrap();
    let out = dir.path().join("out");
    run_audit(
        &config,
        &RunOptions {
            output_dir: Some(out.clone()),
            ..Default::default()
        },
    )
    .unwrap();
    let pre = read_json(&out.join("preprocess.json"));
    assert!(pre.to_string().contains("colour"));
    let report: LufReport = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    // 30 complete rows, 21 train, 9 test
    assert_eq!(report.estimates.len(), 9);
}
