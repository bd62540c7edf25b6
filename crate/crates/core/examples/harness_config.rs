// Drive the harness from a config file, the same way `looaudit audit` does.
// A second run reuses every cached model.
//
//     cargo run --release --example harness_config -- [config.toml] [out_dir]

use std::path::PathBuf;

use loo_audit::harness::{parse_config, run_audit, RunOptions};

fn main() -> loo_audit::Result<()> {
    let mut args = std::env::args().skip(1);
    let config_path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/blobs_luf.toml"));
    let out = PathBuf::from(args.next().unwrap_or_else(|| "harness_out".into()));

    let config = parse_config(&config_path)?;
    println!("config {} (hash {})", config_path.display(), &config.hash()[..12]);
    let options = RunOptions {
        output_dir: Some(out.clone()),
        ..Default::default()
    };
    for attempt in ["first run", "second run"] {
        let m = run_audit(&config, &options)?;
        println!(
            "{attempt}: {:?}, {} trained, {} from cache, {:.2} s",
            m.status, m.trainings, m.cache_hits, m.wall_seconds
        );
    }
    println!("artifacts in {}", out.display());
    Ok(())
}
