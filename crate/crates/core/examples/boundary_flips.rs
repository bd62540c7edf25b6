// Train an MLP on random-label points in the unit square, drop one point and
// write both probability maps and their difference as PPM images.
//
//     cargo run --release --example boundary_flips -- [out_dir] [seed]

use std::path::PathBuf;

use loo_audit::scenarios::{run_figure1_scenario, FIGURE1_LAYER_DIMS};

fn main() -> loo_audit::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "boundary_flips".into()));
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    std::fs::create_dir_all(&dir).map_err(|e| loo_audit::Error::io(&dir, e))?;

    let (result, rasters) = run_figure1_scenario(100, &FIGURE1_LAYER_DIMS, 200, seed)?;
    for (name, bytes) in [
        ("baseline.ppm", rasters.baseline.to_ppm()),
        ("leave_one_out.ppm", rasters.variant.to_ppm()),
        ("difference.ppm", rasters.difference.to_diverging_ppm()),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| loo_audit::Error::io(&path, e))?;
    }
    println!(
        "removed point {}: {} cells flipped ({:.2}%), {} of them farther than 0.25 away",
        rasters.removed_id,
        rasters.flipped_cells,
        100.0 * rasters.flipped_fraction(),
        rasters.far_flipped_cells
    );
    println!("claims pass: {}", result.passed());
    Ok(())
}
