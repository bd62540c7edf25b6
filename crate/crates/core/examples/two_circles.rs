// 1-NN on two discs of diameter d whose centres are 3d apart. Inside the
// discs nothing ever flips; between them a single removal moves the boundary.
//
//     cargo run --release --example two_circles -- [seed]

use loo_audit::scenarios::run_two_circles_scenario;

fn main() -> loo_audit::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let t = std::time::Instant::now();
    let result = run_two_circles_scenario(1.0, 20, 25, seed)?;
    for c in &result.claims {
        println!("{:<36} {:>6} {:>6} {}", c.description, c.expected, c.observed, c.passed);
    }
    println!("witness: {}", result.metadata["dp_witness"]);
    println!("{:.2?}", t.elapsed());
    Ok(())
}
