// Audit a k-NN classifier on a small tabular file. Preprocessing is fitted on
// the training rows only and reused for every leave-one-out model.
//
//     cargo run --release --example csv_audit -- [path.csv] [label_column]

use std::path::PathBuf;

use loo_audit::data::{load_csv, make_split, ColumnDirective, PreprocessSpec};
use loo_audit::metrics::audit_deterministic;
use loo_audit::rules::LearningRule;

fn main() -> loo_audit::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/applicants.csv"));
    let label = args.next().unwrap_or_else(|| "approved".into());

    let spec = PreprocessSpec::default()
        .with("income", ColumnDirective::Standardize)
        .with("age", ColumnDirective::MinMax)
        .with("housing", ColumnDirective::OneHot)
        .with("applicant_id", ColumnDirective::Drop);
    let (data, fitted) = load_csv(&path, &spec, &label)?;
    println!("{} rows, features: {}", data.len(), fitted.feature_names().join(", "));

    let plan = make_split(&data, 0.75, 20, 1)?;
    for k in [1, 5, 15] {
        let r = audit_deterministic(&LearningRule::knn(k), &data, &plan, data.point_ids())?;
        println!("k = {k:>2}: expected LUF {:.3}", r.expected_luf);
    }
    Ok(())
}
