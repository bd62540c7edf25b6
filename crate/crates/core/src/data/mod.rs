//! Datasets, CSV ingestion with fitted preprocessing, seeded splits and
//! synthetic generators.

pub mod dataset;
pub mod preprocess;
pub mod split;
pub mod synthetic;

pub use dataset::{Dataset, DatasetView};
pub use preprocess::{
    load_csv, ColumnDirective, FittedPreprocess, MissingValuePolicy, PreprocessSpec, RawTable,
    UnknownCategoryPolicy,
};
pub use split::{leave_one_out, make_split, make_split_with_source, LeaveOutSource, SplitPlan};
pub use synthetic::{sample_synthetic, SyntheticKind, SyntheticSpec};
