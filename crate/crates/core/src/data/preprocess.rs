//! Column-wise preprocessing fitted once on the baseline training set and
//! reused unchanged for every leave-one-out variant.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::error::{Error, Result};
use crate::numerics::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnDirective {
    OneHot,
    Standardize,
    MinMax,
    Passthrough,
    Drop,
}

/// What to do with a category that was not seen while fitting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnknownCategoryPolicy {
    /// Encode as an all-zeros one-hot block and log a warning.
    #[default]
    ZeroBlock,
    Error,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingValuePolicy {
    /// Rows with an empty or `?` cell are dropped.
    #[default]
    DropRow,
    Error,
}

/// Requested per-column treatment. Columns not listed are passed through when
/// numeric and one-hot encoded otherwise.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PreprocessSpec {
    pub columns: BTreeMap<String, ColumnDirective>,
    pub unknown_categories: UnknownCategoryPolicy,
    pub missing_values: MissingValuePolicy,
}

impl PreprocessSpec {
    pub fn with(mut self, column: &str, directive: ColumnDirective) -> Self {
        self.columns.insert(column.to_string(), directive);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "directive", rename_all = "kebab-case")]
pub enum FittedColumn {
    OneHot { name: String, categories: Vec<String> },
    Standardize { name: String, mean: f64, std: f64 },
    MinMax { name: String, min: f64, max: f64 },
    Passthrough { name: String },
}

impl FittedColumn {
    fn name(&self) -> &str {
        match self {
            FittedColumn::OneHot { name, .. }
            | FittedColumn::Standardize { name, .. }
            | FittedColumn::MinMax { name, .. }
            | FittedColumn::Passthrough { name } => name,
        }
    }

    fn width(&self) -> usize {
        match self {
            FittedColumn::OneHot { categories, .. } => categories.len(),
            _ => 1,
        }
    }
}

/// Fitted statistics plus the label vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedPreprocess {
    pub label_column: String,
    pub label_classes: Vec<String>,
    pub columns: Vec<FittedColumn>,
    pub unknown_categories: UnknownCategoryPolicy,
}

impl FittedPreprocess {
    pub fn output_dim(&self) -> usize {
        self.columns.iter().map(FittedColumn::width).sum()
    }

    pub fn feature_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.columns {
            match c {
                FittedColumn::OneHot { name, categories } => {
                    out.extend(categories.iter().map(|cat| format!("{name}={cat}")))
                }
                other => out.push(other.name().to_string()),
            }
        }
        out
    }

    /// Canonical serialized form; byte-equal statistics mean identical preprocessing.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("fitted statistics serialize")
    }
}

/// A parsed CSV: header plus string cells, rows with missing values already handled.
#[derive(Debug, Clone)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// 0-based data-row index (header excluded) of each kept row in the file.
    pub source_rows: Vec<usize>,
    /// Rows skipped under `MissingValuePolicy::DropRow`.
    pub dropped: usize,
}

impl RawTable {
    pub(crate) fn warn_dropped(&self) {
        if self.dropped > 0 {
            log::warn!("dropped {} rows with missing values", self.dropped);
        }
    }
}

fn is_missing(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty() || t == "?"
}

impl RawTable {
    /// Comma-separated, UTF-8, header row, `.` decimal separator.
    pub fn read(path: &Path, missing: MissingValuePolicy) -> Result<RawTable> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RawTable::parse(&text, missing)
    }

    pub fn parse(text: &str, missing: MissingValuePolicy) -> Result<RawTable> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| Error::Ingestion {
                row: None,
                column: None,
                message: e.to_string(),
            })?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        let mut source_rows = Vec::new();
        let mut dropped = 0usize;
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::Ingestion {
                row: Some(i),
                column: None,
                message: e.to_string(),
            })?;
            let cells: Vec<String> = rec.iter().map(str::to_string).collect();
            if let Some(c) = cells.iter().position(|c| is_missing(c)) {
                match missing {
                    MissingValuePolicy::DropRow => {
                        dropped += 1;
                        continue;
                    }
                    MissingValuePolicy::Error => {
                        return Err(Error::Ingestion {
                            row: Some(i),
                            column: header.get(c).cloned(),
                            message: "missing value".into(),
                        })
                    }
                }
            }
            rows.push(cells);
            source_rows.push(i);
        }
        Ok(RawTable {
            header,
            rows,
            source_rows,
            dropped,
        })
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Ingestion {
                row: None,
                column: Some(name.to_string()),
                message: "column not found in header".into(),
            })
    }

    fn parse_number(&self, row: usize, col: usize) -> Result<f64> {
        let cell = &self.rows[row][col];
        cell.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Ingestion {
                row: Some(self.source_rows[row]),
                column: Some(self.header[col].clone()),
                message: format!("cannot parse '{cell}' as a number"),
            })
    }

    fn column_is_numeric(&self, col: usize) -> bool {
        self.rows.iter().all(|r| r[col].parse::<f64>().is_ok())
    }
}

/// Fits the per-column statistics on the table rows `fit_rows`.
pub fn fit_preprocess(
    table: &RawTable,
    spec: &PreprocessSpec,
    label_column: &str,
    fit_rows: &[usize],
) -> Result<FittedPreprocess> {
    let label_idx = table.column_index(label_column)?;
    for name in spec.columns.keys() {
        table.column_index(name)?;
    }
    if fit_rows.is_empty() {
        return Err(Error::Argument("cannot fit preprocessing on zero rows".into()));
    }
    let label_classes = label_vocabulary(table, label_idx);
    let mut columns = Vec::new();
    for (c, name) in table.header.iter().enumerate() {
        if c == label_idx {
            continue;
        }
        let directive = match spec.columns.get(name) {
            Some(d) => *d,
            None if table.column_is_numeric(c) => ColumnDirective::Passthrough,
            None => ColumnDirective::OneHot,
        };
        let fitted = match directive {
            ColumnDirective::Drop => continue,
            ColumnDirective::OneHot => {
                let mut cats: Vec<String> = fit_rows.iter().map(|&r| table.rows[r][c].clone()).collect();
                cats.sort();
                cats.dedup();
                FittedColumn::OneHot {
                    name: name.clone(),
                    categories: cats,
                }
            }
            ColumnDirective::Standardize => {
                let vals = fit_rows
                    .iter()
                    .map(|&r| table.parse_number(r, c))
                    .collect::<Result<Vec<_>>>()?;
                let n = vals.len() as f64;
                let mean = vals.iter().sum::<f64>() / n;
                let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                FittedColumn::Standardize {
                    name: name.clone(),
                    mean,
                    std: var.sqrt(),
                }
            }
            ColumnDirective::MinMax => {
                let vals = fit_rows
                    .iter()
                    .map(|&r| table.parse_number(r, c))
                    .collect::<Result<Vec<_>>>()?;
                FittedColumn::MinMax {
                    name: name.clone(),
                    min: vals.iter().copied().fold(f64::INFINITY, f64::min),
                    max: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                }
            }
            ColumnDirective::Passthrough => FittedColumn::Passthrough { name: name.clone() },
        };
        columns.push(fitted);
    }
    Ok(FittedPreprocess {
        label_column: label_column.to_string(),
        label_classes,
        columns,
        unknown_categories: spec.unknown_categories,
    })
}

/// Labels that all parse as non-negative integers keep their value as class id;
/// anything else is mapped through the sorted vocabulary.
fn label_vocabulary(table: &RawTable, label_idx: usize) -> Vec<String> {
    let as_ints: Option<Vec<usize>> = table
        .rows
        .iter()
        .map(|r| r[label_idx].parse::<usize>().ok())
        .collect();
    match as_ints {
        Some(ints) => {
            let max = ints.iter().copied().max().unwrap_or(0).max(1);
            (0..=max).map(|v| v.to_string()).collect()
        }
        None => {
            let mut v: Vec<String> = table.rows.iter().map(|r| r[label_idx].clone()).collect();
            v.sort();
            v.dedup();
            v
        }
    }
}

/// Applies fitted statistics to every table row; returns features and labels.
pub fn transform(table: &RawTable, fitted: &FittedPreprocess) -> Result<(Matrix, Vec<usize>)> {
    let label_idx = table.column_index(&fitted.label_column)?;
    let col_idx = fitted
        .columns
        .iter()
        .map(|c| table.column_index(c.name()))
        .collect::<Result<Vec<_>>>()?;
    let width = fitted.output_dim();
    let mut data = Vec::with_capacity(table.rows.len() * width);
    let mut labels = Vec::with_capacity(table.rows.len());
    let mut unknown = 0usize;
    for (r, row) in table.rows.iter().enumerate() {
        for (fc, &c) in fitted.columns.iter().zip(&col_idx) {
            match fc {
                FittedColumn::OneHot { categories, name } => {
                    let cell = &row[c];
                    let hit = categories.iter().position(|cat| cat == cell);
                    if hit.is_none() {
                        match fitted.unknown_categories {
                            UnknownCategoryPolicy::ZeroBlock => unknown += 1,
                            UnknownCategoryPolicy::Error => {
                                return Err(Error::Ingestion {
                                    row: Some(table.source_rows[r]),
                                    column: Some(name.clone()),
                                    message: format!("unseen category '{cell}'"),
                                })
                            }
                        }
                    }
                    data.extend((0..categories.len()).map(|k| if Some(k) == hit { 1.0 } else { 0.0 }));
                }
                FittedColumn::Standardize { mean, std, .. } => {
                    let v = table.parse_number(r, c)?;
                    let s = if *std > 0.0 { *std } else { 1.0 };
                    data.push((v - mean) / s);
                }
                FittedColumn::MinMax { min, max, .. } => {
                    let v = table.parse_number(r, c)?;
                    let range = max - min;
                    data.push(if range > 0.0 { (v - min) / range } else { 0.0 });
                }
                FittedColumn::Passthrough { .. } => data.push(table.parse_number(r, c)?),
            }
        }
        let cell = &row[label_idx];
        let class = fitted
            .label_classes
            .iter()
            .position(|c| c == cell)
            .ok_or_else(|| Error::Ingestion {
                row: Some(table.source_rows[r]),
                column: Some(fitted.label_column.clone()),
                message: format!("unknown label '{cell}'"),
            })?;
        labels.push(class);
    }
    if unknown > 0 {
        log::warn!("{unknown} unseen categories encoded as all-zero blocks");
    }
    Ok((Matrix::new(table.rows.len(), width, data)?, labels))
}

/// Builds a dataset from a table with already-fitted statistics.
/// Point ids are the data-row indices in the source file.
pub fn dataset_from_table(table: &RawTable, fitted: &FittedPreprocess) -> Result<Dataset> {
    let (features, labels) = transform(table, fitted)?;
    let num_classes = fitted.label_classes.len().max(2);
    let ids = table.source_rows.iter().map(|&r| r as u64).collect();
    Dataset::new(features, labels, num_classes, ids)
}

/// Reads a CSV, fits preprocessing on all rows and returns the numeric dataset.
pub fn load_csv(path: &Path, spec: &PreprocessSpec, label_column: &str) -> Result<(Dataset, FittedPreprocess)> {
    let table = RawTable::read(path, spec.missing_values)?;
    table.warn_dropped();
    load_table(&table, spec, label_column)
}

pub fn load_table(table: &RawTable, spec: &PreprocessSpec, label_column: &str) -> Result<(Dataset, FittedPreprocess)> {
    let all: Vec<usize> = (0..table.rows.len()).collect();
    let fitted = fit_preprocess(table, spec, label_column, &all)?;
    Ok((dataset_from_table(table, &fitted)?, fitted))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CSV: &str = "a,color,y\n1,A,0\n2,B,1\n3,C,0\n";

    #[test]
    fn three_rows_binary_label() {
        let t = RawTable::parse(CSV, MissingValuePolicy::DropRow).unwrap();
        let (d, _) = load_table(&t, &PreprocessSpec::default(), "y").unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.num_classes(), 2);
        assert_eq!(d.point_ids(), &[0, 1, 2]);
    }

    #[test]
    fn one_hot_columns() {
        let t = RawTable::parse(CSV, MissingValuePolicy::DropRow).unwrap();
        let spec = PreprocessSpec::default()
            .with("color", ColumnDirective::OneHot)
            .with("a", ColumnDirective::Drop);
        let (d, f) = load_table(&t, &spec, "y").unwrap();
        assert_eq!(d.dim(), 3);
        assert_eq!(f.feature_names(), vec!["color=A", "color=B", "color=C"]);
        for r in d.features().iter_rows() {
            assert_eq!(r.iter().sum::<f64>(), 1.0);
            assert!(r.iter().all(|&v| v == 0.0 || v == 1.0));
        }
    }

    #[test]
    fn standardize_uses_population_std() {
        let t = RawTable::parse(CSV, MissingValuePolicy::DropRow).unwrap();
        let spec = PreprocessSpec::default()
            .with("a", ColumnDirective::Standardize)
            .with("color", ColumnDirective::Drop);
        let (d, _) = load_table(&t, &spec, "y").unwrap();
        // mean 2, std sqrt(2/3)
        let expected = [-1.224744871391589, 0.0, 1.224744871391589];
        for (v, e) in d.features().data().iter().zip(expected) {
            assert!((v - e).abs() < 1e-12, "{v} vs {e}");
        }
    }

    #[test]
    fn min_max_scales_to_unit_interval() {
        let t = RawTable::parse(CSV, MissingValuePolicy::DropRow).unwrap();
        let spec = PreprocessSpec::default()
            .with("a", ColumnDirective::MinMax)
            .with("color", ColumnDirective::Drop);
        let (d, _) = load_table(&t, &spec, "y").unwrap();
        assert_eq!(d.features().data(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn unparseable_cell_names_row_and_column() {
        let t = RawTable::parse("a,y\n1,0\nx,1\n", MissingValuePolicy::DropRow).unwrap();
        let spec = PreprocessSpec::default().with("a", ColumnDirective::Standardize);
        match load_table(&t, &spec, "y") {
            Err(Error::Ingestion { row, column, .. }) => {
                assert_eq!(row, Some(1));
                assert_eq!(column.as_deref(), Some("a"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unseen_category_policy() {
        let t = RawTable::parse(CSV, MissingValuePolicy::DropRow).unwrap();
        let spec = PreprocessSpec {
            unknown_categories: UnknownCategoryPolicy::Error,
            ..PreprocessSpec::default()
        }
        .with("color", ColumnDirective::OneHot);
        let fitted = fit_preprocess(&t, &spec, "y", &[0, 1]).unwrap();
        assert!(matches!(transform(&t, &fitted), Err(Error::Ingestion { row: Some(2), .. })));
        let lenient = FittedPreprocess {
            unknown_categories: UnknownCategoryPolicy::ZeroBlock,
            ..fitted
        };
        let (x, _) = transform(&t, &lenient).unwrap();
        // columns: a, color=A, color=B
        assert_eq!(x.row(2), &[3.0, 0.0, 0.0]);
    }

    #[test]
    fn missing_rows_are_dropped_or_rejected() {
        let text = "a,y\n1,0\n,1\n3,?\n4,1\n";
        let t = RawTable::parse(text, MissingValuePolicy::DropRow).unwrap();
        assert_eq!(t.source_rows, vec![0, 3]);
        assert!(RawTable::parse(text, MissingValuePolicy::Error).is_err());
    }

    #[test]
    fn missing_label_column() {
        let t = RawTable::parse(CSV, MissingValuePolicy::DropRow).unwrap();
        assert!(load_table(&t, &PreprocessSpec::default(), "nope").is_err());
    }

    #[test]
    fn missing_file() {
        let err = load_csv(Path::new("/definitely/not/here.csv"), &PreprocessSpec::default(), "y");
        assert!(matches!(err, Err(Error::Io { .. })));
    }
}
