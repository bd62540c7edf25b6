//! Report files: JSON plus flat CSV tables.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::metrics::LufReport;

fn write_csv<F>(path: &Path, header: &[&str], fill: F) -> Result<()>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let done = w.write_record(header).and_then(|_| fill(&mut w));
    done.map_err(|e| Error::Codec(format!("csv: {e}")))?;
    let bytes = w.into_inner().map_err(|e| Error::Codec(format!("csv: {e}")))?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

/// Writes `report.json`, `per_point.csv`, `flip_histogram.csv`,
/// `flip_fractions.csv` and `confidence_curve.csv` into `dir`, creating it if needed.
pub fn write_report(report: &LufReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let json = dir.join("report.json");
    std::fs::write(&json, report.to_json()).map_err(|e| Error::io(&json, e))?;
    written.push(json);

    let path = dir.join("per_point.csv");
    write_csv(&path, &["point_id", "confidence", "luf_value", "responsible_removed_id"], |w| {
        for (b, e) in report.baseline.iter().zip(&report.estimates) {
            w.write_record([
                e.point_id.to_string(),
                b.confidence.to_string(),
                e.luf_value.to_string(),
                opt(e.responsible_removed_id),
            ])?;
        }
        Ok(())
    })?;
    written.push(path);

    let path = dir.join("flip_histogram.csv");
    write_csv(&path, &["lower", "upper", "count"], |w| {
        for b in &report.flip_histogram {
            w.write_record([b.lower.to_string(), b.upper.to_string(), b.count.to_string()])?;
        }
        Ok(())
    })?;
    written.push(path);

    let path = dir.join("flip_fractions.csv");
    write_csv(&path, &[report.metadata.variant_label.as_str(), "fraction", "flipped"], |w| {
        for f in &report.flip_fractions {
            w.write_record([f.removed_id.to_string(), f.fraction.to_string(), f.flipped.to_string()])?;
        }
        Ok(())
    })?;
    written.push(path);

    let path = dir.join("confidence_curve.csv");
    write_csv(&path, &["threshold", "expected_luf", "num_points"], |w| {
        for c in &report.confidence_curve {
            w.write_record([c.threshold.to_string(), opt(c.expected_luf), c.num_points.to_string()])?;
        }
        Ok(())
    })?;
    written.push(path);
    Ok(written)
}
