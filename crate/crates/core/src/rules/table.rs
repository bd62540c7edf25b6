//! Three-point lookup rule: LOO-stable with rate zero, yet every point's
//! prediction flips under some single removal.
//!
//! Points live on the first axis: `x1 = (0,0)` and `x2 = (1,0)` are class 0,
//! `x3 = (2,0)` is class 1.

use serde::{Deserialize, Serialize};

use super::model::Model;
use crate::data::{Dataset, DatasetView};
use crate::error::{Error, Result};
use crate::numerics::Matrix;

pub const TABLE_POINTS: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]];
pub const TABLE_LABELS: [usize; 3] = [0, 0, 1];

/// Labelling function over the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum TableAssignment {
    /// Class 1 iff the first coordinate is at least `at`.
    Threshold { at: f64 },
    Constant { class: usize },
}

impl TableAssignment {
    pub fn classify(&self, x: &[f64]) -> usize {
        match *self {
            TableAssignment::Threshold { at } => usize::from(x[0] >= at),
            TableAssignment::Constant { class } => class,
        }
    }
}

/// The three points as a dataset with ids 1, 2, 3.
pub fn table_dataset() -> Dataset {
    let x = Matrix::from_rows(&TABLE_POINTS.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap();
    Dataset::new(x, TABLE_LABELS.to_vec(), 2, vec![1, 2, 3]).unwrap()
}

/// Looks up the classifier for the support of the training sample.
///
/// | support        | classifier               |
/// |----------------|--------------------------|
/// | {x1, x2, x3}   | threshold at 1.5         |
/// | {x1, x2}       | constant 1               |
/// | {x2, x3}       | constant 0               |
/// | {x1, x3}       | constant 0               |
/// | {xi}           | constant label of xi     |
/// | {}             | constant 0               |
pub fn table_rule(view: &DatasetView<'_>) -> Result<Model> {
    if view.dim() != 2 {
        return Err(Error::Argument(format!(
            "table rule expects 2-d points, got dimension {}",
            view.dim()
        )));
    }
    let mut present = [false; 3];
    for pos in 0..view.len() {
        let row = view.row_features(pos);
        let which = TABLE_POINTS
            .iter()
            .position(|p| p[0] == row[0] && p[1] == row[1])
            .filter(|&i| TABLE_LABELS[i] == view.label(pos))
            .ok_or_else(|| {
                Error::Argument(format!(
                    "({}, {}) with label {} is not one of the table rule's points",
                    row[0],
                    row[1],
                    view.label(pos)
                ))
            })?;
        present[which] = true;
    }
    let assignment = match present {
        [true, true, true] => TableAssignment::Threshold { at: 1.5 },
        [true, true, false] => TableAssignment::Constant { class: 1 },
        [false, true, true] | [true, false, true] => TableAssignment::Constant { class: 0 },
        [true, false, false] => TableAssignment::Constant { class: TABLE_LABELS[0] },
        [false, true, false] => TableAssignment::Constant { class: TABLE_LABELS[1] },
        [false, false, true] => TableAssignment::Constant { class: TABLE_LABELS[2] },
        [false, false, false] => TableAssignment::Constant { class: 0 },
    };
    Ok(Model::Table { assignment })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels_under(ids: &[u64]) -> Vec<usize> {
        let d = table_dataset();
        let m = table_rule(&d.view(ids).unwrap()).unwrap();
        m.predict(d.features()).unwrap()
    }

    #[test]
    fn full_set_is_correct() {
        assert_eq!(labels_under(&[1, 2, 3]), vec![0, 0, 1]);
    }

    #[test]
    fn removing_x3_flips_x2() {
        assert_eq!(labels_under(&[1, 2])[1], 1);
    }

    #[test]
    fn own_loss_unchanged_by_own_removal() {
        let full = labels_under(&[1, 2, 3]);
        assert_eq!(labels_under(&[2, 3])[0], full[0]);
        assert_eq!(labels_under(&[1, 3])[1], full[1]);
        assert_eq!(labels_under(&[1, 2])[2], full[2]);
    }

    #[test]
    fn foreign_points_are_rejected() {
        let x = Matrix::from_rows(&[vec![0.5, 0.0]]).unwrap();
        let d = Dataset::with_row_ids(x, vec![0], 2).unwrap();
        assert!(table_rule(&d.full_view()).is_err());
        // right location, wrong label
        let x = Matrix::from_rows(&[vec![2.0, 0.0]]).unwrap();
        let d = Dataset::with_row_ids(x, vec![0], 2).unwrap();
        assert!(table_rule(&d.full_view()).is_err());
    }
}
