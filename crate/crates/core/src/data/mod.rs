//! Labeled numeric datasets and their integer-grid form.
//!
//! A [`Dataset`] holds real-valued [`RawCase`]s as they come from a CSV file
//! or a generator. [`discretize`] maps it through a [`BinningSchema`] onto
//! the `1..=G` grid the encoder works with, producing a [`DiscreteDataset`].

mod binning;
mod folds;
mod load;
mod swiss_roll;

pub use binning::{discretize, AttributeBins, BinningSchema};
pub use folds::{make_folds, FoldPlan};
pub use load::{load_csv, load_csv_with, CsvOptions, LabelColumn};
pub use swiss_roll::{gen_swiss_roll, SWISS_ROLL_T_RANGE};

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One labeled record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawCase {
    pub case_id: usize,
    pub attributes: Vec<f64>,
    pub label: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub attribute_names: Vec<String>,
    pub class_names: Vec<String>,
    cases: Vec<RawCase>,
}

impl Dataset {
    /// Validates that every case has the same attribute count and a label
    /// from `class_names`, and that there are at least two classes.
    pub fn new(
        name: impl Into<String>,
        attribute_names: Vec<String>,
        class_names: Vec<String>,
        cases: Vec<RawCase>,
    ) -> Result<Self> {
        if class_names.len() < 2 {
            return Err(Error::TooFewClasses(class_names.len()));
        }
        let n = attribute_names.len();
        if n == 0 {
            return Err(Error::Empty("dataset has no attributes"));
        }
        for case in &cases {
            if case.attributes.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: case.attributes.len(),
                });
            }
            if case.label >= class_names.len() {
                return Err(Error::invalid(format!(
                    "case {} has label {} but only {} classes are declared",
                    case.case_id,
                    case.label,
                    class_names.len()
                )));
            }
        }
        Ok(Dataset {
            name: name.into(),
            attribute_names,
            class_names,
            cases,
        })
    }

    pub fn cases(&self) -> &[RawCase] {
        &self.cases
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn n_attributes(&self) -> usize {
        self.attribute_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Per-attribute `(min, max)` over all cases.
    pub fn ranges(&self) -> Vec<(f64, f64)> {
        let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); self.n_attributes()];
        for case in &self.cases {
            for (r, &v) in ranges.iter_mut().zip(&case.attributes) {
                r.0 = r.0.min(v);
                r.1 = r.1.max(v);
            }
        }
        ranges
    }

    /// Writes the dataset as a headed CSV with the class name in the last column.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        let io = |e| Error::io(path, e);
        let mut header = self.attribute_names.join(",");
        header.push_str(",class\n");
        out.write_all(header.as_bytes()).map_err(io)?;
        for case in &self.cases {
            let mut line = case
                .attributes
                .iter()
                .map(|v| format!("{v:?}"))
                .collect::<Vec<_>>()
                .join(",");
            line.push(',');
            line.push_str(&self.class_names[case.label]);
            line.push('\n');
            out.write_all(line.as_bytes()).map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

/// A record on the integer grid: every value is in `1..=grid` and the
/// length is even.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscretePoint {
    values: Vec<u32>,
    label: usize,
    grid: u32,
    case_id: usize,
}

impl DiscretePoint {
    /// Builds a point, repeating the last value when the length is odd.
    pub fn new(mut values: Vec<u32>, label: usize, grid: u32) -> Result<Self> {
        if grid < 2 {
            return Err(Error::invalid(format!("grid resolution {grid} is below 2")));
        }
        let Some(&last) = values.last() else {
            return Err(Error::Empty("point has no values"));
        };
        if let Some(&v) = values.iter().find(|&&v| v == 0 || v > grid) {
            return Err(Error::OffGrid { value: v, grid });
        }
        if values.len() % 2 == 1 {
            values.push(last);
        }
        Ok(DiscretePoint {
            values,
            label,
            grid,
            case_id: 0,
        })
    }

    pub fn with_case_id(mut self, case_id: usize) -> Self {
        self.case_id = case_id;
        self
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn label(&self) -> usize {
        self.label
    }

    pub fn grid(&self) -> u32 {
        self.grid
    }

    pub fn case_id(&self) -> usize {
        self.case_id
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn pair_count(&self) -> usize {
        self.values.len() / 2
    }
}

/// A discretized dataset, ready for encoding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDataset {
    pub name: String,
    pub grid: u32,
    pub class_names: Vec<String>,
    pub points: Vec<DiscretePoint>,
}

impl DiscreteDataset {
    pub fn new(
        name: impl Into<String>,
        grid: u32,
        class_names: Vec<String>,
        points: Vec<DiscretePoint>,
    ) -> Result<Self> {
        if class_names.len() < 2 {
            return Err(Error::TooFewClasses(class_names.len()));
        }
        if let Some(first) = points.first() {
            for p in &points {
                if p.len() != first.len() {
                    return Err(Error::LengthMismatch {
                        expected: first.len(),
                        found: p.len(),
                    });
                }
                if p.grid != grid {
                    return Err(Error::invalid(format!(
                        "point {} uses grid {} in a grid-{grid} dataset",
                        p.case_id, p.grid
                    )));
                }
                if p.label >= class_names.len() {
                    return Err(Error::invalid(format!(
                        "point {} has undeclared label {}",
                        p.case_id, p.label
                    )));
                }
            }
        }
        Ok(DiscreteDataset {
            name: name.into(),
            grid,
            class_names,
            points,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Padded (even) record length.
    pub fn n_values(&self) -> usize {
        self.points.first().map_or(0, DiscretePoint::len)
    }

    pub fn labels(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.label).collect()
    }

    pub fn case_ids(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.case_id).collect()
    }

    /// The points at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> DiscreteDataset {
        DiscreteDataset {
            name: self.name.clone(),
            grid: self.grid,
            class_names: self.class_names.clone(),
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
        }
    }
}

/// Anything a fold plan can be built over.
pub trait Labeled {
    fn labels(&self) -> Vec<usize>;
    fn case_ids(&self) -> Vec<usize>;
}

impl Labeled for Dataset {
    fn labels(&self) -> Vec<usize> {
        self.cases.iter().map(|c| c.label).collect()
    }

    fn case_ids(&self) -> Vec<usize> {
        self.cases.iter().map(|c| c.case_id).collect()
    }
}

impl Labeled for DiscreteDataset {
    fn labels(&self) -> Vec<usize> {
        DiscreteDataset::labels(self)
    }

    fn case_ids(&self) -> Vec<usize> {
        DiscreteDataset::case_ids(self)
    }
}
