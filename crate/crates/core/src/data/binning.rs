use serde::{Deserialize, Serialize};

use super::{Dataset, DiscreteDataset, DiscretePoint};
use crate::{Error, Result};

/// Bin layout for one attribute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeBins {
    /// `G` equal-width bins over `[min, max]`; the last bin is closed.
    Uniform { min: f64, max: f64 },
    /// `G + 1` strictly increasing edges; bin `k` is `[edges[k-1], edges[k])`,
    /// the last bin is closed.
    Edges(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinningSchema {
    pub grid: u32,
    pub attributes: Vec<AttributeBins>,
    /// Out-of-range values go to bin 1 / `G` instead of failing.
    pub clamp: bool,
}

impl BinningSchema {
    pub fn uniform(ranges: &[(f64, f64)], grid: u32, clamp: bool) -> Result<Self> {
        let attributes = ranges
            .iter()
            .map(|&(min, max)| AttributeBins::Uniform { min, max })
            .collect();
        BinningSchema {
            grid,
            attributes,
            clamp,
        }
        .validated()
    }

    /// Uniform bins over each attribute's observed range in `dataset`.
    pub fn uniform_from(dataset: &Dataset, grid: u32) -> Result<Self> {
        Self::uniform(&dataset.ranges(), grid, true)
    }

    /// Maps integers `1..=G` onto themselves; anything else is out of range.
    pub fn identity(n_attributes: usize, grid: u32) -> Result<Self> {
        let upper = f64::from(grid) + 0.5;
        Self::uniform(&vec![(0.5, upper); n_attributes], grid, false)
    }

    /// Ionosphere-style bins of width 0.2 where `[0, 0.2)` is value 5 and
    /// `[0.2, 0.4)` is value 6. With `G = 10` the bins run from -0.8 to 1.2;
    /// values in `[-1, -0.8)` clamp to 1.
    pub fn ionosphere(n_attributes: usize) -> Result<Self> {
        let edges: Vec<f64> = (0..=10).map(|k| f64::from(2 * k - 8) / 10.0).collect();
        BinningSchema {
            grid: 10,
            attributes: vec![AttributeBins::Edges(edges); n_attributes],
            clamp: true,
        }
        .validated()
    }

    pub fn edges(per_attribute: Vec<Vec<f64>>, clamp: bool) -> Result<Self> {
        let grid = per_attribute
            .first()
            .map_or(0, |e| e.len().saturating_sub(1)) as u32;
        BinningSchema {
            grid,
            attributes: per_attribute.into_iter().map(AttributeBins::Edges).collect(),
            clamp,
        }
        .validated()
    }

    fn validated(self) -> Result<Self> {
        if self.grid < 2 {
            return Err(Error::invalid(format!(
                "grid resolution {} is below 2",
                self.grid
            )));
        }
        for (i, bins) in self.attributes.iter().enumerate() {
            match bins {
                AttributeBins::Uniform { min, max } => {
                    if !(min.is_finite() && max.is_finite() && min <= max) {
                        return Err(Error::invalid(format!(
                            "attribute {i}: bad range [{min}, {max}]"
                        )));
                    }
                }
                AttributeBins::Edges(edges) => {
                    if edges.len() != self.grid as usize + 1 {
                        return Err(Error::invalid(format!(
                            "attribute {i}: {} edges for {} bins",
                            edges.len(),
                            self.grid
                        )));
                    }
                    if edges.windows(2).any(|w| !(w[0] < w[1])) {
                        return Err(Error::invalid(format!(
                            "attribute {i}: edges are not strictly increasing"
                        )));
                    }
                }
            }
        }
        Ok(self)
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    /// Bin index in `1..=G` for value `x` of attribute `attribute`.
    pub fn bin(&self, attribute: usize, x: f64) -> Result<u32> {
        let g = self.grid;
        let bins = self.attributes.get(attribute).ok_or(Error::LengthMismatch {
            expected: self.attributes.len(),
            found: attribute + 1,
        })?;
        let (below, above, raw) = match bins {
            AttributeBins::Uniform { min, max } => {
                let width = (max - min) / f64::from(g);
                let raw = if width > 0.0 {
                    ((x - min) / width).floor() + 1.0
                } else {
                    // Constant attribute: everything lands in the first bin.
                    1.0
                };
                (x < *min, x > *max, raw)
            }
            AttributeBins::Edges(edges) => {
                let raw = edges.partition_point(|&e| e <= x) as f64;
                (x < edges[0], x > edges[g as usize], raw)
            }
        };
        if (below || above) && !self.clamp {
            return Err(Error::OutOfRange {
                attribute,
                value: x,
            });
        }
        Ok(raw.clamp(1.0, f64::from(g)) as u32)
    }

    /// Representative value at the centre of `bin` (1-based).
    pub fn midpoint(&self, attribute: usize, bin: u32) -> f64 {
        match &self.attributes[attribute] {
            AttributeBins::Uniform { min, max } => {
                let width = (max - min) / f64::from(self.grid);
                min + (f64::from(bin) - 0.5) * width
            }
            AttributeBins::Edges(edges) => {
                let k = bin as usize;
                0.5 * (edges[k - 1] + edges[k])
            }
        }
    }
}

/// Maps every case onto the schema's grid, padding odd-length records by
/// repeating the last value.
pub fn discretize(dataset: &Dataset, schema: &BinningSchema) -> Result<DiscreteDataset> {
    if schema.n_attributes() != dataset.n_attributes() {
        return Err(Error::LengthMismatch {
            expected: dataset.n_attributes(),
            found: schema.n_attributes(),
        });
    }
    let points = dataset
        .cases()
        .iter()
        .map(|case| {
            let values = case
                .attributes
                .iter()
                .enumerate()
                .map(|(i, &x)| schema.bin(i, x))
                .collect::<Result<Vec<_>>>()?;
            Ok(DiscretePoint::new(values, case.label, schema.grid)?.with_case_id(case.case_id))
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteDataset::new(
        dataset.name.clone(),
        schema.grid,
        dataset.class_names.clone(),
        points,
    )
}
