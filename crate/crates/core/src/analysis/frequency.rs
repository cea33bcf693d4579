use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::icc::IccCell;
use crate::data::DiscreteDataset;
use crate::encoder::{pair_split, Pairing};
use crate::{Error, Result};

/// Counts for one attribute pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyRow {
    /// Pair index under the pairing.
    pub pair: usize,
    /// Zero-based attribute indices `(i, j)`.
    pub attributes: (usize, usize),
    /// One count per cell coordinate, in [`FrequencyTable::values`] order.
    pub counts: Vec<usize>,
    pub total: usize,
}

/// How often each attribute pair lands on each value pair of one cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub cell: IccCell,
    /// The cell's value pairs, ordered by `x` then `y`.
    pub values: Vec<(u32, u32)>,
    /// Non-empty rows, by total descending, ties to the earlier pair.
    pub rows: Vec<FrequencyRow>,
    pub cases: usize,
}

impl FrequencyTable {
    /// Aligned columns with one-based attribute names.
    pub fn to_text(&self) -> String {
        let label = |r: &FrequencyRow| format!("x{},x{}", r.attributes.0 + 1, r.attributes.1 + 1);
        let width = self.rows.iter().map(|r| label(r).len()).max().unwrap_or(0).max(5);
        let mut s = format!("cell {} ({} cases)\n{:<width$}", self.cell.id, self.cases, "Pairs");
        for (x, y) in &self.values {
            let _ = write!(s, " {:>7}", format!("({x},{y})"));
        }
        s.push_str("   Total\n");
        for r in &self.rows {
            let _ = write!(s, "{:<width$}", label(r));
            for c in &r.counts {
                let _ = write!(s, " {c:>7}");
            }
            let _ = writeln!(s, " {:>7}", r.total);
        }
        s
    }

    pub fn total_for(&self, pair: usize) -> usize {
        self.rows.iter().find(|r| r.pair == pair).map_or(0, |r| r.total)
    }
}

/// Counts nominal (pre-collision) pair positions falling inside `cell`.
pub fn pair_frequency(data: &DiscreteDataset, pairing: &Pairing, cell: &IccCell) -> Result<FrequencyTable> {
    if cell.x0 + cell.block - 1 > data.grid || cell.y0 + cell.block - 1 > data.grid {
        return Err(Error::Geometry(format!(
            "cell {} lies outside the {}-grid",
            cell.id, data.grid
        )));
    }
    let values = cell.coords();
    let pairs = pairing.pair_count();
    let slots = values.len();
    let counts = data
        .points
        .par_iter()
        .map(|p| -> Result<Vec<usize>> {
            let mut local = vec![0usize; pairs * slots];
            for (k, v) in pair_split(p, pairing)?.into_iter().enumerate() {
                if cell.contains(v) {
                    let slot = ((v.0 - cell.x0) * cell.block + (v.1 - cell.y0)) as usize;
                    local[k * slots + slot] += 1;
                }
            }
            Ok(local)
        })
        .try_reduce(
            || vec![0usize; pairs * slots],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;

    let mut rows: Vec<FrequencyRow> = counts
        .chunks_exact(slots)
        .enumerate()
        .map(|(k, c)| FrequencyRow {
            pair: k,
            attributes: pairing.attributes(k),
            counts: c.to_vec(),
            total: c.iter().sum(),
        })
        .filter(|r| r.total > 0)
        .collect();
    rows.sort_by(|a, b| b.total.cmp(&a.total).then(a.pair.cmp(&b.pair)));
    Ok(FrequencyTable {
        cell: *cell,
        values,
        rows,
        cases: data.len(),
    })
}

/// One table per cell.
pub fn pair_frequency_all(data: &DiscreteDataset, pairing: &Pairing, cells: &[IccCell]) -> Result<Vec<FrequencyTable>> {
    cells.iter().map(|c| pair_frequency(data, pairing, c)).collect()
}

/// True when, for every attribute pair, the totals over a tiling of the
/// grid add up to the number of cases.
pub fn conserves_cases(tables: &[FrequencyTable], pair_count: usize) -> bool {
    (0..pair_count).all(|k| {
        tables.iter().map(|t| t.total_for(k)).sum::<usize>() == tables.first().map_or(0, |t| t.cases)
    })
}
