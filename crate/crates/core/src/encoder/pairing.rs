use serde::{Deserialize, Serialize};

use crate::data::DiscretePoint;
use crate::{Error, Result};

/// A value pair `(xi, xj)`, doubling as the grid cell it targets.
pub type ValuePair = (u32, u32);

/// Order in which attributes are consumed two at a time:
/// `(order[0], order[1])`, `(order[2], order[3])`, ...
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Pairing {
    order: Vec<usize>,
}

impl Pairing {
    /// Validates that `order` is a permutation of `0..order.len()` with even length.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        if order.is_empty() || order.len() % 2 == 1 {
            return Err(Error::invalid(format!(
                "pairing length {} must be even and non-zero",
                order.len()
            )));
        }
        let mut seen = vec![false; order.len()];
        for &i in &order {
            match seen.get_mut(i) {
                Some(s) if !*s => *s = true,
                _ => {
                    return Err(Error::invalid(format!(
                        "pairing {order:?} is not a permutation"
                    )))
                }
            }
        }
        Ok(Pairing { order })
    }

    /// Sequential pairs `(x1, x2), (x3, x4), ...`.
    pub fn identity(n: usize) -> Self {
        Pairing {
            order: (0..n).collect(),
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn pair_count(&self) -> usize {
        self.order.len() / 2
    }

    /// Attribute indices of pair `k`.
    pub fn attributes(&self, k: usize) -> (usize, usize) {
        (self.order[2 * k], self.order[2 * k + 1])
    }
}

impl TryFrom<Vec<usize>> for Pairing {
    type Error = Error;

    fn try_from(order: Vec<usize>) -> Result<Self> {
        Pairing::new(order)
    }
}

impl From<Pairing> for Vec<usize> {
    fn from(p: Pairing) -> Self {
        p.order
    }
}

/// Splits a point into its ordered value pairs under `pairing`.
pub fn pair_split(point: &DiscretePoint, pairing: &Pairing) -> Result<Vec<ValuePair>> {
    if point.len() != pairing.len() {
        return Err(Error::LengthMismatch {
            expected: pairing.len(),
            found: point.len(),
        });
    }
    let v = point.values();
    Ok(pairing
        .order
        .chunks_exact(2)
        .map(|c| (v[c[0]], v[c[1]]))
        .collect())
}
