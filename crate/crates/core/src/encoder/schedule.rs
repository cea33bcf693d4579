use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Background intensity. Every schedule level stays strictly below it.
pub const BACKGROUND: u8 = 255;

/// Per-pair intensities, darkest (first pair) first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct IntensitySchedule {
    levels: Vec<u8>,
}

impl IntensitySchedule {
    /// Requires a non-empty, strictly increasing list of levels below 255.
    pub fn new(levels: Vec<u8>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Empty("intensity schedule"));
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "schedule {levels:?} is not strictly increasing"
            )));
        }
        if levels.last() == Some(&BACKGROUND) {
            return Err(Error::invalid("schedule level 255 collides with the background"));
        }
        Ok(IntensitySchedule { levels })
    }

    pub fn levels(&self) -> &[u8] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, pair: usize) -> u8 {
        self.levels[pair]
    }

    /// Pair index carrying `level`, if any.
    pub fn pair_of(&self, level: u8) -> Option<usize> {
        self.levels.binary_search(&level).ok()
    }
}

impl TryFrom<Vec<u8>> for IntensitySchedule {
    type Error = Error;

    fn try_from(levels: Vec<u8>) -> Result<Self> {
        IntensitySchedule::new(levels)
    }
}

impl From<IntensitySchedule> for Vec<u8> {
    fn from(s: IntensitySchedule) -> Self {
        s.levels
    }
}

/// Evenly spaced levels `floor(k * 255 / m)` for `k = 0..m`.
pub fn default_schedule(m: usize) -> Result<IntensitySchedule> {
    if !(1..=255).contains(&m) {
        return Err(Error::invalid(format!("pair count {m} outside 1..=255")));
    }
    let levels = (0..m).map(|k| (k * 255 / m) as u8).collect();
    IntensitySchedule::new(levels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_pairs() {
        assert_eq!(default_schedule(5).unwrap().levels(), &[0, 51, 102, 153, 204]);
    }

    #[test]
    fn single_pair_is_black() {
        assert_eq!(default_schedule(1).unwrap().levels(), &[0]);
    }

    #[test]
    fn seventeen_pairs_step_by_fifteen() {
        // floor(k * 255 / 17) = 15k exactly since 255 = 15 * 17.
        let expected: Vec<u8> = (0..17).map(|k| 15 * k).collect();
        assert_eq!(default_schedule(17).unwrap().levels(), expected.as_slice());
    }

    #[test]
    fn bounds() {
        assert!(default_schedule(0).is_err());
        assert!(default_schedule(256).is_err());
        let full = default_schedule(255).unwrap();
        assert_eq!(full.levels(), (0..=254).collect::<Vec<u8>>().as_slice());
        assert!(IntensitySchedule::new(vec![3, 3]).is_err());
        assert!(IntensitySchedule::new(vec![10, 255]).is_err());
        assert_eq!(full.pair_of(7), Some(7));
        assert_eq!(default_schedule(5).unwrap().pair_of(52), None);
    }
}
