//! Occlusion importance of grid blocks and pair-value frequencies inside
//! a block.

mod frequency;
mod icc;

pub use frequency::{conserves_cases, pair_frequency, pair_frequency_all, FrequencyRow, FrequencyTable};
pub use icc::{cover_cell, icc_cells, icc_rank, CellScore, IccCell, IccReport};
