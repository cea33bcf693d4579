//! Paired-coordinate raster encoding (CPC-R) for numeric records.
//!
//! An n-D record is discretized onto a `G`-value grid, split into
//! `⌈n/2⌉` attribute pairs, and each pair `(xi, xj)` is drawn as a filled
//! cell at grid coordinate `(xi, xj)`. The order of the pairs is carried by
//! intensity: the first pair is the darkest. The image is lossless as long
//! as no two pairs land on the same cell, and several collision strategies
//! keep more of the record when they do.
//!
//! The crate is organized by pipeline stage:
//!
//! - [`data`]: CSV loading, binning, fold plans, Swiss-roll synthesis.
//! - [`encoder`]: pairing, intensity schedules, cell placement, rendering,
//!   decoding and image export.
//! - [`context`]: class-mean backgrounds and the padded double images.
//! - [`classifier`]: the built-in MLP, training, gradient checking,
//!   vanilla-gradient saliency and cross-validation.
//! - [`optimize`]: random search over pairings and intensity schedules.
//! - [`analysis`]: informative-cell covering and pair-frequency tables.
//! - [`cli`]: the `cpcr` command-line driver.
//!
//! ```
//! use cpcr::encoder::{encode, EncodingConfig, Pairing};
//! use cpcr::data::DiscretePoint;
//!
//! let point = DiscretePoint::new(vec![8, 10, 10, 8, 7, 10, 9, 7, 1, 1], 0, 10).unwrap();
//! let config = EncodingConfig::new(10, 5).unwrap();
//! let image = encode(&point, &Pairing::identity(10), &config).unwrap();
//! assert_eq!(image.width(), 10);
//! assert_eq!(image.pixel(7, 9), &[0]); // cell (8,10) holds the first, black pair
//! ```

pub mod analysis;
pub mod classifier;
pub mod cli;
pub mod context;
pub mod data;
pub mod encoder;
mod error;
pub mod optimize;
pub(crate) mod rng;

pub use error::{Error, Result};
