use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifier::{MlpSpec, TrainConfig};
use crate::context::MeanRender;
use crate::data::BinningSchema;
use crate::encoder::{
    default_schedule, Collision, ColorMode, EncodingConfig, IntensitySchedule, Marker, Origin,
    Pairing,
};
use crate::optimize::{SearchMode, SearchSpec};
use crate::{Error, Result};

/// How raw attribute values map onto the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binning {
    /// Equal-width bins over each attribute's observed range.
    Uniform,
    /// Integer values `1..=G` are used as they are.
    Identity,
    /// Width-0.2 bins with `[0, 0.2)` at value 5, for signals in `[-1, 1]`.
    Ionosphere,
    /// A serialized [`BinningSchema`].
    Schema(PathBuf),
}

impl std::str::FromStr for Binning {
    type Err = String;

    /// `uniform`, `identity`, `ionosphere`, or a path to a schema file.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "uniform" => Binning::Uniform,
            "identity" => Binning::Identity,
            "ionosphere" => Binning::Ionosphere,
            path if path.ends_with(".json") => Binning::Schema(path.into()),
            other => {
                return Err(format!(
                    "unknown binning `{other}`: use uniform, identity, ionosphere or a .json schema"
                ))
            }
        })
    }
}

/// Parameters of the `synth` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub dim: usize,
    pub n_per_class: usize,
    pub noise: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            dim: 2,
            n_per_class: 500,
            noise: 0.5,
        }
    }
}

/// Everything a run depends on. Each run writes its resolved copy as
/// `run_config.json` into the output directory; passing that file back via
/// `--config` repeats the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Subcommand that produced this file; informational.
    pub command: Option<String>,
    pub data: Option<PathBuf>,
    pub label_col: String,
    pub binning: Binning,
    pub grid: u32,
    pub cell_px: u32,
    pub origin: Origin,
    pub collision: Collision,
    pub color: ColorMode,
    pub marker: Marker,
    pub rgb_seed: u64,
    /// Identity when absent.
    pub pairing: Option<Pairing>,
    /// Evenly spaced levels when absent.
    pub schedule: Option<IntensitySchedule>,
    pub context: Option<MeanRender>,
    pub folds: usize,
    pub stratified: bool,
    /// Drives fold assignment, initialization, training and search.
    pub seed: u64,
    pub architecture: MlpSpec,
    pub epochs: usize,
    pub batch: usize,
    pub lr: f64,
    pub momentum: f64,
    pub search_k: usize,
    pub search_mode: SearchMode,
    pub inner_folds: usize,
    /// Restricts `optimize` to the training part of this outer fold.
    pub fold: Option<usize>,
    pub block: u32,
    /// ICC cell ids for `freq`; all cells when empty.
    pub cells: Vec<usize>,
    /// Case ids for `saliency`; the first case when empty.
    pub cases: Vec<usize>,
    /// Saliency target class; each case's own label when absent.
    pub class: Option<usize>,
    pub image: Option<PathBuf>,
    pub sidecar: Option<PathBuf>,
    pub pnm: bool,
    pub synth: SynthConfig,
    pub out: PathBuf,
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let train = TrainConfig::default();
        let search = SearchSpec::default();
        RunConfig {
            command: None,
            data: None,
            label_col: "last".into(),
            binning: Binning::Uniform,
            grid: 10,
            cell_px: 1,
            origin: Origin::UpperLeft,
            collision: Collision::OverwriteLast,
            color: ColorMode::Grayscale,
            marker: Marker::Cell,
            rgb_seed: 0,
            pairing: None,
            schedule: None,
            context: None,
            folds: 10,
            stratified: false,
            seed: 0,
            architecture: MlpSpec::standard(),
            epochs: train.epochs,
            batch: train.batch_size,
            lr: train.learning_rate,
            momentum: train.momentum,
            search_k: search.k,
            search_mode: search.mode,
            inner_folds: search.inner_folds,
            fold: None,
            block: 2,
            cells: Vec::new(),
            cases: Vec::new(),
            class: None,
            image: None,
            sidecar: None,
            pnm: false,
            synth: SynthConfig::default(),
            out: PathBuf::from("out"),
            jobs: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch,
            learning_rate: self.lr,
            momentum: self.momentum,
            seed: self.seed,
            ..TrainConfig::default()
        }
    }

    pub fn search_spec(&self) -> SearchSpec {
        SearchSpec {
            k: self.search_k,
            seed: self.seed,
            mode: self.search_mode,
            inner_folds: self.inner_folds,
            stratified: self.stratified,
            architecture: self.architecture.clone(),
            train: self.train_config(),
            context: self.context,
        }
    }

    pub fn pairing_for(&self, n_values: usize) -> Result<Pairing> {
        match &self.pairing {
            Some(p) if p.len() != n_values => Err(Error::LengthMismatch {
                expected: n_values,
                found: p.len(),
            }),
            Some(p) => Ok(p.clone()),
            None => Ok(Pairing::identity(n_values)),
        }
    }

    pub fn encoding_for(&self, pairs: usize) -> Result<EncodingConfig> {
        let schedule = match &self.schedule {
            Some(s) if s.len() != pairs => {
                return Err(Error::LengthMismatch {
                    expected: pairs,
                    found: s.len(),
                })
            }
            Some(s) => s.clone(),
            None => default_schedule(pairs)?,
        };
        let config = EncodingConfig::new(self.grid, pairs)?
            .with_origin(self.origin)
            .with_cell_px(self.cell_px)
            .with_collision(self.collision)
            .with_color_mode(self.color)
            .with_marker(self.marker)
            .with_rgb_seed(self.rgb_seed)
            .with_schedule(schedule);
        config.validate()?;
        Ok(config)
    }

    pub fn binning_schema(&self, dataset: &crate::data::Dataset) -> Result<BinningSchema> {
        let schema = match &self.binning {
            Binning::Uniform => BinningSchema::uniform_from(dataset, self.grid)?,
            Binning::Identity => BinningSchema::identity(dataset.n_attributes(), self.grid)?,
            Binning::Ionosphere => BinningSchema::ionosphere(dataset.n_attributes())?,
            Binning::Schema(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                serde_json::from_str(&text)?
            }
        };
        if schema.grid != self.grid {
            return Err(Error::invalid(format!(
                "binning produces a {}-grid but --grid is {}",
                schema.grid, self.grid
            )));
        }
        Ok(schema)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_json() {
        let config = RunConfig {
            data: Some("wbc.csv".into()),
            pairing: Some(Pairing::new(vec![1, 0, 3, 2]).unwrap()),
            context: Some(MeanRender::Grey),
            binning: Binning::Schema("bins.json".into()),
            cells: vec![13, 23],
            ..RunConfig::default()
        };
        let text = serde_json::to_string(&config).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), config);
    }

    #[test]
    fn fragments_fill_in_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"pairing":[1,0],"schedule":[3,90]}"#).unwrap();
        assert_eq!(c.grid, 10);
        assert_eq!(c.schedule.unwrap().levels(), &[3, 90]);
        assert!(serde_json::from_str::<RunConfig>(r#"{"gird":5}"#).is_err());
    }

    #[test]
    fn binning_names_parse() {
        assert_eq!("identity".parse::<Binning>(), Ok(Binning::Identity));
        assert_eq!("b.json".parse::<Binning>(), Ok(Binning::Schema("b.json".into())));
        assert!("quantile".parse::<Binning>().is_err());
    }

    #[test]
    fn stored_pairing_and_schedule_are_checked() {
        let c = RunConfig {
            pairing: Some(Pairing::identity(4)),
            schedule: Some(IntensitySchedule::new(vec![0, 100, 200]).unwrap()),
            ..RunConfig::default()
        };
        assert!(c.pairing_for(6).is_err());
        assert!(c.encoding_for(2).is_err());
        assert!(c.encoding_for(3).is_ok());
    }
}
