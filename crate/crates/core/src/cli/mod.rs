//! The `cpcr` command-line driver.
//!
//! Every subcommand resolves a [`RunConfig`] (defaults, then `--config`
//! file, then flags), writes it to `<out>/run_config.json`, and writes its
//! results as files under `<out>`. Progress goes to the log.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{Binning, RunConfig, SynthConfig};

use crate::context::MeanRender;
use crate::encoder::{Collision, ColorMode, Marker, Origin};
use crate::optimize::SearchMode;
use crate::Error;

/// Process exit status of [`run`].
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "cpcr", version, about = "Paired-coordinate raster encoding toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Encode every case to an image plus a JSON sidecar.
    Encode,
    /// Generate a Swiss-roll dataset as CSV.
    Synth,
    /// Cross-validate the MLP on encoded images.
    Cv,
    /// Random search over pairings and intensity schedules.
    Optimize,
    /// Rank grid blocks by covered validation accuracy.
    Icc,
    /// Pair-value frequencies inside grid blocks.
    Freq,
    /// Gradient saliency maps for chosen cases.
    Saliency,
    /// Recover a record from an image and its sidecar.
    Decode,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Encode => "encode",
            Command::Synth => "synth",
            Command::Cv => "cv",
            Command::Optimize => "optimize",
            Command::Icc => "icc",
            Command::Freq => "freq",
            Command::Saliency => "saliency",
            Command::Decode => "decode",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OriginArg {
    Ulc,
    Llc,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CollisionArg {
    Overwrite,
    Cross,
    Spiral,
    Strip,
    Darkest,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ColorArg {
    Gray,
    Red,
    Rgb,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MarkerArg {
    Cell,
    Plus,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ContextArg {
    Own,
    Grey,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SearchModeArg {
    Pairing,
    Intensities,
    Both,
}

/// Flags override the `--config` file, which overrides the defaults.
#[derive(Args, Debug, Default)]
struct Flags {
    /// Run configuration JSON (a previous run_config.json or a fragment).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Input CSV with a header row.
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// Label column: header name, zero-based index or `last`.
    #[arg(long, global = true)]
    label_col: Option<String>,
    /// uniform, identity, ionosphere, or a .json binning schema.
    #[arg(long, global = true)]
    binning: Option<Binning>,
    /// Grid resolution G.
    #[arg(long, global = true)]
    grid: Option<u32>,
    /// Pixels per grid cell side.
    #[arg(long, global = true)]
    cell_px: Option<u32>,
    #[arg(long, global = true, value_enum)]
    origin: Option<OriginArg>,
    #[arg(long, global = true, value_enum)]
    collision: Option<CollisionArg>,
    #[arg(long, global = true, value_enum)]
    color: Option<ColorArg>,
    #[arg(long, global = true, value_enum)]
    marker: Option<MarkerArg>,
    /// Compose each case over the class means; `grey` flattens the means.
    #[arg(long, global = true, value_enum, num_args = 0..=1, default_missing_value = "own")]
    context: Option<ContextArg>,
    #[arg(long, global = true)]
    folds: Option<usize>,
    /// Keep class proportions in every fold.
    #[arg(long, global = true)]
    stratified: bool,
    #[arg(long, global = true)]
    epochs: Option<usize>,
    #[arg(long, global = true)]
    batch: Option<usize>,
    #[arg(long, global = true)]
    lr: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of random alternatives beside the baseline.
    #[arg(long, global = true)]
    search_k: Option<usize>,
    #[arg(long, global = true, value_enum)]
    search_mode: Option<SearchModeArg>,
    /// Outer fold whose training part `optimize` searches on.
    #[arg(long, global = true)]
    fold: Option<usize>,
    /// ICC block side in grid cells.
    #[arg(long, global = true)]
    block: Option<u32>,
    /// Comma-separated ICC cell ids.
    #[arg(long, global = true, value_delimiter = ',')]
    cells: Option<Vec<usize>>,
    /// Comma-separated case ids.
    #[arg(long, global = true, value_delimiter = ',')]
    cases: Option<Vec<usize>>,
    #[arg(long, global = true)]
    class: Option<usize>,
    #[arg(long, global = true)]
    image: Option<PathBuf>,
    /// Defaults to the image path with a .json extension.
    #[arg(long, global = true)]
    sidecar: Option<PathBuf>,
    /// Write PGM/PPM instead of PNG.
    #[arg(long, global = true)]
    pnm: bool,
    /// Swiss-roll dimension (2 or 3).
    #[arg(long, global = true)]
    dim: Option<usize>,
    #[arg(long, global = true)]
    n_per_class: Option<usize>,
    #[arg(long, global = true)]
    noise: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

impl Flags {
    fn apply(self, c: &mut RunConfig) {
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field { $target = v.into(); })*
            };
        }
        set!(
            data => c.data,
            label_col => c.label_col,
            binning => c.binning,
            grid => c.grid,
            cell_px => c.cell_px,
            folds => c.folds,
            epochs => c.epochs,
            batch => c.batch,
            lr => c.lr,
            seed => c.seed,
            search_k => c.search_k,
            fold => c.fold,
            block => c.block,
            cells => c.cells,
            cases => c.cases,
            class => c.class,
            image => c.image,
            sidecar => c.sidecar,
            dim => c.synth.dim,
            n_per_class => c.synth.n_per_class,
            noise => c.synth.noise,
            out => c.out,
            jobs => c.jobs,
        );
        if let Some(o) = self.origin {
            c.origin = match o {
                OriginArg::Ulc => Origin::UpperLeft,
                OriginArg::Llc => Origin::LowerLeft,
            };
        }
        if let Some(o) = self.collision {
            c.collision = match o {
                CollisionArg::Overwrite => Collision::OverwriteLast,
                CollisionArg::Cross => Collision::CrossAdjacent,
                CollisionArg::Spiral => Collision::SpiralAdjacent,
                CollisionArg::Strip => Collision::StripSplit,
                CollisionArg::Darkest => Collision::DarkestWins,
            };
        }
        if let Some(o) = self.color {
            c.color = match o {
                ColorArg::Gray => ColorMode::Grayscale,
                ColorArg::Red => ColorMode::RedLevels,
                ColorArg::Rgb => ColorMode::RandomRgb,
            };
        }
        if let Some(o) = self.marker {
            c.marker = match o {
                MarkerArg::Cell => Marker::Cell,
                MarkerArg::Plus => Marker::Plus,
            };
        }
        if let Some(o) = self.context {
            c.context = Some(match o {
                ContextArg::Own => MeanRender::Own,
                ContextArg::Grey => MeanRender::Grey,
            });
        }
        if let Some(o) = self.search_mode {
            c.search_mode = match o {
                SearchModeArg::Pairing => SearchMode::Pairing,
                SearchModeArg::Intensities => SearchMode::Intensities,
                SearchModeArg::Both => SearchMode::Both,
            };
        }
        c.stratified |= self.stratified;
        c.pnm |= self.pnm;
    }
}

/// Failure of a CLI run, split by exit status.
#[derive(Debug)]
pub(crate) enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(m) => CliError::Usage(m),
            Error::Unsupported(m) => CliError::Usage(format!("unsupported: {m}")),
            other => CliError::Data(other),
        }
    }
}

/// Parses `args` (program name first) and runs the subcommand. Returns the
/// exit status: 0 on success, 1 on usage errors, 2 on data errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match resolve_and_execute(cli) {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

fn resolve_and_execute(cli: Cli) -> Result<(), CliError> {
    let mut config = match &cli.flags.config {
        Some(path) => RunConfig::load(path).map_err(|e| match e {
            Error::Json(j) => CliError::Usage(format!("{}: {j}", path.display())),
            other => CliError::Data(other),
        })?,
        None => RunConfig::default(),
    };
    cli.flags.apply(&mut config);
    config.command = Some(cli.command.name().into());

    let threads = config
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} workers: {e}")))?;
    pool.install(|| commands::execute(cli.command, &config))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let mut c = RunConfig {
            grid: 20,
            cell_px: 4,
            ..RunConfig::default()
        };
        let flags = Cli::try_parse_from(["cpcr", "cv", "--grid", "12", "--collision", "spiral", "--context"])
            .unwrap()
            .flags;
        flags.apply(&mut c);
        assert_eq!(c.grid, 12);
        assert_eq!(c.cell_px, 4);
        assert_eq!(c.collision, Collision::SpiralAdjacent);
        assert_eq!(c.context, Some(MeanRender::Own));
    }

    #[test]
    fn list_flags_split_on_commas() {
        let cli = Cli::try_parse_from(["cpcr", "freq", "--cells", "13,23", "--context", "grey"]).unwrap();
        assert_eq!(cli.flags.cells, Some(vec![13, 23]));
        assert!(matches!(cli.flags.context, Some(ContextArg::Grey)));
    }

    #[test]
    fn usage_errors_exit_with_one() {
        assert_eq!(run(["cpcr", "cv", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["cpcr", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["cpcr", "cv", "--collision", "sideways"]), EXIT_USAGE);
        assert_eq!(run(["cpcr", "--help"]), EXIT_OK);
    }
}
