//! Random search over attribute pairings and intensity schedules, scored
//! by inner cross-validation on training data only.

use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{cross_validate, MlpSpec, TrainConfig};
use crate::context::MeanRender;
use crate::data::{make_folds, DiscreteDataset, FoldPlan};
use crate::encoder::{default_schedule, EncodingConfig, IntensitySchedule, Pairing, BACKGROUND};
use crate::{rng, Error, Result};

/// Which parts of the encoding the search varies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Pairing,
    Intensities,
    #[default]
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSpec {
    /// Sampled alternatives on top of the baseline.
    pub k: usize,
    pub seed: u64,
    pub mode: SearchMode,
    pub inner_folds: usize,
    pub stratified: bool,
    pub architecture: MlpSpec,
    pub train: TrainConfig,
    /// Score candidates on double images over fold-local class means.
    pub context: Option<MeanRender>,
}

impl Default for SearchSpec {
    fn default() -> Self {
        SearchSpec {
            k: 30,
            seed: 0,
            mode: SearchMode::Both,
            inner_folds: 3,
            stratified: true,
            architecture: MlpSpec::standard(),
            train: TrainConfig::default(),
            context: None,
        }
    }
}

impl SearchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.inner_folds < 2 {
            return Err(Error::invalid(format!(
                "inner fold count {} is below 2",
                self.inner_folds
            )));
        }
        self.architecture.validate()?;
        self.train.validate()
    }
}

/// One evaluated encoding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub pairing: Pairing,
    pub schedule: IntensitySchedule,
    /// Mean inner cross-validation accuracy.
    pub accuracy: f64,
}

/// Every candidate in evaluation order; entry 0 is the baseline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub spec: SearchSpec,
    pub candidates: Vec<Candidate>,
    /// Highest accuracy, ties to the earliest candidate.
    pub best: usize,
    pub inner_plan: FoldPlan,
    /// Cases the search was allowed to see.
    pub training_case_ids: Vec<usize>,
}

impl SearchTrace {
    pub fn baseline(&self) -> &Candidate {
        &self.candidates[0]
    }

    pub fn best_candidate(&self) -> &Candidate {
        &self.candidates[self.best]
    }

    /// Pairing and schedule of the winner, in the shape the CLI `cv`
    /// command merges into its run configuration.
    pub fn best_fragment(&self) -> EncodingFragment {
        let best = self.best_candidate();
        EncodingFragment {
            pairing: best.pairing.clone(),
            schedule: best.schedule.clone(),
        }
    }

    /// Fails if the search saw any case held out by `fold` of `outer`.
    pub fn check_no_leakage(&self, outer: &FoldPlan, fold: usize) -> Result<()> {
        if outer.excludes_validation(fold, &self.training_case_ids) {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "search data overlaps validation fold {fold}"
            )))
        }
    }
}

/// Best encoding found, serialized as a partial run configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingFragment {
    pub pairing: Pairing,
    pub schedule: IntensitySchedule,
}

/// Uniform random permutation of `0..n`; `n` must be even and non-zero.
pub fn sample_pairing<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Pairing> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    Pairing::new(order)
}

/// `m` distinct levels from `0..=254`, ascending so the first pair stays
/// darkest.
pub fn sample_schedule<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<IntensitySchedule> {
    let span = usize::from(BACKGROUND);
    if !(1..=span - 1).contains(&m) {
        return Err(Error::invalid(format!("schedule size {m} outside 1..=254")));
    }
    let mut levels: Vec<u8> = index::sample(rng, span, m)
        .into_iter()
        .map(|l| l as u8)
        .collect();
    levels.sort_unstable();
    IntensitySchedule::new(levels)
}

/// Scores the baseline (identity pairing, default schedule) and `spec.k`
/// fresh draws by inner cross-validation on `data`, which must hold
/// training cases only. `template` supplies the grid and rendering options.
pub fn random_search(
    data: &DiscreteDataset,
    spec: &SearchSpec,
    template: &EncodingConfig,
) -> Result<SearchTrace> {
    spec.validate()?;
    let n = data.n_values();
    let m = n / 2;
    let baseline = (Pairing::identity(n), default_schedule(m)?);
    let mut draws = rng::stream(spec.seed, 0);
    let mut pool = vec![baseline.clone()];
    for _ in 0..spec.k {
        let pairing = match spec.mode {
            SearchMode::Intensities => baseline.0.clone(),
            _ => sample_pairing(n, &mut draws)?,
        };
        let schedule = match spec.mode {
            SearchMode::Pairing => baseline.1.clone(),
            _ => sample_schedule(m, &mut draws)?,
        };
        pool.push((pairing, schedule));
    }

    // Every candidate sees the same inner folds, so scores differ only by encoding.
    let inner_plan = make_folds(data, spec.inner_folds, spec.stratified, spec.seed)?;
    let candidates = pool
        .into_par_iter()
        .enumerate()
        .map(|(i, (pairing, schedule))| {
            let config = template.clone().with_schedule(schedule.clone());
            let report = cross_validate(
                data,
                &pairing,
                &config,
                spec.context,
                &inner_plan,
                &spec.architecture,
                &spec.train,
            )?;
            log::info!("candidate {i}: inner accuracy {:.4}", report.mean_accuracy);
            Ok(Candidate {
                pairing,
                schedule,
                accuracy: report.mean_accuracy,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let best = best_index(&candidates);
    Ok(SearchTrace {
        spec: spec.clone(),
        candidates,
        best,
        inner_plan,
        training_case_ids: data.case_ids(),
    })
}

fn best_index(candidates: &[Candidate]) -> usize {
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate() {
        if c.accuracy > candidates[best].accuracy {
            best = i;
        }
    }
    best
}

/// Unordered attribute pairs of a pairing, for comparing pairings that
/// differ only in pair order or orientation.
pub fn pair_sets(pairing: &Pairing) -> HashSet<(usize, usize)> {
    (0..pairing.pair_count())
        .map(|k| {
            let (a, b) = pairing.attributes(k);
            (a.min(b), a.max(b))
        })
        .collect()
}
