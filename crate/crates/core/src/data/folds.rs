use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Labeled;
use crate::{rng, Error, Result};

/// Assignment of every case to one of `k` folds. `assignments[i]` is the
/// fold of the `i`-th case in dataset order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub stratified: bool,
    pub seed: u64,
    pub assignments: Vec<usize>,
    pub case_ids: Vec<usize>,
}

impl FoldPlan {
    /// Dataset positions of the training cases for `fold`.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.positions(|f| f != fold)
    }

    pub fn validation_indices(&self, fold: usize) -> Vec<usize> {
        self.positions(|f| f == fold)
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }

    /// True when none of `case_ids` belongs to validation fold `fold`.
    pub fn excludes_validation(&self, fold: usize, case_ids: &[usize]) -> bool {
        let held_out: std::collections::HashSet<usize> = self
            .validation_indices(fold)
            .into_iter()
            .map(|i| self.case_ids[i])
            .collect();
        case_ids.iter().all(|id| !held_out.contains(id))
    }

    fn positions(&self, keep: impl Fn(usize) -> bool) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|&(_, &f)| keep(f))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Splits `data` into `k` folds whose sizes differ by at most one.
///
/// Cases are shuffled with `seed` and dealt round-robin. When `stratified`,
/// the shuffled cases are grouped by class before dealing, which keeps every
/// class's per-fold counts within one of each other.
pub fn make_folds<D: Labeled + ?Sized>(
    data: &D,
    k: usize,
    stratified: bool,
    seed: u64,
) -> Result<FoldPlan> {
    let labels = data.labels();
    if k < 2 {
        return Err(Error::invalid(format!("fold count {k} is below 2")));
    }
    if labels.len() < k {
        return Err(Error::invalid(format!(
            "{} cases cannot fill {k} folds",
            labels.len()
        )));
    }
    let mut rng = rng::stream(seed, 0);
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.shuffle(&mut rng);

    if stratified {
        let n_classes = labels.iter().max().map_or(0, |m| m + 1);
        let mut by_class = vec![Vec::new(); n_classes];
        for &i in &order {
            by_class[labels[i]].push(i);
        }
        for (class, members) in by_class.iter().enumerate() {
            if !members.is_empty() && members.len() < k {
                return Err(Error::ClassTooSmall {
                    class,
                    count: members.len(),
                    k,
                });
            }
        }
        order = by_class.concat();
    }

    let mut assignments = vec![0; labels.len()];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = pos % k;
    }
    Ok(FoldPlan {
        k,
        stratified,
        seed,
        assignments,
        case_ids: data.case_ids(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    struct Labels(Vec<usize>);

    impl Labeled for Labels {
        fn labels(&self) -> Vec<usize> {
            self.0.clone()
        }
        fn case_ids(&self) -> Vec<usize> {
            (0..self.0.len()).collect()
        }
    }

    #[test]
    fn divisible_and_remainder_sizes() {
        let plan = make_folds(&Labels(vec![0; 100]), 10, false, 1).unwrap();
        assert_eq!(plan.fold_sizes(), vec![10; 10]);

        let plan = make_folds(&Labels(vec![0; 101]), 10, false, 1).unwrap();
        let mut sizes = plan.fold_sizes();
        sizes.sort();
        assert_eq!(sizes, [vec![10; 9], vec![11]].concat());
    }

    #[test]
    fn deterministic_given_seed() {
        let labels = Labels((0..57).map(|i| i % 3).collect());
        let a = make_folds(&labels, 5, true, 42).unwrap();
        let b = make_folds(&labels, 5, true, 42).unwrap();
        let c = make_folds(&labels, 5, true, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.assignments, c.assignments);
    }

    #[test]
    fn small_class_rejected_when_stratified() {
        let labels = Labels([vec![0; 30], vec![1; 3]].concat());
        assert!(matches!(
            make_folds(&labels, 5, true, 0),
            Err(Error::ClassTooSmall { class: 1, count: 3, k: 5 })
        ));
        assert!(make_folds(&labels, 5, false, 0).is_ok());
        assert!(make_folds(&labels, 1, false, 0).is_err());
    }

    #[test]
    fn leakage_check() {
        let plan = make_folds(&Labels(vec![0; 20]), 4, false, 9).unwrap();
        let train: Vec<usize> = plan.train_indices(2);
        assert!(plan.excludes_validation(2, &train));
        assert!(!plan.excludes_validation(2, &plan.validation_indices(2)[..1]));
    }

    proptest! {
        #[test]
        fn folds_partition_and_balance(
            labels in prop::collection::vec(0usize..3, 30..200),
            k in 2usize..8,
            seed in any::<u64>(),
            stratified in any::<bool>(),
        ) {
            let data = Labels(labels.clone());
            let plan = match make_folds(&data, k, stratified, seed) {
                Ok(p) => p,
                Err(Error::ClassTooSmall { .. }) => return Ok(()),
                Err(e) => panic!("{e}"),
            };
            let sizes = plan.fold_sizes();
            prop_assert_eq!(sizes.iter().sum::<usize>(), labels.len());
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);

            let mut seen = vec![0; labels.len()];
            for f in 0..k {
                for i in plan.validation_indices(f) {
                    seen[i] += 1;
                }
            }
            prop_assert!(seen.iter().all(|&s| s == 1));

            if stratified {
                for class in 0..3 {
                    let mut per_fold = vec![0usize; k];
                    for (i, &l) in labels.iter().enumerate() {
                        if l == class {
                            per_fold[plan.assignments[i]] += 1;
                        }
                    }
                    let spread = per_fold.iter().max().unwrap() - per_fold.iter().min().unwrap();
                    prop_assert!(spread <= 1);
                }
            }
        }
    }
}
