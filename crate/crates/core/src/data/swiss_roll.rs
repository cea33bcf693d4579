use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{Dataset, RawCase};
use crate::{rng, Error, Result};

/// Parameter interval `[t0, t1]` of the spiral arms (1.5 to 4.5 turns of π).
pub const SWISS_ROLL_T_RANGE: (f64, f64) = (1.5 * PI, 4.5 * PI);

/// Height range of the third coordinate in the 3-D roll.
const HEIGHT: f64 = 21.0;

/// Two interleaved spiral arms. Class `c` at parameter `t` sits at
/// `(t·cos(t + cπ), t·sin(t + cπ))` plus Gaussian noise of standard
/// deviation `noise`; the 3-D variant appends a uniform height in `[0, 21)`.
///
/// Cases alternate between the classes and are deterministic in `seed`.
pub fn gen_swiss_roll(dim: usize, n_per_class: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if dim != 2 && dim != 3 {
        return Err(Error::invalid(format!("swiss roll dimension must be 2 or 3, got {dim}")));
    }
    if n_per_class == 0 {
        return Err(Error::invalid("n_per_class must be at least 1"));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::invalid(format!("noise {noise} must be finite and >= 0")));
    }
    let normal = Normal::new(0.0, noise).map_err(|e| Error::invalid(e.to_string()))?;
    let (t0, t1) = SWISS_ROLL_T_RANGE;
    let mut rng = rng::stream(seed, 0);

    let mut cases = Vec::with_capacity(2 * n_per_class);
    for i in 0..n_per_class {
        for class in 0..2 {
            let t = t0 + (t1 - t0) * rng.random::<f64>();
            let phase = t + class as f64 * PI;
            let mut attributes = vec![
                t * phase.cos() + normal.sample(&mut rng),
                t * phase.sin() + normal.sample(&mut rng),
            ];
            if dim == 3 {
                attributes.push(HEIGHT * rng.random::<f64>());
            }
            cases.push(RawCase {
                case_id: 2 * i + class,
                attributes,
                label: class,
            });
        }
    }
    let names = (1..=dim).map(|i| format!("x{i}")).collect();
    Dataset::new(
        format!("swiss_roll_{dim}d"),
        names,
        vec!["arm_a".into(), "arm_b".into()],
        cases,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_points_lie_on_their_arm() {
        let ds = gen_swiss_roll(2, 1, 0.0, 3).unwrap();
        assert_eq!(ds.len(), 2);
        for case in ds.cases() {
            let [x, y] = [case.attributes[0], case.attributes[1]];
            let t = x.hypot(y);
            assert!(t >= SWISS_ROLL_T_RANGE.0 && t <= SWISS_ROLL_T_RANGE.1);
            let phase = t + case.label as f64 * PI;
            assert!((x - t * phase.cos()).abs() < 1e-9);
            assert!((y - t * phase.sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn third_coordinate_is_uniform_height() {
        let ds = gen_swiss_roll(3, 500, 0.1, 11).unwrap();
        assert_eq!(ds.n_attributes(), 3);
        let heights: Vec<f64> = ds.cases().iter().map(|c| c.attributes[2]).collect();
        assert!(heights.iter().all(|&h| (0.0..HEIGHT).contains(&h)));
        let mean = heights.iter().sum::<f64>() / heights.len() as f64;
        assert!((mean - HEIGHT / 2.0).abs() < 1.0, "mean height {mean}");
    }

    // Leave-one-out 1-NN on the planar coordinates: interleaved arms with
    // small noise must stay locally separable.
    #[test]
    fn arms_are_separated() {
        let ds = gen_swiss_roll(2, 200, 0.3, 5).unwrap();
        let cases = ds.cases();
        let correct = cases
            .iter()
            .enumerate()
            .filter(|(i, a)| {
                let nearest = cases
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| j != i)
                    .min_by(|(_, b), (_, c)| {
                        let d = |p: &RawCase| {
                            (p.attributes[0] - a.attributes[0]).powi(2)
                                + (p.attributes[1] - a.attributes[1]).powi(2)
                        };
                        d(b).total_cmp(&d(c))
                    })
                    .unwrap()
                    .1;
                nearest.label == a.label
            })
            .count();
        assert!(correct as f64 / cases.len() as f64 > 0.95);
    }

    #[test]
    fn bit_identical_reruns() {
        let a = gen_swiss_roll(3, 50, 0.5, 99).unwrap();
        let b = gen_swiss_roll(3, 50, 0.5, 99).unwrap();
        let bits = |d: &Dataset| -> Vec<u64> {
            d.cases()
                .iter()
                .flat_map(|c| c.attributes.iter().map(|v| v.to_bits()))
                .collect()
        };
        assert_eq!(bits(&a), bits(&b));
        assert!(gen_swiss_roll(4, 1, 0.0, 0).is_err());
        assert!(gen_swiss_roll(2, 0, 0.0, 0).is_err());
    }
}
