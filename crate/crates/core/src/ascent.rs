//! Multi-start ascent for 0-homogeneous ratio objectives.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::norms::dot;
use crate::scalar::Scalar;

/// Budget and seeding shared by every optimization routine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AscentConfig {
    /// Random starting points (deterministic starts are added on top).
    pub starts: usize,
    pub iterations: usize,
    /// Stop once accepted steps improve the value by less than this, relatively.
    pub tol: f64,
    pub seed: u64,
    /// Random starts for inner norm evaluations (weak norms) during ascent.
    pub inner_starts: usize,
    /// Largest domain dimension for exact sign enumeration over the cube.
    pub sign_cap: usize,
    /// Largest number of (partition, sign) configurations the exact π_{p1} oracle visits.
    pub partition_cap: u128,
    /// Let `pi_estimate` answer with the exact partition oracle when it applies.
    pub exact_oracle: bool,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig {
            starts: 32,
            iterations: 500,
            tol: 1e-10,
            seed: 0,
            inner_starts: 8,
            sign_cap: 22,
            partition_cap: 1 << 22,
            exact_oracle: false,
        }
    }
}

impl AscentConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_starts(mut self, starts: usize) -> Self {
        self.starts = starts;
        self
    }

    pub fn with_exact_oracle(mut self, on: bool) -> Self {
        self.exact_oracle = on;
        self
    }
}

/// A ratio `N(x)/D(x)` that is invariant under positive scaling of `x`.
pub trait HomogeneousRatio<T: Scalar>: Sync {
    fn value(&self, x: &[T]) -> T;

    /// Value together with a supergradient of `log(N/D)` at `x`.
    fn value_and_log_gradient(&self, x: &[T]) -> (T, Vec<T>);
}

#[derive(Clone, Debug)]
pub struct AscentOutcome<T> {
    pub point: Vec<T>,
    pub value: T,
    pub start: usize,
    pub iterations: usize,
}

fn unit<T: Scalar>(mut x: Vec<T>) -> Option<Vec<T>> {
    let n = dot(&x, &x).sqrt();
    if n == T::zero() || !n.is_finite() {
        return None;
    }
    x.iter_mut().for_each(|v| *v = *v / n);
    Some(x)
}

/// Normalized gradient ascent from one start.
///
/// The search runs on the Euclidean unit sphere of the parameter space using
/// the tangential part of the log-gradient. A step is accepted only if it
/// improves the value; the step length doubles after a success and halves
/// after a failure.
pub fn ascend<T: Scalar, O: HomogeneousRatio<T>>(obj: &O, start: Vec<T>, cfg: &AscentConfig) -> AscentOutcome<T> {
    let Some(mut x) = unit(start.clone()) else {
        return AscentOutcome { point: start, value: T::zero(), start: 0, iterations: 0 };
    };
    let (mut val, mut grad) = obj.value_and_log_gradient(&x);
    if !val.is_finite() {
        return AscentOutcome { point: x, value: T::zero(), start: 0, iterations: 0 };
    }
    let tol = T::of(cfg.tol);
    let min_step = T::of(1e-12);
    let mut step = T::of(0.25);
    let mut small_gains = 0;
    let mut it = 0;
    while it < cfg.iterations {
        it += 1;
        let radial = dot(&grad, &x);
        let tangent: Vec<T> = grad.iter().zip(&x).map(|(g, xi)| *g - radial * *xi).collect();
        let gnorm = dot(&tangent, &tangent).sqrt();
        if gnorm == T::zero() || !gnorm.is_finite() {
            break;
        }
        let cand: Vec<T> = x.iter().zip(&tangent).map(|(xi, g)| *xi + step * *g / gnorm).collect();
        let Some(cand) = unit(cand) else { break };
        let cval = obj.value(&cand);
        if cval.is_finite() && cval > val {
            let gain = (cval - val) / val.max(T::min_positive_value());
            x = cand;
            let (v2, g2) = obj.value_and_log_gradient(&x);
            val = v2.max(cval);
            grad = g2;
            step = (step + step).min(T::one());
            if gain < tol {
                small_gains += 1;
                if small_gains >= 3 {
                    break;
                }
            } else {
                small_gains = 0;
            }
        } else {
            step = step / T::of(2.0);
            if step < min_step {
                break;
            }
        }
    }
    AscentOutcome { point: x, value: val, start: 0, iterations: it }
}

/// Runs [`ascend`] from every start (in parallel) and returns the best
/// outcome; ties go to the lowest start index.
pub fn maximize<T: Scalar, O: HomogeneousRatio<T>>(obj: &O, starts: Vec<Vec<T>>, cfg: &AscentConfig) -> Option<AscentOutcome<T>> {
    let outcomes: Vec<AscentOutcome<T>> = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, s)| {
            let mut o = ascend(obj, s, cfg);
            o.start = i;
            o
        })
        .collect();
    best_of(outcomes, |o| o.value)
}

/// Largest element by `key`, first one on ties. NaN keys never win.
pub fn best_of<X, T: Scalar>(items: Vec<X>, key: impl Fn(&X) -> T) -> Option<X> {
    let mut best: Option<(T, X)> = None;
    for item in items {
        let k = key(&item);
        match &best {
            Some((b, _)) if !(k > *b) => {}
            _ if k.is_nan() => {}
            _ => best = Some((k, item)),
        }
    }
    best.map(|(_, x)| x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::Exponent;
    use crate::norms::{dual_vector, p_norm};

    /// ‖x‖_1 / ‖x‖_2 on R^3, maximized at (±1,±1,±1) with value √3.
    struct L1OverL2;

    impl HomogeneousRatio<f64> for L1OverL2 {
        fn value(&self, x: &[f64]) -> f64 {
            p_norm(x, Exponent::ONE) / p_norm(x, Exponent::TWO)
        }

        fn value_and_log_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
            let n1 = p_norm(x, Exponent::ONE);
            let n2 = p_norm(x, Exponent::TWO);
            let g1 = dual_vector(x, Exponent::ONE);
            let g2 = dual_vector(x, Exponent::TWO);
            let g = g1.iter().zip(&g2).map(|(a, b)| a / n1 - b / n2).collect();
            (n1 / n2, g)
        }
    }

    #[test]
    fn ascent_reaches_known_maximum() {
        let cfg = AscentConfig::default();
        let out = maximize(&L1OverL2, vec![vec![1.0, 0.2, -0.1], vec![0.3, 0.9, 0.5]], &cfg).unwrap();
        assert!((out.value - 3f64.sqrt()).abs() < 1e-6, "{}", out.value);
    }

    #[test]
    fn best_of_prefers_first_on_ties() {
        let b = best_of(vec![(0, 1.0), (1, 2.0), (2, 2.0)], |x| x.1).unwrap();
        assert_eq!(b.0, 1);
        assert!(best_of(Vec::<(u8, f64)>::new(), |x| x.1).is_none());
    }
}
