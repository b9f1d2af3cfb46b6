//! Exact `π_{p1}^k` for operators on `ℓ_∞^m`.
//!
//! The weak-ℓ_1 unit ball of `k`-families in `ℓ_∞^m` is the unit ball of
//! `L(ℓ_∞^k, ℓ_∞^m)`, whose extreme points are the families of `±1` vectors
//! with disjoint supports covering all coordinates. The strong norm is convex,
//! so the supremum is attained at one of them. Blocks are enumerated as set
//! partitions with at most `k` blocks (empty vectors fill the rest) and signs
//! by a Gray code with the first sign of every block fixed.

use rayon::prelude::*;

use crate::ascent::{best_of, AscentConfig};
use crate::enumerate::{gray, restricted_growth_strings, stirling2};
use crate::error::{Error, Result};
use crate::estimate::{NormEstimate, Witness};
use crate::exponent::Exponent;
use crate::family::VectorFamily;
use crate::norms::p_norm;
use crate::operators::MatrixOperator;
use crate::scalar::Scalar;

/// Number of (partition, sign) configurations visited for `m` coordinates
/// and at most `k` blocks: `Σ_b S(m,b)·2^{m−b}`.
pub fn partition_configurations(m: usize, k: usize) -> u128 {
    (1..=k.min(m))
        .map(|b| stirling2(m, b).saturating_mul(1u128.checked_shl((m - b) as u32).unwrap_or(u128::MAX)))
        .fold(0u128, |a, c| a.saturating_add(c))
}

pub fn pi_exact_linf_q1<T: Scalar>(op: &MatrixOperator<T>, p: Exponent, k: usize, cfg: &AscentConfig) -> Result<NormEstimate<T>> {
    if !op.domain().is_infinite() {
        return Err(Error::InvalidParameter(format!("exact oracle needs domain exponent inf, got {}", op.domain())));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("vector budget k must be positive".into()));
    }
    let m = op.cols();
    if m == 0 {
        return Ok(NormEstimate::exact(T::zero(), "partition-enumeration", None));
    }
    let needed = partition_configurations(m, k);
    if needed > cfg.partition_cap {
        return Err(Error::CapExceeded { needed, cap: cfg.partition_cap });
    }
    let v = op.codomain();
    let cols = op.columns();
    let partitions = restricted_growth_strings(m, k);
    let results: Vec<(T, usize, u64)> = partitions
        .par_iter()
        .enumerate()
        .map(|(pi, rgs)| {
            let blocks = *rgs.iter().max().unwrap_or(&0) as usize + 1;
            let mut seen = vec![false; blocks];
            let free: Vec<usize> = (0..m)
                .filter(|&i| {
                    let b = rgs[i] as usize;
                    let first = !seen[b];
                    seen[b] = true;
                    !first
                })
                .collect();
            let mut sign = vec![T::one(); m];
            let mut images = vec![vec![T::zero(); op.rows()]; blocks];
            for i in 0..m {
                for (y, c) in images[rgs[i] as usize].iter_mut().zip(&cols[i]) {
                    *y = *y + *c;
                }
            }
            let mut norms: Vec<T> = images.iter().map(|y| p_norm(y, v)).collect();
            let mut best = (p_norm(&norms, p), pi, 0u64);
            for step in 1..(1u64 << free.len()) {
                let i = free[step.trailing_zeros() as usize];
                let b = rgs[i] as usize;
                let two = sign[i] + sign[i];
                for (y, c) in images[b].iter_mut().zip(&cols[i]) {
                    *y = *y - two * *c;
                }
                sign[i] = -sign[i];
                norms[b] = p_norm(&images[b], v);
                let val = p_norm(&norms, p);
                if val > best.0 {
                    best = (val, pi, step);
                }
            }
            best
        })
        .collect();
    let (val, pi, step) = best_of(results, |r| r.0).expect("at least one partition");
    let rgs = &partitions[pi];
    let code = gray(step);
    let mut seen = vec![false; k];
    let mut free_index = 0;
    let mut vectors = vec![vec![T::zero(); m]; k];
    for i in 0..m {
        let b = rgs[i] as usize;
        let s = if !seen[b] {
            seen[b] = true;
            T::one()
        } else {
            let bit = code >> free_index & 1;
            free_index += 1;
            if bit == 1 {
                -T::one()
            } else {
                T::one()
            }
        };
        vectors[b][i] = s;
    }
    let fam = VectorFamily::new(vectors, Exponent::INF)?;
    Ok(NormEstimate::exact(val, "partition-enumeration", Some(Witness::Family(fam))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::inclusion;
    use crate::summing::{strong_norm, weak_norm};

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    #[test]
    fn oracle_examples() {
        let cfg = AscentConfig::default();
        let iota = inclusion::<f64>(2, Exponent::INF, Exponent::ONE);
        assert_eq!(pi_exact_linf_q1(&iota, Exponent::ONE, 1, &cfg).unwrap().value, 2.0);
        let a = MatrixOperator::<f64>::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]], Exponent::INF, Exponent::TWO).unwrap();
        let est = pi_exact_linf_q1(&a, e("2"), 2, &cfg).unwrap();
        assert!((est.value - 2.0).abs() < 1e-12);
        let z = MatrixOperator::<f64>::zeros(3, 4, Exponent::INF, e("3"));
        assert_eq!(pi_exact_linf_q1(&z, e("4"), 3, &cfg).unwrap().value, 0.0);
    }

    #[test]
    fn witness_attains_value() {
        let a = MatrixOperator::<f64>::from_rows(&[vec![1.0, -2.0, 0.5, 0.3], vec![0.2, 1.0, -1.0, 2.0]], Exponent::INF, e("3")).unwrap();
        for k in 1..=3 {
            let est = pi_exact_linf_q1(&a, e("2"), k, &AscentConfig::default()).unwrap();
            let fam = est.family().unwrap();
            assert_eq!(fam.len(), k);
            assert!((weak_norm(fam, Exponent::ONE).value - 1.0).abs() < 1e-12);
            assert!((strong_norm(fam, &a, e("2")).unwrap() - est.value).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_and_domain_are_enforced() {
        let a = MatrixOperator::<f64>::zeros(1, 12, Exponent::INF, Exponent::TWO);
        let cfg = AscentConfig { partition_cap: 1000, ..AscentConfig::default() };
        assert!(matches!(pi_exact_linf_q1(&a, Exponent::ONE, 3, &cfg), Err(Error::CapExceeded { .. })));
        let b = MatrixOperator::<f64>::zeros(1, 2, Exponent::TWO, Exponent::TWO);
        assert!(pi_exact_linf_q1(&b, Exponent::ONE, 1, &cfg).is_err());
    }

    #[test]
    fn configuration_count() {
        // k = 1: one block, 2^{m-1} signs.
        assert_eq!(partition_configurations(5, 1), 16);
        // k >= m: Σ_b S(m,b) 2^{m-b} for m = 3 is 4 + 3·2 + 1 = 11.
        assert_eq!(partition_configurations(3, 5), 11);
    }
}
