//! `π_{p̄q̄}^k(T) ≤ π_{pq}^k(T)` when `q ≤ q̄`, `p ≤ p̄` and
//! `1/q − 1/p = 1/q̄ − 1/p̄`.

use serde::{Deserialize, Serialize};

use super::{family_ratio, pi_estimate, pi_estimate_from, SummingParams};
use crate::ascent::AscentConfig;
use crate::error::{Error, Result};
use crate::estimate::NormEstimate;
use crate::exponent::{holder_split, Exponent};
use crate::family::VectorFamily;
use crate::norms::{argmax_abs, p_norm};
use crate::operators::MatrixOperator;
use crate::scalar::Scalar;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct KwapienReport<T> {
    /// Estimate of `π_{p̄q̄}^k(T)`.
    pub lhs: NormEstimate<T>,
    /// Estimate of `π_{pq}^k(T)`, warm-started from the lifted `lhs` witness.
    pub rhs: NormEstimate<T>,
    /// `(p̄,q̄)` ratio of the `lhs` witness.
    pub witness_lhs: T,
    /// `(p,q)` ratio of the lifted witness.
    pub witness_rhs: T,
    pub witness_holds: bool,
    pub holds: bool,
}

/// Rescales `x_j` by `λ_j = ‖Tx_j‖^{p̄/p − 1}` (the Hölder-equality weights),
/// which turns a `(p̄,q̄)` family into a `(p,q)` family with at least the same ratio.
pub fn kwapien_lift<T: Scalar>(family: &VectorFamily<T>, op: &MatrixOperator<T>, p: Exponent, pbar: Exponent) -> Result<VectorFamily<T>> {
    let norms: Vec<T> = family.images(op)?.iter().map(|y| p_norm(y, op.codomain())).collect();
    let lambda: Vec<T> = if pbar.is_infinite() {
        let mut l = vec![T::zero(); norms.len()];
        l[argmax_abs(&norms).unwrap_or(0)] = T::one();
        l
    } else {
        let expo = pbar.value::<T>() / p.value::<T>() - T::one();
        norms.iter().map(|a| if expo == T::zero() { T::one() } else { a.powf(expo) }).collect()
    };
    let vectors = family.vectors().iter().zip(&lambda).map(|(x, l)| x.iter().map(|a| *a * *l).collect()).collect();
    VectorFamily::new(vectors, family.ambient())
}

fn check_relation(p: Exponent, q: Exponent, pbar: Exponent, qbar: Exponent) -> Result<()> {
    if q > qbar || p > pbar {
        return Err(Error::ExponentRelation(format!("need q <= qbar and p <= pbar, got q={q}, qbar={qbar}, p={p}, pbar={pbar}")));
    }
    if holder_split(q, p)? != holder_split(qbar, pbar)? {
        return Err(Error::ExponentRelation(format!("1/q - 1/p must equal 1/qbar - 1/pbar (q={q}, p={p}, qbar={qbar}, pbar={pbar})")));
    }
    Ok(())
}

pub fn kwapien_check<T: Scalar>(
    op: &MatrixOperator<T>,
    p: Exponent,
    q: Exponent,
    pbar: Exponent,
    qbar: Exponent,
    k: usize,
    cfg: &AscentConfig,
) -> Result<KwapienReport<T>> {
    check_relation(p, q, pbar, qbar)?;
    let tol = T::of(cfg.tol.max(1e-9)) + T::eps_num();
    let lhs = pi_estimate(op, SummingParams::new(pbar, qbar, k)?, cfg)?;
    let (witness_lhs, witness_rhs, warm) = match lhs.family().filter(|f| !f.is_empty()) {
        Some(f) => {
            let lifted = kwapien_lift(f, op, p, pbar)?;
            let wl = family_ratio(f, op, pbar, qbar, cfg)?;
            let wr = family_ratio(&lifted, op, p, q, cfg)?;
            (wl, wr, vec![lifted])
        }
        None => (T::zero(), T::zero(), Vec::new()),
    };
    let rhs = pi_estimate_from(op, SummingParams::new(p, q, k)?, cfg, &warm)?;
    Ok(KwapienReport {
        witness_holds: witness_lhs <= witness_rhs * (T::one() + tol),
        holds: lhs.value <= rhs.value * (T::one() + tol),
        lhs,
        rhs,
        witness_lhs,
        witness_rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    #[test]
    fn kwapien_examples() {
        let cfg = AscentConfig::default().with_starts(8);
        let id = MatrixOperator::<f64>::identity(2, Exponent::TWO);
        let r = kwapien_check(&id, e("2"), e("1"), Exponent::INF, e("2"), 2, &cfg).unwrap();
        assert!(r.holds && r.witness_holds, "{r:?}");
        let z = MatrixOperator::<f64>::zeros(2, 2, Exponent::TWO, Exponent::TWO);
        assert!(kwapien_check(&z, e("2"), e("1"), Exponent::INF, e("2"), 2, &cfg).unwrap().holds);
        let a = MatrixOperator::<f64>::from_rows(&[vec![1.0, 2.0], vec![0.5, -1.0]], Exponent::INF, e("3")).unwrap();
        let r = kwapien_check(&a, e("3"), e("3/2"), e("3"), e("3/2"), 2, &cfg).unwrap();
        assert!(r.holds);
        assert!((r.lhs.value - r.rhs.value).abs() <= 1e-9 * r.lhs.value.max(1.0));
    }

    #[test]
    fn relation_is_enforced() {
        let id = MatrixOperator::<f64>::identity(2, Exponent::TWO);
        let cfg = AscentConfig::default();
        assert!(kwapien_check(&id, e("2"), e("1"), e("4"), e("2"), 2, &cfg).is_err());
        assert!(kwapien_check(&id, e("4"), e("2"), e("2"), e("1"), 2, &cfg).is_err());
    }

    #[test]
    fn lift_never_lowers_the_ratio() {
        let a = MatrixOperator::<f64>::from_rows(&[vec![1.0, 0.2, -0.4], vec![0.3, -1.0, 0.8]], Exponent::INF, Exponent::TWO).unwrap();
        let f = VectorFamily::<f64>::new(vec![vec![1.0, -0.5, 0.2], vec![0.1, 1.0, -1.0], vec![0.3, 0.3, 0.9]], Exponent::INF).unwrap();
        let cfg = AscentConfig::default();
        let lifted = kwapien_lift(&f, &a, e("2"), e("4")).unwrap();
        let before = family_ratio(&f, &a, e("4"), e("4/3"), &cfg).unwrap();
        let after = family_ratio(&lifted, &a, e("2"), e("1"), &cfg).unwrap();
        assert!(after >= before * (1.0 - 1e-12), "{after} < {before}");
    }
}
