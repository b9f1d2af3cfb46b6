use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{rational_text, InequalityReport};
use crate::ascent::AscentConfig;
use crate::error::{Error, Result};
use crate::estimate::NormEstimate;
use crate::exponent::{Exponent, Rational};
use crate::family::VectorFamily;
use crate::operators::{inclusion, MatrixOperator};
use crate::scalar::Scalar;
use crate::summing::{pi_estimate_from, pi_p1, SummingParams};

const CHAIN_TOL: f64 = 1e-6;

/// The rank-dependent factor of the `π_1` versus `π_{r1}` comparison:
/// `(1/r − 1/2)^{−1/2} n^{1/2}` for `r < 2`, `(n(1 + ln n))^{1/2}` for `r = 2`
/// and `(1/2 − 1/r)^{−1/r'} n^{1/r'}` for `r > 2` (including `r = ∞`).
pub fn lemma_rate(n: usize, r: Exponent) -> f64 {
    let n = n as f64;
    let ri = r.recip_value::<f64>();
    if r < Exponent::TWO {
        (ri - 0.5).powf(-0.5) * n.sqrt()
    } else if r.is_two() {
        (n * (1.0 + n.ln())).sqrt()
    } else {
        let rc = 1.0 - ri;
        (0.5 - ri).powf(-rc) * n.powf(rc)
    }
}

/// Empirical constant `π_1(T) / (π_{r1}(T)·rate(n, r))` for `T` on `ℓ_∞^m`.
/// Both norms use `m` vectors, which is exact on `ℓ_∞^m`. `None` for `T = 0`.
/// `holds` records `π_{r1} ≤ π_1` and a finite constant.
pub fn limit_chain_check<T: Scalar>(op: &MatrixOperator<T>, r: Exponent, cfg: &AscentConfig) -> Result<Option<InequalityReport<T>>> {
    if !op.domain().is_infinite() {
        return Err(Error::InvalidParameter(format!("limit chain needs domain exponent inf, got {}", op.domain())));
    }
    if op.is_zero() || op.cols() == 0 {
        return Ok(None);
    }
    let n = op.rank();
    let m = op.cols();
    let pi1 = pi_p1(op, Exponent::ONE, m, cfg)?;
    let pir1 = pi_p1(op, r, m, cfg)?;
    let rate = lemma_rate(n, r);
    let rhs = pir1.scaled(T::of(rate), "pi_r1-times-rate");
    let mut report = InequalityReport::new("limit_chain", pi1.clone(), rhs, false, BTreeMap::new());
    let tol = T::of(CHAIN_TOL);
    report.holds = report.ratio.is_finite() && pir1.value <= pi1.value * (T::one() + tol);
    report.context.insert("rank".into(), n.to_string());
    report.context.insert("r".into(), r.to_string());
    report.context.insert("rate".into(), super::format_sig(rate));
    report.context.insert("pi_1_over_pi_r1".into(), super::format_sig(super::safe_ratio(pi1.value, pir1.value).to_f64_lossy()));
    Ok(Some(report))
}

/// `π_{p1}^{⌊cα⌋}(T) ≤ (4c)^{1/p}·π_{p1}^{α}(T)`.
pub fn vector_scaling_check<T: Scalar>(
    op: &MatrixOperator<T>,
    p: Exponent,
    alpha: usize,
    c: f64,
    cfg: &AscentConfig,
) -> Result<InequalityReport<T>> {
    if alpha == 0 || !(c >= 1.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("need alpha >= 1 and c >= 1, got alpha={alpha}, c={c}")));
    }
    let k_hi = ((c * alpha as f64) + 1e-9).floor() as usize;
    let lhs = pi_p1(op, p, k_hi, cfg)?;
    let small = pi_p1(op, p, alpha, cfg)?;
    let factor = (4.0 * c).powf(p.recip_value::<f64>());
    let rhs = small.scaled(T::of(factor), "scaled-budget");
    let holds = lhs.value <= rhs.value * (T::one() + T::of(CHAIN_TOL)) + T::eps_num();
    let mut ctx = BTreeMap::new();
    ctx.insert("p".into(), p.to_string());
    ctx.insert("alpha".into(), alpha.to_string());
    ctx.insert("c".into(), super::format_sig(c));
    ctx.insert("k_large".into(), k_hi.to_string());
    Ok(InequalityReport::new("vector_scaling", lhs, rhs, holds, ctx))
}

/// Exponents `(r, p)` with `1/r = (1−θ)/q + θ/2` and `1/p = 1/q − θ/2`.
pub fn interpolation_exponents(q: Exponent, theta: Rational) -> Result<(Exponent, Exponent)> {
    let half = Rational::new(1, 2);
    let r = Exponent::from_recip((Rational::one() - theta) * q.recip() + theta * half)?;
    let p = Exponent::from_recip(q.recip() - theta * half)?;
    Ok((r, p))
}

/// Largest estimate of `π_pq^k(ι: ℓ_{q'}^n → ℓ_r^n)` for `k ≤ k_budget`
/// against `n^{1/p}`.
pub fn interpolation_bound_check<T: Scalar>(
    n: usize,
    q: Exponent,
    theta: Rational,
    k_budget: usize,
    cfg: &AscentConfig,
) -> Result<InequalityReport<T>> {
    if q < Exponent::ONE || q > Exponent::TWO {
        return Err(Error::ExponentRelation(format!("need 1 <= q <= 2, got {q}")));
    }
    if theta <= Rational::zero() || theta > Rational::one() {
        return Err(Error::InvalidParameter(format!("theta must lie in (0, 1], got {}", rational_text(theta))));
    }
    if n == 0 || k_budget == 0 {
        return Err(Error::InvalidParameter("n and the vector budget must be positive".into()));
    }
    let (r, p) = interpolation_exponents(q, theta)?;
    let iota = inclusion::<T>(n, q.conjugate(), r);
    let mut best: Option<NormEstimate<T>> = None;
    let mut warm: Vec<VectorFamily<T>> = Vec::new();
    for k in 1..=k_budget {
        let est = pi_estimate_from(&iota, SummingParams::new(p, q, k)?, cfg, &warm)?;
        warm = est.family().cloned().into_iter().collect();
        if best.as_ref().is_none_or(|b| est.value > b.value) {
            best = Some(est);
        }
    }
    let lhs = best.expect("k_budget >= 1");
    let bound = T::of((n as f64).powf(p.recip_value::<f64>()));
    let rhs = NormEstimate::exact(bound, "n^(1/p)", None);
    let holds = lhs.value <= bound * (T::one() + T::of(CHAIN_TOL));
    let mut ctx = BTreeMap::new();
    ctx.insert("n".into(), n.to_string());
    ctx.insert("q".into(), q.to_string());
    ctx.insert("theta".into(), rational_text(theta));
    ctx.insert("r".into(), r.to_string());
    ctx.insert("p".into(), p.to_string());
    ctx.insert("k_budget".into(), k_budget.to_string());
    Ok(InequalityReport::new("interpolation_bound", lhs, rhs, holds, ctx))
}
