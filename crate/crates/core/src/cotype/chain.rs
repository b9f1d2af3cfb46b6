use std::collections::BTreeMap;

use super::{cotype_estimate, CotypeParams, EmbeddedNorm, VariableKind};
use crate::ascent::AscentConfig;
use crate::error::{Error, Result};
use crate::estimate::NormEstimate;
use crate::exponent::Exponent;
use crate::family::VectorFamily;
use crate::reductions::{format_sig, InequalityReport};
use crate::scalar::Scalar;
use crate::summing::truncate_by_norms;

/// Relative slack on `C̃_q(Id_E) ≤ n^{1/q}`; covers the Monte-Carlo error.
const MC_TOL: f64 = 0.02;

/// Sorts `F` by `‖x_j‖_E` nonincreasing and keeps the prefix of norms `> delta`.
pub fn cotype_truncate<T: Scalar>(
    family: &VectorFamily<T>,
    e: &EmbeddedNorm<T>,
    q: Exponent,
    delta: T,
) -> Result<(VectorFamily<T>, usize)> {
    if q <= Exponent::TWO {
        return Err(Error::ExponentRelation(format!("truncation needs q > 2, got {q}")));
    }
    if !(delta > T::zero()) {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    e.check(family)?;
    let norms: Vec<T> = family.vectors().iter().map(|x| e.norm(x)).collect();
    let (order, n) = truncate_by_norms(&norms, delta);
    let kept = if n == 0 { VectorFamily::empty(family.dim(), family.ambient()) } else { family.select(&order[..n]) };
    Ok((kept, n))
}

/// `⌈n (c0 (1 + ln n))^{1/(1−2/q)}⌉`, snapping values within `1e-9` of an integer.
pub fn cotype_vector_budget(n: usize, q: Exponent, c0: f64) -> Result<u64> {
    if q <= Exponent::TWO {
        return Err(Error::ExponentRelation(format!("vector budget needs q > 2, got {q}")));
    }
    if n == 0 || !(c0 > 0.0) || !c0.is_finite() {
        return Err(Error::InvalidParameter(format!("need n >= 1 and c0 > 0, got n={n}, c0={c0}")));
    }
    let nf = n as f64;
    let expo = 1.0 / (1.0 - 2.0 * q.recip_value::<f64>());
    let x = nf * (c0 * (1.0 + nf.ln())).powf(expo);
    let r = x.round();
    let m = if (x - r).abs() <= 1e-9 * r.max(1.0) { r } else { x.ceil() };
    Ok(m.max(1.0) as u64)
}

/// Estimates `C_2`, `C̃_2` and `C̃_q` of `Id_E` with `k` vectors and reports
/// the three links of the comparison chain. Only `C̃_q ≤ n^{1/q}` is a hard
/// check; the other links report their empirical constants.
pub fn comparison_chain_report<T: Scalar>(
    e: &EmbeddedNorm<T>,
    q: Exponent,
    k: usize,
    mc_samples: usize,
    cfg: &AscentConfig,
) -> Result<Vec<InequalityReport<T>>> {
    if q <= Exponent::TWO {
        return Err(Error::ExponentRelation(format!("comparison chain needs q > 2, got {q}")));
    }
    let n = e.dim();
    let nf = n as f64;
    let c2 = cotype_estimate(e, CotypeParams::new(Exponent::TWO, k, VariableKind::Rademacher)?, cfg)?;
    let g2 = cotype_estimate(e, CotypeParams::new(Exponent::TWO, k, VariableKind::Gaussian)?.with_samples(mc_samples), cfg)?;
    let gq = cotype_estimate(e, CotypeParams::new(q, k, VariableKind::Gaussian)?.with_samples(mc_samples), cfg)?;

    let ctx = |hard: bool| {
        let mut c = BTreeMap::new();
        c.insert("n".to_string(), n.to_string());
        c.insert("q".to_string(), q.to_string());
        c.insert("k".to_string(), k.to_string());
        c.insert("embed_rows".to_string(), e.embed().rows().to_string());
        c.insert("v".to_string(), e.exponent().to_string());
        c.insert("hard".to_string(), hard.to_string());
        c
    };

    let g2v = g2.value;
    let log_factor = (T::one() + g2v.max(T::one()).ln()).sqrt();
    let rhs1 = g2.scaled(log_factor, "gaussian-c2-log-factor");
    let mut link1 = InequalityReport::new("cotype_log_comparison", c2, rhs1, false, ctx(false));
    link1.holds = link1.ratio.is_finite();
    link1.context.insert("empirical_c0".into(), format_sig(link1.ratio.to_f64_lossy()));

    let factor = T::of(2f64.sqrt() * nf.powf(0.5 - q.recip_value::<f64>()));
    let rhs2 = gq.scaled(factor, "sqrt2-n-power-gaussian-cq");
    let mut link2 = InequalityReport::new("cotype_gaussian_2_to_q", g2, rhs2, false, ctx(false));
    link2.holds = link2.ratio <= T::one() + T::of(MC_TOL);

    let bound = NormEstimate::exact(T::of(nf.powf(q.recip_value::<f64>())), "n^(1/q)", None);
    let mut link3 = InequalityReport::new("cotype_gaussian_q_bound", gq, bound, false, ctx(true));
    link3.holds = link3.ratio <= T::one() + T::of(MC_TOL);
    Ok(vec![link1, link2, link3])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    #[test]
    fn budget_examples() {
        assert_eq!(cotype_vector_budget(1, e("4"), 1.0).unwrap(), 1);
        assert_eq!(cotype_vector_budget(8, e("4"), std::f64::consts::E).unwrap(), 561);
        let limit = (8.0 * 2.0 * (1.0 + 8f64.ln())).ceil() as u64;
        assert_eq!(cotype_vector_budget(8, Exponent::INF, 2.0).unwrap(), limit);
        assert!(cotype_vector_budget(8, e("2"), 1.0).is_err());
        assert!(cotype_vector_budget(8, e("3/2"), 1.0).is_err());
    }

    #[test]
    fn truncation_examples() {
        let l2 = EmbeddedNorm::<f64>::lp(1, Exponent::TWO);
        let fam = VectorFamily::new(vec![vec![1.0], vec![2.0], vec![-1.0]], Exponent::TWO).unwrap();
        let (kept, n) = cotype_truncate(&fam, &l2, e("3"), 1.0).unwrap();
        assert_eq!(n, 1);
        assert_eq!(kept.vectors(), &[vec![2.0]]);
        let (kept, n) = cotype_truncate(&fam, &l2, e("3"), 5.0).unwrap();
        assert_eq!((n, kept.len()), (0, 0));
        assert!(cotype_truncate(&fam, &l2, e("2"), 1.0).is_err());
    }

    #[test]
    fn chain_on_small_spaces() {
        let cfg = AscentConfig::default().with_starts(4);
        let reps = comparison_chain_report(&EmbeddedNorm::<f64>::lp(2, Exponent::INF), e("4"), 2, 4000, &cfg).unwrap();
        assert_eq!(reps.len(), 3);
        assert!(reps[2].holds, "{} > {}", reps[2].lhs.value, reps[2].rhs.value);
        let reps = comparison_chain_report(&EmbeddedNorm::<f64>::lp(3, Exponent::TWO), e("3"), 3, 4000, &cfg).unwrap();
        assert!((reps[0].lhs.value - 1.0).abs() < 1e-6);
        assert!(reps.iter().all(|r| r.holds));
    }
}
