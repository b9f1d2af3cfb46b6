//! Ratio `π_pq^k(A)/π_pq(A)` for Bennett matrices `A: ℓ_{q'}^m → ℓ_2^n`,
//! `m = ⌈n^{s/2}⌉`, against the predicted growth `k^{1/p − 1/t}`.

use anyhow::{bail, Result};
use pqsum::exponent::Rational;
use pqsum::summing::{family_ratio, pi_estimate_from};
use pqsum::{bennett_sample, AscentConfig, Exponent, MatrixOperator, NormEstimate, SummingParams, VectorFamily};

use super::{collect_rows, log_log_slope};
use crate::config::ExperimentConfig;
use crate::output::fmt_num;

pub(super) const COLUMNS: &[&str] = &[
    "n",
    "m",
    "s",
    "q",
    "p",
    "t",
    "theta",
    "seed",
    "k",
    "K",
    "lower_bound",
    "basis_value",
    "basis_exact",
    "pi_k",
    "pi_K",
    "ratio",
    "predicted_slope",
    "fitted_slope",
    "method",
];

const K_CAP: usize = 256;
const M_CAP: usize = 1024;

#[derive(Clone, Debug)]
pub struct BennettPoint {
    pub n: usize,
    pub s: Exponent,
    pub q: Exponent,
    pub p: Exponent,
    pub seed: u64,
    /// Budgets for `π^k`; `None` means powers of two up to `m`, and `m`.
    pub k: Option<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct BennettGroup {
    pub m: usize,
    pub t: Exponent,
    pub theta: Rational,
    pub big_k: usize,
    pub lower_bound: f64,
    pub basis_value: f64,
    pub reference: f64,
    pub pi_big: NormEstimate<f64>,
    /// `(k, π_pq^k)` in increasing `k`.
    pub estimates: Vec<(usize, NormEstimate<f64>)>,
    pub predicted_slope: f64,
    pub fitted_slope: Option<f64>,
}

/// `θ` and `t` from `1/s = (1−θ)/q' + θ/2` and `1/t = 1/q − θ/2`, and `m`.
fn derived(pt: &BennettPoint) -> Result<(Rational, Exponent, usize, usize)> {
    let (q, s, p) = (pt.q, pt.s, pt.p);
    if q < Exponent::ONE || q >= Exponent::TWO {
        bail!("bennett_ratio needs 1 <= q < 2, got q={q}");
    }
    if s.is_infinite() || s <= Exponent::TWO {
        bail!("bennett_ratio needs 2 < s < inf, got s={s}");
    }
    let half = Rational::new(1, 2);
    let qc = q.conjugate().recip();
    let theta = (qc - s.recip()) / (qc - half);
    if theta <= Rational::from_integer(0) || theta >= Rational::from_integer(1) {
        bail!("theta = {theta} derived from q={q}, s={s} must lie in (0, 1)");
    }
    let t = Exponent::from_recip(q.recip() - theta * half)?;
    if p < q || p > t {
        bail!("need q <= p <= t, got q={q}, p={p}, t={t}");
    }
    let m = ((pt.n as f64).powf(s.to_f64() / 2.0) - 1e-9).ceil() as usize;
    if m > M_CAP {
        bail!("m = {m} exceeds the desk-scale cap {M_CAP}");
    }
    let big_k = (4 * pt.n * s.to_f64().ceil() as usize).min(K_CAP);
    if let Some(ks) = &pt.k {
        if let Some(k) = ks.iter().find(|k| **k > big_k) {
            bail!("k = {k} exceeds the reference budget K = {big_k}");
        }
    }
    Ok((theta, t, m, big_k))
}

fn default_ks(m: usize, big_k: usize) -> Vec<usize> {
    let top = m.min(big_k);
    let mut ks: Vec<usize> = std::iter::successors(Some(1usize), |k| Some(k * 2)).take_while(|k| *k < top).collect();
    ks.push(top);
    ks
}

pub fn bennett_group(pt: &BennettPoint, cfg: &AscentConfig) -> Result<BennettGroup> {
    let (theta, t, m, big_k) = derived(pt)?;
    let n = pt.n;
    let qc = pt.q.conjugate();
    let a: MatrixOperator<f64> = bennett_sample(m, n, qc, pt.seed);
    let cfg = cfg.clone().with_seed(pt.seed);
    let lower_bound = (m as f64).powf(pt.p.recip_value::<f64>()) * (n as f64).sqrt();
    let basis = VectorFamily::basis(m, qc);
    let basis_value = family_ratio(&basis, &a, pt.p, pt.q, &cfg)?;

    let ks = pt.k.clone().unwrap_or_else(|| default_ks(m, big_k));
    let mut estimates = Vec::new();
    let mut warm: Vec<VectorFamily<f64>> = Vec::new();
    for &k in &ks {
        let est = pi_estimate_from(&a, SummingParams::new(pt.p, pt.q, k)?, &cfg, &warm)?;
        warm = est.family().cloned().into_iter().collect();
        estimates.push((k, est));
    }
    let mut big_warm = warm;
    if m <= big_k {
        big_warm.push(basis);
    }
    big_warm.retain(|f| f.len() <= big_k);
    let pi_big = pi_estimate_from(&a, SummingParams::new(pt.p, pt.q, big_k)?, &cfg, &big_warm)?;
    let reference = estimates.iter().map(|(_, e)| e.value).fold(pi_big.value.max(lower_bound).max(basis_value), f64::max);
    let pts: Vec<(f64, f64)> = estimates.iter().map(|(k, e)| (*k as f64, e.value / reference)).collect();
    Ok(BennettGroup {
        m,
        t,
        theta,
        big_k,
        lower_bound,
        basis_value,
        reference,
        pi_big,
        fitted_slope: log_log_slope(&pts),
        predicted_slope: pt.p.recip_value::<f64>() - t.recip_value::<f64>(),
        estimates,
    })
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<(Vec<u64>, Vec<Vec<String>>)> {
    let g = &cfg.grid;
    let seeds = cfg.seeds_or(&(0..20).collect::<Vec<_>>())?;
    let one = Exponent::ONE;
    let four: Exponent = Exponent::int(4)?;
    let k = g.k_list()?;
    let mut points = Vec::new();
    for n in g.n_or(&[4, 9])? {
        for s in g.s_or(&[four])? {
            for q in g.q_or(&[one])? {
                for p in g.p_or(&[one])? {
                    for &seed in &seeds {
                        let pt = BennettPoint { n, s, q, p, seed, k: k.clone() };
                        derived(&pt)?;
                        points.push(pt);
                    }
                }
            }
        }
    }
    let rows = collect_rows(&points, |pt| {
        let grp = bennett_group(pt, &cfg.ascent)?;
        let rtol = 1e-9 * grp.lower_bound.max(1.0);
        Ok(grp
            .estimates
            .iter()
            .map(|(k, est)| {
                vec![
                    pt.n.to_string(),
                    grp.m.to_string(),
                    pt.s.to_string(),
                    pt.q.to_string(),
                    pt.p.to_string(),
                    grp.t.to_string(),
                    format!("{}", grp.theta),
                    pt.seed.to_string(),
                    k.to_string(),
                    grp.big_k.to_string(),
                    fmt_num(grp.lower_bound),
                    fmt_num(grp.basis_value),
                    ((grp.basis_value - grp.lower_bound).abs() <= rtol).to_string(),
                    fmt_num(est.value),
                    fmt_num(grp.pi_big.value),
                    fmt_num(est.value / grp.reference),
                    fmt_num(grp.predicted_slope),
                    grp.fitted_slope.map(fmt_num).unwrap_or_default(),
                    est.method.clone(),
                ]
            })
            .collect())
    })?;
    Ok((seeds, rows))
}
