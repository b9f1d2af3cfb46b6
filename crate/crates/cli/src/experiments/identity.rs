//! `π_pq^k(id: ℓ_2^n → ℓ_2^n)` against `k^{1/p}`, and the basis family's `π_qq^n` value.

use anyhow::{bail, Result};
use pqsum::summing::family_ratio;
use pqsum::{pi_estimate, AscentConfig, Exponent, MatrixOperator, NormEstimate, SummingParams, VectorFamily};

use super::collect_rows;
use crate::config::ExperimentConfig;
use crate::output::fmt_num;

pub(super) const COLUMNS: &[&str] = &["n", "p", "q", "k", "seed", "pi_k", "bound", "ratio", "holds", "basis_pqq", "basis_target", "method"];

/// Relative slack on `π_pq^k ≤ k^{1/p}`.
pub const IDENTITY_TOL: f64 = 0.01;

#[derive(Clone, Debug)]
pub struct IdentityPoint {
    pub n: usize,
    pub p: Exponent,
    pub q: Exponent,
    pub k: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct IdentityOutcome {
    pub estimate: NormEstimate<f64>,
    pub bound: f64,
    pub holds: bool,
    /// `n^{1/q} / w_q(e_1, …, e_n)`.
    pub basis_pqq: f64,
    pub basis_target: f64,
}

pub fn identity_point(pt: &IdentityPoint, cfg: &AscentConfig) -> Result<IdentityOutcome> {
    let id = MatrixOperator::<f64>::identity(pt.n, Exponent::TWO);
    let cfg = cfg.clone().with_seed(pt.seed);
    let estimate = pi_estimate(&id, SummingParams::new(pt.p, pt.q, pt.k)?, &cfg)?;
    let bound = (pt.k as f64).powf(pt.p.recip_value::<f64>());
    let basis = VectorFamily::basis(pt.n, Exponent::TWO);
    let basis_pqq = family_ratio(&basis, &id, pt.q, pt.q, &cfg)?;
    Ok(IdentityOutcome {
        holds: estimate.value <= bound * (1.0 + IDENTITY_TOL),
        estimate,
        bound,
        basis_pqq,
        basis_target: (pt.n as f64).powf(pt.q.recip_value::<f64>()),
    })
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<(Vec<u64>, Vec<Vec<String>>)> {
    let g = &cfg.grid;
    let seeds = cfg.seeds_or(&[0])?;
    let four = Exponent::int(4)?;
    let ks = g.k_list()?;
    let mut points = Vec::new();
    for n in g.n_or(&[2, 4, 8])? {
        for p in g.p_or(&[four])? {
            for q in g.q_or(&[four])? {
                if q > p {
                    bail!("identity_l2_growth needs q <= p, got q={q}, p={p}");
                }
                let budgets = match &ks {
                    Some(v) => v.clone(),
                    None if q.is_infinite() => bail!("k must be given when q = inf"),
                    None => vec![((n as f64).powf(q.to_f64() / 2.0) - 1e-9).ceil() as usize],
                };
                for k in budgets {
                    for &seed in &seeds {
                        points.push(IdentityPoint { n, p, q, k, seed });
                    }
                }
            }
        }
    }
    let rows = collect_rows(&points, |pt| {
        let o = identity_point(pt, &cfg.ascent)?;
        Ok(vec![vec![
            pt.n.to_string(),
            pt.p.to_string(),
            pt.q.to_string(),
            pt.k.to_string(),
            pt.seed.to_string(),
            fmt_num(o.estimate.value),
            fmt_num(o.bound),
            fmt_num(o.estimate.value / o.bound),
            o.holds.to_string(),
            fmt_num(o.basis_pqq),
            fmt_num(o.basis_target),
            o.estimate.method.clone(),
        ]])
    })?;
    Ok((seeds, rows))
}
