//! `π_2^{4n}(T) ≤ √2·π_2^n(T)` for random rank-`n` operators, plus the
//! empirical constant of `π_{41}(T) ≤ c_4·π_{41}^n(T)` on `ℓ_∞` domains.

use anyhow::{bail, Result};
use pqsum::random::{gaussian_vec, seeded_rng, sub_seed};
use pqsum::summing::{pi_estimate_from, pi_p1};
use pqsum::{pi_estimate, AscentConfig, Exponent, MatrixOperator, NormEstimate, SummingParams};

use super::collect_rows;
use crate::config::ExperimentConfig;
use crate::output::fmt_num;

pub(super) const COLUMNS: &[&str] = &[
    "relation",
    "n",
    "m",
    "u",
    "v",
    "p",
    "q",
    "seed",
    "k_small",
    "k_large",
    "pi_small",
    "pi_large",
    "ratio",
    "bound_factor",
    "hard",
    "holds",
];

pub const TOMCZAK_TOL: f64 = 0.01;

#[derive(Clone, Debug)]
pub struct TomczakPoint {
    pub n: usize,
    pub m: usize,
    pub u: Exponent,
    pub v: Exponent,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct TomczakOutcome {
    pub relation: &'static str,
    pub p: Exponent,
    pub q: Exponent,
    pub k_small: usize,
    pub k_large: usize,
    pub small: NormEstimate<f64>,
    pub large: NormEstimate<f64>,
    pub bound_factor: Option<f64>,
    pub holds: bool,
}

impl TomczakOutcome {
    pub fn ratio(&self) -> f64 {
        if self.small.value > 0.0 {
            self.large.value / self.small.value
        } else {
            1.0
        }
    }
}

/// Gaussian `n × m` matrix, rank `n` almost surely.
pub fn random_operator(pt: &TomczakPoint) -> Result<MatrixOperator<f64>> {
    let mut rng = seeded_rng(sub_seed(pt.seed, pt.n as u64 * 1000 + pt.m as u64));
    Ok(MatrixOperator::new(pt.n, pt.m, gaussian_vec(&mut rng, pt.n * pt.m), pt.u, pt.v)?)
}

pub fn tomczak_point(pt: &TomczakPoint, cfg: &AscentConfig) -> Result<Vec<TomczakOutcome>> {
    let op = random_operator(pt)?;
    let cfg = cfg.clone().with_seed(pt.seed);
    let two = Exponent::TWO;
    let (ks, kl) = (pt.n, 4 * pt.n);
    let small = pi_estimate(&op, SummingParams::new(two, two, ks)?, &cfg)?;
    let warm: Vec<_> = small.family().cloned().into_iter().collect();
    let large = pi_estimate_from(&op, SummingParams::new(two, two, kl)?, &cfg, &warm)?;
    let factor = 2f64.sqrt();
    let mut out = vec![TomczakOutcome {
        relation: "tomczak",
        p: two,
        q: two,
        k_small: ks,
        k_large: kl,
        holds: large.value <= factor * (1.0 + TOMCZAK_TOL) * small.value,
        small,
        large,
        bound_factor: Some(factor),
    }];
    if pt.u.is_infinite() {
        let four = Exponent::int(4)?;
        let exact = cfg.clone().with_exact_oracle(true);
        let small = pi_p1(&op, four, ks, &exact)?;
        let large = pi_p1(&op, four, kl, &exact)?;
        out.push(TomczakOutcome {
            relation: "konig_tzafriri",
            p: four,
            q: Exponent::ONE,
            k_small: ks,
            k_large: kl,
            holds: large.value.is_finite() && small.value.is_finite(),
            small,
            large,
            bound_factor: None,
        });
    }
    Ok(out)
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<(Vec<u64>, Vec<Vec<String>>)> {
    let g = &cfg.grid;
    let seeds = cfg.seeds_or(&(0..9).collect::<Vec<_>>())?;
    let mut points = Vec::new();
    for n in g.n_or(&[1, 2, 3])? {
        for m in g.m_or(&[4])? {
            if m < n {
                bail!("rank-{n} operators need m >= n, got m={m}");
            }
            for u in g.u_or(&[Exponent::INF, Exponent::TWO])? {
                for v in g.v_or(&[Exponent::TWO])? {
                    for &seed in &seeds {
                        points.push(TomczakPoint { n, m, u, v, seed });
                    }
                }
            }
        }
    }
    let rows = collect_rows(&points, |pt| {
        Ok(tomczak_point(pt, &cfg.ascent)?
            .into_iter()
            .map(|o| {
                vec![
                    o.relation.to_string(),
                    pt.n.to_string(),
                    pt.m.to_string(),
                    pt.u.to_string(),
                    pt.v.to_string(),
                    o.p.to_string(),
                    o.q.to_string(),
                    pt.seed.to_string(),
                    o.k_small.to_string(),
                    o.k_large.to_string(),
                    fmt_num(o.small.value),
                    fmt_num(o.large.value),
                    fmt_num(o.ratio()),
                    o.bound_factor.map(fmt_num).unwrap_or_default(),
                    o.bound_factor.is_some().to_string(),
                    o.holds.to_string(),
                ]
            })
            .collect())
    })?;
    Ok((seeds, rows))
}
