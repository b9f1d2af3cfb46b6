//! Both directions of the quotient formula on the designed instances: the
//! scalar, `Id_{ℓ_2^2}`, and random `ℓ_∞^3 → ℓ_2^3` operators with `(p,q) = (2,1)`.

use anyhow::Result;
use pqsum::random::{gaussian_vec, seeded_rng, sub_seed};
use pqsum::reductions::{quotient_verify, QuotientOptions};
use pqsum::{AscentConfig, Exponent, MatrixOperator, QuotientInstance};

use super::collect_rows;
use crate::config::ExperimentConfig;
use crate::output::fmt_num;

pub(super) const COLUMNS: &[&str] = &[
    "instance",
    "seed",
    "p",
    "q",
    "r",
    "s",
    "k",
    "lhs",
    "rhs",
    "rel_gap",
    "certificate_value",
    "candidates",
    "violations",
    "sound",
    "transfer_ok",
    "equal",
];

pub const CANDIDATES: usize = 32;

#[derive(Clone, Debug)]
pub struct QuotientOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub certificate_value: f64,
    pub candidates: usize,
    pub violations: usize,
    pub transfer_ok: bool,
    pub equal: bool,
}

impl QuotientOutcome {
    pub fn rel_gap(&self) -> f64 {
        let d = self.lhs.max(self.rhs);
        if d > 0.0 {
            (self.lhs - self.rhs).abs() / d
        } else {
            0.0
        }
    }
}

/// `(name, seed, instance)` for the designed suite; one random operator per seed.
pub fn quotient_instances(seeds: &[u64]) -> Result<Vec<(String, u64, QuotientInstance<f64>)>> {
    let two = Exponent::TWO;
    let mut out = vec![
        ("scalar".to_string(), 0, QuotientInstance::new(MatrixOperator::identity(1, two), two, two, None, 1)?),
        ("identity_l2_2".to_string(), 0, QuotientInstance::new(MatrixOperator::identity(2, two), two, two, Some(two), 2)?),
    ];
    for &seed in seeds {
        let mut rng = seeded_rng(sub_seed(seed, 0x0307));
        let op = MatrixOperator::new(3, 3, gaussian_vec(&mut rng, 9), Exponent::INF, two)?;
        out.push(("random_linf3_l2_3".to_string(), seed, QuotientInstance::new(op, two, Exponent::ONE, None, 3)?));
    }
    Ok(out)
}

pub fn quotient_point(inst: &QuotientInstance<f64>, seed: u64, candidates: usize, cfg: &AscentConfig) -> Result<QuotientOutcome> {
    let opts = QuotientOptions { candidates, seed, ..QuotientOptions::default() };
    let ver = quotient_verify(inst, &opts, &cfg.clone().with_seed(seed))?;
    let ev = &ver.evaluation;
    Ok(QuotientOutcome {
        lhs: ev.lhs.value,
        rhs: ev.rhs.value,
        certificate_value: ev.certificate_value,
        candidates: ev.candidates.len(),
        violations: ver.violations,
        transfer_ok: ev.candidates.iter().all(|c| c.transfer_bound.is_none() || c.transfer_holds),
        equal: ver.report.holds,
    })
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<(Vec<u64>, Vec<Vec<String>>)> {
    let seeds = cfg.seeds_or(&(0..5).collect::<Vec<_>>())?;
    let instances = quotient_instances(&seeds)?;
    let rows = collect_rows(&instances, |(name, seed, inst)| {
        let o = quotient_point(inst, *seed, CANDIDATES, &cfg.ascent)?;
        Ok(vec![vec![
            name.clone(),
            seed.to_string(),
            inst.p.to_string(),
            inst.q.to_string(),
            inst.r.to_string(),
            inst.s.to_string(),
            inst.k.to_string(),
            fmt_num(o.lhs),
            fmt_num(o.rhs),
            fmt_num(o.rel_gap()),
            fmt_num(o.certificate_value),
            o.candidates.to_string(),
            o.violations.to_string(),
            (o.violations == 0).to_string(),
            o.transfer_ok.to_string(),
            o.equal.to_string(),
        ]])
    })?;
    Ok((seeds, rows))
}
