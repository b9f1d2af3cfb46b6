//! Comparison chain between Rademacher and gaussian cotype constants on a
//! fixed set of embedded norms, and the vector budget of the cotype-`q` bound.

use anyhow::Result;
use pqsum::cotype::{comparison_chain_report, cotype_vector_budget};
use pqsum::random::{gaussian_vec, seeded_rng, sub_seed};
use pqsum::{EmbeddedNorm, Exponent, MatrixOperator};

use super::collect_rows;
use crate::config::ExperimentConfig;
use crate::output::fmt_num;

pub(super) const COLUMNS: &[&str] = &["name", "space", "n", "q", "k", "seed", "c0", "lhs", "rhs", "ratio", "hard", "holds"];

pub const MC_SAMPLES: usize = 20_000;

#[derive(Clone, Debug)]
pub struct CotypeSpace {
    pub label: String,
    pub seed: u64,
    pub norm: EmbeddedNorm<f64>,
}

/// The test set: `ℓ_2^n` for each `n`, `ℓ_∞^2`, `ℓ_1^3`, and for each seed a
/// random 3-dimensional subspace of `ℓ_1^5` and of `ℓ_∞^5`.
pub fn cotype_space(ns: &[usize], seeds: &[u64]) -> Result<Vec<CotypeSpace>> {
    let mut out: Vec<CotypeSpace> =
        ns.iter().map(|&n| CotypeSpace { label: format!("l2^{n}"), seed: 0, norm: EmbeddedNorm::lp(n, Exponent::TWO) }).collect();
    out.push(CotypeSpace { label: "linf^2".into(), seed: 0, norm: EmbeddedNorm::lp(2, Exponent::INF) });
    out.push(CotypeSpace { label: "l1^3".into(), seed: 0, norm: EmbeddedNorm::lp(3, Exponent::ONE) });
    for &seed in seeds {
        for (v, name) in [(Exponent::ONE, "l1"), (Exponent::INF, "linf")] {
            let mut rng = seeded_rng(sub_seed(seed, 0xE5));
            let a = MatrixOperator::new(5, 3, gaussian_vec(&mut rng, 15), Exponent::TWO, v)?;
            out.push(CotypeSpace { label: format!("random3_in_{name}^5"), seed, norm: EmbeddedNorm::new(a)? });
        }
    }
    Ok(out)
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<(Vec<u64>, Vec<Vec<String>>)> {
    let g = &cfg.grid;
    let seeds = cfg.seeds_or(&[0, 1])?;
    let ns = g.n_or(&[2, 3])?;
    let qs = g.q_or(&[Exponent::int(3)?, Exponent::int(4)?])?;
    for q in &qs {
        if *q <= Exponent::TWO {
            anyhow::bail!("cotype_suite needs q > 2, got q={q}");
        }
    }
    let ks = g.k_list()?;
    let spaces = cotype_space(&ns, &seeds)?;
    let mut points = Vec::new();
    for sp in &spaces {
        for &q in &qs {
            let budgets = ks.clone().unwrap_or_else(|| vec![sp.norm.dim()]);
            for k in budgets {
                points.push((sp, q, k));
            }
        }
    }
    let mut rows = collect_rows(&points, |(sp, q, k)| {
        let reps = comparison_chain_report(&sp.norm, *q, *k, MC_SAMPLES, &cfg.ascent.clone().with_seed(sp.seed))?;
        Ok(reps
            .iter()
            .map(|r| {
                vec![
                    r.name.clone(),
                    sp.label.clone(),
                    sp.norm.dim().to_string(),
                    q.to_string(),
                    k.to_string(),
                    sp.seed.to_string(),
                    String::new(),
                    fmt_num(r.lhs.value),
                    fmt_num(r.rhs.value),
                    fmt_num(r.ratio),
                    r.context.get("hard").cloned().unwrap_or_default(),
                    r.holds.to_string(),
                ]
            })
            .collect())
    })?;
    for &n in &ns {
        for &q in &qs {
            for c0 in [1.0, std::f64::consts::E, 10.0] {
                let budget = cotype_vector_budget(n, q, c0)?;
                rows.push(vec![
                    "cotype_vector_budget".into(),
                    String::new(),
                    n.to_string(),
                    q.to_string(),
                    String::new(),
                    String::new(),
                    fmt_num(c0),
                    budget.to_string(),
                    String::new(),
                    String::new(),
                    "false".into(),
                    "true".into(),
                ]);
            }
        }
    }
    Ok((seeds, rows))
}
