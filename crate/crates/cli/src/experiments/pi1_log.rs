//! `π_1^k(T)/π_1(T)` for Bennett matrices `T: ℓ_∞^m → ℓ_2^n`,
//! `m = [n^{1 + ln k}]`, against `√((1 + ln k)/n)`.
//!
//! On `ℓ_∞^m`, `π_1(T) = Σ‖Te_i‖`: disjoint sign blocks are the extreme
//! families and splitting a block never lowers the sum. For `±1` columns
//! this is `m√n`.

use anyhow::{bail, Result};
use pqsum::summing::{family_ratio, pi_p1};
use pqsum::{bennett_sample, AscentConfig, Exponent, NormEstimate, VectorFamily};

use super::collect_rows;
use crate::config::ExperimentConfig;
use crate::output::fmt_num;

pub(super) const COLUMNS: &[&str] = &["n", "k", "m", "seed", "pi1_k", "method", "pi1", "ratio", "rate", "empirical_c0"];

const M_CAP: usize = 512;

pub fn log_example_m(n: usize, k: usize) -> usize {
    ((n as f64).powf(1.0 + (k as f64).ln()) + 1e-9).floor() as usize
}

/// `(π_1^k, π_1)` for one Bennett sample.
pub fn pi1_log_point(n: usize, k: usize, seed: u64, cfg: &AscentConfig) -> Result<(NormEstimate<f64>, f64, usize)> {
    let m = log_example_m(n, k);
    let t = bennett_sample::<f64>(m, n, Exponent::INF, seed);
    let cfg = cfg.clone().with_seed(seed);
    let pik = pi_p1(&t, Exponent::ONE, k, &cfg)?;
    let pi1 = family_ratio(&VectorFamily::basis(m, Exponent::INF), &t, Exponent::ONE, Exponent::ONE, &cfg)?;
    Ok((pik, pi1, m))
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<(Vec<u64>, Vec<Vec<String>>)> {
    let g = &cfg.grid;
    let seeds = cfg.seeds_or(&(0..5).collect::<Vec<_>>())?;
    let ks = g.k_list()?.unwrap_or_else(|| vec![1, 2, 3, 4]);
    let mut points = Vec::new();
    for n in g.n_or(&[2, 3, 4])? {
        for &k in &ks {
            let m = log_example_m(n, k);
            if m > M_CAP {
                bail!("m = [n^(1 + ln k)] = {m} exceeds the desk-scale cap {M_CAP} (n={n}, k={k})");
            }
            for &seed in &seeds {
                points.push((n, k, seed));
            }
        }
    }
    let rows = collect_rows(&points, |&(n, k, seed)| {
        let (pik, pi1, m) = pi1_log_point(n, k, seed, &cfg.ascent)?;
        let ratio = if pi1 > 0.0 { pik.value / pi1 } else { 1.0 };
        let rate = ((1.0 + (k as f64).ln()) / n as f64).sqrt();
        Ok(vec![vec![
            n.to_string(),
            k.to_string(),
            m.to_string(),
            seed.to_string(),
            fmt_num(pik.value),
            pik.method.clone(),
            fmt_num(pi1),
            fmt_num(ratio),
            fmt_num(rate),
            fmt_num(ratio / rate),
        ]])
    })?;
    Ok((seeds, rows))
}
