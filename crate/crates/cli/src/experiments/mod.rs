//! The growth-rate and inequality experiments. Every experiment validates its
//! whole grid before computing, evaluates grid points in parallel and returns
//! rows in grid order.

mod bennett;
mod cotype;
mod identity;
mod pi1_log;
mod quotient;
mod tomczak;

pub use bennett::{bennett_group, BennettGroup, BennettPoint};
pub use cotype::{cotype_space, CotypeSpace, MC_SAMPLES as COTYPE_MC_SAMPLES};
pub use identity::{identity_point, IdentityOutcome, IdentityPoint, IDENTITY_TOL};
pub use pi1_log::{log_example_m, pi1_log_point};
pub use quotient::{quotient_instances, quotient_point, QuotientOutcome, CANDIDATES as QUOTIENT_CANDIDATES};
pub use tomczak::{random_operator, tomczak_point, TomczakOutcome, TomczakPoint, TOMCZAK_TOL};

use anyhow::Result;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentKind};

/// CSV-ready rows under a header that depends only on the experiment tag.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub seeds: Vec<u64>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of one column, parsed as floats.
    pub fn floats(&self, name: &str) -> Vec<f64> {
        let Some(i) = self.column(name) else { return Vec::new() };
        self.rows.iter().map(|r| r[i].parse().unwrap_or(f64::NAN)).collect()
    }

    pub fn strings(&self, name: &str) -> Vec<&str> {
        let Some(i) = self.column(name) else { return Vec::new() };
        self.rows.iter().map(|r| r[i].as_str()).collect()
    }
}

pub fn columns(kind: ExperimentKind) -> &'static [&'static str] {
    match kind {
        ExperimentKind::BennettRatio => bennett::COLUMNS,
        ExperimentKind::IdentityL2Growth => identity::COLUMNS,
        ExperimentKind::TomczakSuite => tomczak::COLUMNS,
        ExperimentKind::QuotientSuite => quotient::COLUMNS,
        ExperimentKind::CotypeSuite => cotype::COLUMNS,
        ExperimentKind::Pi1LogExample => pi1_log::COLUMNS,
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Table> {
    let (seeds, rows) = match cfg.experiment {
        ExperimentKind::BennettRatio => bennett::run(cfg)?,
        ExperimentKind::IdentityL2Growth => identity::run(cfg)?,
        ExperimentKind::TomczakSuite => tomczak::run(cfg)?,
        ExperimentKind::QuotientSuite => quotient::run(cfg)?,
        ExperimentKind::CotypeSuite => cotype::run(cfg)?,
        ExperimentKind::Pi1LogExample => pi1_log::run(cfg)?,
    };
    let columns: Vec<String> = columns(cfg.experiment).iter().map(|c| c.to_string()).collect();
    debug_assert!(rows.iter().all(|r| r.len() == columns.len()));
    Ok(Table { columns, rows, seeds })
}

/// Evaluates `points` in parallel and concatenates their rows in input order.
pub(crate) fn collect_rows<P: Sync>(points: &[P], f: impl Fn(&P) -> Result<Vec<Vec<String>>> + Sync + Send) -> Result<Vec<Vec<String>>> {
    let chunks: Vec<Vec<Vec<String>>> = points.par_iter().map(f).collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two distinct `x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if pts.len() < 2 || sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = (1..6).map(|k| (k as f64, 3.0 * (k as f64).powf(0.25))).collect();
        assert!((log_log_slope(&pts).unwrap() - 0.25).abs() < 1e-12);
        assert!(log_log_slope(&[(2.0, 1.0), (2.0, 3.0)]).is_none());
    }
}
