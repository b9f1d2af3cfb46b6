use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use pqsum::{AscentConfig, Exponent};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    BennettRatio,
    IdentityL2Growth,
    TomczakSuite,
    QuotientSuite,
    CotypeSuite,
    Pi1LogExample,
}

impl ExperimentKind {
    pub fn tag(self) -> &'static str {
        match self {
            ExperimentKind::BennettRatio => "bennett_ratio",
            ExperimentKind::IdentityL2Growth => "identity_l2_growth",
            ExperimentKind::TomczakSuite => "tomczak_suite",
            ExperimentKind::QuotientSuite => "quotient_suite",
            ExperimentKind::CotypeSuite => "cotype_suite",
            ExperimentKind::Pi1LogExample => "pi1_log_example",
        }
    }
}

/// Parameter lists. A missing list takes the experiment's default; a list
/// that is present must be nonempty.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    pub n: Option<Vec<usize>>,
    pub m: Option<Vec<usize>>,
    pub k: Option<Vec<usize>>,
    pub p: Option<Vec<Exponent>>,
    pub q: Option<Vec<Exponent>>,
    pub s: Option<Vec<Exponent>>,
    /// Interpolation parameters as text, e.g. `"1/2"`.
    pub theta: Option<Vec<String>>,
    /// Domain exponents of random operators.
    pub u: Option<Vec<Exponent>>,
    /// Codomain exponents of random operators.
    pub v: Option<Vec<Exponent>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub ascent: AscentConfig,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn nonempty<T: Clone>(name: &str, list: &Option<Vec<T>>, default: &[T]) -> Result<Vec<T>> {
    match list {
        Some(v) if v.is_empty() => bail!("grid `{name}` is empty"),
        Some(v) => Ok(v.clone()),
        None => Ok(default.to_vec()),
    }
}

impl Grid {
    pub fn n_or(&self, default: &[usize]) -> Result<Vec<usize>> {
        let v = nonempty("n", &self.n, default)?;
        if v.contains(&0) {
            bail!("grid `n` must contain positive integers");
        }
        Ok(v)
    }

    pub fn m_or(&self, default: &[usize]) -> Result<Vec<usize>> {
        let v = nonempty("m", &self.m, default)?;
        if v.contains(&0) {
            bail!("grid `m` must contain positive integers");
        }
        Ok(v)
    }

    /// `None` means the experiment derives `k` from the other parameters.
    pub fn k_list(&self) -> Result<Option<Vec<usize>>> {
        match &self.k {
            None => Ok(None),
            Some(v) if v.is_empty() => bail!("grid `k` is empty"),
            Some(v) if v.contains(&0) => bail!("grid `k` must contain positive integers"),
            Some(v) => Ok(Some(v.clone())),
        }
    }

    pub fn p_or(&self, default: &[Exponent]) -> Result<Vec<Exponent>> {
        nonempty("p", &self.p, default)
    }

    pub fn q_or(&self, default: &[Exponent]) -> Result<Vec<Exponent>> {
        nonempty("q", &self.q, default)
    }

    pub fn s_or(&self, default: &[Exponent]) -> Result<Vec<Exponent>> {
        nonempty("s", &self.s, default)
    }

    pub fn u_or(&self, default: &[Exponent]) -> Result<Vec<Exponent>> {
        nonempty("u", &self.u, default)
    }

    pub fn v_or(&self, default: &[Exponent]) -> Result<Vec<Exponent>> {
        nonempty("v", &self.v, default)
    }
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig { experiment, grid: Grid::default(), seeds: None, ascent: AscentConfig::default(), output: None }
    }

    /// JSON or TOML, chosen by extension (`.toml` is TOML, anything else JSON).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let cfg: ExperimentConfig = if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).with_context(|| format!("malformed TOML config {}", path.display()))?
        } else {
            serde_json::from_str(&text).with_context(|| format!("malformed JSON config {}", path.display()))?
        };
        Ok(cfg)
    }

    pub fn seeds_or(&self, default: &[u64]) -> Result<Vec<u64>> {
        nonempty("seeds", &self.seeds, default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_json_and_toml() {
        let json = r#"{"experiment": "identity_l2_growth", "grid": {"n": [2, 4], "p": ["4"], "q": [4]}, "seeds": [1]}"#;
        let cfg: ExperimentConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg.experiment, ExperimentKind::IdentityL2Growth);
        assert_eq!(cfg.grid.n_or(&[1]).unwrap(), vec![2, 4]);
        let toml_text = "experiment = \"bennett_ratio\"\nseeds = [0, 1]\n[grid]\nn = [4]\ns = [\"4\"]\n[ascent]\nstarts = 4\n";
        let cfg: ExperimentConfig = toml::from_str(toml_text).unwrap();
        assert_eq!(cfg.ascent.starts, 4);
        assert_eq!(cfg.ascent.iterations, AscentConfig::default().iterations);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"experiment": "nope"}"#).is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"experiment": "cotype_suite", "grid": {"zz": [1]}}"#).is_err());
    }

    #[test]
    fn empty_lists_are_rejected() {
        let cfg: ExperimentConfig = serde_json::from_str(r#"{"experiment": "bennett_ratio", "grid": {"n": []}}"#).unwrap();
        assert!(cfg.grid.n_or(&[4]).is_err());
        let cfg: ExperimentConfig = serde_json::from_str(r#"{"experiment": "bennett_ratio", "seeds": []}"#).unwrap();
        assert!(cfg.seeds_or(&[0]).is_err());
    }
}
