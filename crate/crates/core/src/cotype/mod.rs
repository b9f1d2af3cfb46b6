//! Rademacher and gaussian cotype constants with `k` vectors of
//! matrix-embedded norms `‖x‖_E = ‖Ax‖_v`.

mod average;
mod chain;

pub use average::{cotype_estimate, cotype_estimate_from, gaussian_average, rademacher_average, rademacher_average_mc, CotypeObjective};
pub use chain::{comparison_chain_report, cotype_truncate, cotype_vector_budget};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::family::VectorFamily;
use crate::norms::p_norm;
use crate::operators::MatrixOperator;
use crate::scalar::Scalar;

/// An `n`-dimensional normed space given by an injective `A: R^n → ℓ_v^{n'}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EmbeddedDoc<T>", into = "EmbeddedDoc<T>", bound = "T: Scalar")]
pub struct EmbeddedNorm<T> {
    embed: MatrixOperator<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct EmbeddedDoc<T> {
    embed: MatrixOperator<T>,
}

impl<T: Scalar> TryFrom<EmbeddedDoc<T>> for EmbeddedNorm<T> {
    type Error = Error;

    fn try_from(doc: EmbeddedDoc<T>) -> Result<Self> {
        EmbeddedNorm::new(doc.embed)
    }
}

impl<T: Scalar> From<EmbeddedNorm<T>> for EmbeddedDoc<T> {
    fn from(e: EmbeddedNorm<T>) -> Self {
        EmbeddedDoc { embed: e.embed }
    }
}

impl<T: Scalar> EmbeddedNorm<T> {
    /// Rejects embeddings without full column rank.
    pub fn new(embed: MatrixOperator<T>) -> Result<Self> {
        if embed.cols() == 0 {
            return Err(Error::InvalidParameter("embedded space must have positive dimension".into()));
        }
        if embed.rank() < embed.cols() {
            return Err(Error::InvalidParameter(format!("embedding of rank {} < dimension {} is not a norm", embed.rank(), embed.cols())));
        }
        Ok(EmbeddedNorm { embed })
    }

    /// `ℓ_v^n` itself.
    pub fn lp(n: usize, v: Exponent) -> Self {
        EmbeddedNorm { embed: MatrixOperator::identity(n, v) }
    }

    pub fn embed(&self) -> &MatrixOperator<T> {
        &self.embed
    }

    pub fn dim(&self) -> usize {
        self.embed.cols()
    }

    pub fn exponent(&self) -> Exponent {
        self.embed.codomain()
    }

    pub fn norm(&self, x: &[T]) -> T {
        p_norm(&self.embed.apply_unchecked(x), self.embed.codomain())
    }

    pub(crate) fn check(&self, family: &VectorFamily<T>) -> Result<()> {
        if family.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: family.dim() });
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("embedding serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariableKind {
    Rademacher,
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CotypeParams {
    pub q: Exponent,
    pub k: usize,
    pub kind: VariableKind,
    /// Gaussian samples for the final evaluation.
    pub mc_samples: usize,
}

impl CotypeParams {
    pub fn new(q: Exponent, k: usize, kind: VariableKind) -> Result<Self> {
        if q < Exponent::TWO {
            return Err(Error::ExponentRelation(format!("cotype needs q >= 2, got {q}")));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("vector budget k must be positive".into()));
        }
        Ok(CotypeParams { q, k, kind, mc_samples: 20_000 })
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.mc_samples = samples;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_must_be_injective() {
        let flat = MatrixOperator::<f64>::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]], Exponent::TWO, Exponent::ONE).unwrap();
        assert!(EmbeddedNorm::new(flat).is_err());
        let e = EmbeddedNorm::<f64>::lp(3, Exponent::ONE);
        assert_eq!(e.norm(&[1.0, -2.0, 0.5]), 3.5);
        let back = EmbeddedNorm::<f64>::from_json(&e.to_json()).unwrap();
        assert_eq!(back, e);
        assert!(e.to_json().starts_with("{\"embed\":"));
    }

    #[test]
    fn params_require_q_at_least_two() {
        assert!(CotypeParams::new("3/2".parse().unwrap(), 2, VariableKind::Rademacher).is_err());
        assert!(CotypeParams::new(Exponent::INF, 2, VariableKind::Gaussian).is_ok());
    }
}
