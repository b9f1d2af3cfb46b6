use serde::{Deserialize, Serialize};

use crate::family::VectorFamily;
use crate::scalar::Scalar;

/// Whether a reported value is the true quantity or a one-sided bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Exact,
    Lower,
    Upper,
}

impl std::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundKind::Exact => "exact",
            BoundKind::Lower => "lower",
            BoundKind::Upper => "upper",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, bound = "T: Scalar")]
pub enum Witness<T> {
    Vector(Vec<T>),
    Family(VectorFamily<T>),
}

/// Result of every norm computation in the crate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct NormEstimate<T> {
    pub value: T,
    pub kind: BoundKind,
    pub method: String,
    pub tol: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness<T>>,
}

impl<T: Scalar> NormEstimate<T> {
    pub fn exact(value: T, method: &str, witness: Option<Witness<T>>) -> Self {
        NormEstimate { value, kind: BoundKind::Exact, method: method.to_string(), tol: T::eps_num(), witness }
    }

    pub fn lower(value: T, method: &str, tol: T, witness: Option<Witness<T>>) -> Self {
        NormEstimate { value, kind: BoundKind::Lower, method: method.to_string(), tol, witness }
    }

    pub fn is_exact(&self) -> bool {
        self.kind == BoundKind::Exact
    }

    pub fn family(&self) -> Option<&VectorFamily<T>> {
        match &self.witness {
            Some(Witness::Family(f)) => Some(f),
            _ => None,
        }
    }

    pub fn vector(&self) -> Option<&[T]> {
        match &self.witness {
            Some(Witness::Vector(v)) => Some(v),
            _ => None,
        }
    }

    /// Same estimate multiplied by `factor >= 0`, witness dropped.
    pub fn scaled(&self, factor: T, method: &str) -> Self {
        NormEstimate { value: self.value * factor, kind: self.kind, method: method.to_string(), tol: self.tol, witness: None }
    }
}
