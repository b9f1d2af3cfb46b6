use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::operators::MatrixOperator;
use crate::scalar::Scalar;

/// An ordered family `(x_1, …, x_k)` of vectors in `ℓ_u^m`.
///
/// Only truncation may produce an empty family; [`VectorFamily::new`]
/// requires at least one vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyDoc<T>", into = "FamilyDoc<T>", bound = "T: Scalar")]
pub struct VectorFamily<T> {
    vectors: Vec<Vec<T>>,
    dim: usize,
    ambient: Exponent,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct FamilyDoc<T> {
    ambient_exp: Exponent,
    vectors: Vec<Vec<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
}

impl<T: Scalar> TryFrom<FamilyDoc<T>> for VectorFamily<T> {
    type Error = Error;

    fn try_from(doc: FamilyDoc<T>) -> Result<Self> {
        match (doc.vectors.is_empty(), doc.dim) {
            (true, Some(dim)) => Ok(VectorFamily::empty(dim, doc.ambient_exp)),
            _ => VectorFamily::new(doc.vectors, doc.ambient_exp),
        }
    }
}

impl<T: Scalar> From<VectorFamily<T>> for FamilyDoc<T> {
    fn from(f: VectorFamily<T>) -> Self {
        let dim = f.vectors.is_empty().then_some(f.dim);
        FamilyDoc { ambient_exp: f.ambient, vectors: f.vectors, dim }
    }
}

impl<T: Scalar> VectorFamily<T> {
    pub fn new(vectors: Vec<Vec<T>>, ambient: Exponent) -> Result<Self> {
        let dim = vectors.first().ok_or(Error::EmptyFamily)?.len();
        if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.len() });
        }
        if vectors.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(VectorFamily { vectors, dim, ambient })
    }

    pub fn empty(dim: usize, ambient: Exponent) -> Self {
        VectorFamily { vectors: Vec::new(), dim, ambient }
    }

    /// Unit vectors `e_1, …, e_m`.
    pub fn basis(m: usize, ambient: Exponent) -> Self {
        let vectors = (0..m)
            .map(|j| {
                let mut e = vec![T::zero(); m];
                e[j] = T::one();
                e
            })
            .collect();
        VectorFamily { vectors, dim: m, ambient }
    }

    /// Columns of `op`, as vectors of its codomain.
    pub fn from_columns(op: &MatrixOperator<T>) -> Self {
        VectorFamily { vectors: op.columns(), dim: op.rows(), ambient: op.codomain() }
    }

    /// `k` vectors of length `m` read consecutively from `flat`.
    pub(crate) fn from_flat(flat: &[T], k: usize, m: usize, ambient: Exponent) -> Self {
        let vectors = (0..k).map(|j| flat[j * m..(j + 1) * m].to_vec()).collect();
        VectorFamily { vectors, dim: m, ambient }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient(&self) -> Exponent {
        self.ambient
    }

    pub fn vectors(&self) -> &[Vec<T>] {
        &self.vectors
    }

    pub fn vector(&self, j: usize) -> &[T] {
        &self.vectors[j]
    }

    /// The column map `V = Σ e_j ⊗ x_j : ℓ_{q'}^k → ℓ_u^m`.
    pub fn column_operator(&self, q: Exponent) -> MatrixOperator<T> {
        MatrixOperator::from_columns(self.dim, &self.vectors, q.conjugate(), self.ambient).expect("family vectors share one dimension")
    }

    pub fn padded(&self, extra: usize) -> Self {
        let mut vectors = self.vectors.clone();
        vectors.extend((0..extra).map(|_| vec![T::zero(); self.dim]));
        VectorFamily { vectors, ..self.clone() }
    }

    pub fn scaled(&self, factor: T) -> Self {
        let vectors = self.vectors.iter().map(|v| v.iter().map(|a| *a * factor).collect()).collect();
        VectorFamily { vectors, ..self.clone() }
    }

    /// Keeps the vectors at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let vectors = indices.iter().map(|&j| self.vectors[j].clone()).collect();
        VectorFamily { vectors, ..self.clone() }
    }

    /// Images `T x_j`.
    pub fn images(&self, op: &MatrixOperator<T>) -> Result<Vec<Vec<T>>> {
        if op.cols() != self.dim {
            return Err(Error::DimensionMismatch { expected: op.cols(), found: self.dim });
        }
        if op.domain() != self.ambient {
            return Err(Error::ExponentMismatch { left: op.domain().to_string(), right: self.ambient.to_string() });
        }
        Ok(self.vectors.iter().map(|x| op.apply_unchecked(x)).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("family serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}
