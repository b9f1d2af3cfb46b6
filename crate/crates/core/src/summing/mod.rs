//! Weak-ℓq norms of vector families and the few-vector summing norm
//! `π_pq^k(T) = sup{ (Σ‖Tx_j‖^p)^{1/p} : w_q(x_1..x_k) ≤ 1 }`.

mod estimate;
mod exact;
mod jameson;
mod kwapien;

pub use estimate::{pi_estimate, pi_estimate_from, strong_gradient, weak_gradient, PiObjective};
pub use exact::{partition_configurations, pi_exact_linf_q1};
pub use jameson::{jameson_bound, jameson_truncate, truncate_by_norms};
pub use kwapien::{kwapien_check, kwapien_lift, KwapienReport};

use serde::{Deserialize, Serialize};

use crate::ascent::AscentConfig;
use crate::error::{Error, Result};
use crate::estimate::NormEstimate;
use crate::exponent::Exponent;
use crate::family::VectorFamily;
use crate::norms::p_norm;
use crate::operators::MatrixOperator;
use crate::scalar::Scalar;

/// The pair `(p, q)` with `q ≤ p` and the vector budget `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummingParams {
    pub p: Exponent,
    pub q: Exponent,
    pub k: usize,
}

impl SummingParams {
    pub fn new(p: Exponent, q: Exponent, k: usize) -> Result<Self> {
        if q > p {
            return Err(Error::ExponentRelation(format!("summing norms need q <= p, got q={q}, p={p}")));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("vector budget k must be positive".into()));
        }
        Ok(SummingParams { p, q, k })
    }
}

/// `w_q(F) = sup_{‖x*‖ ≤ 1} (Σ|⟨x_j, x*⟩|^q)^{1/q} = ‖V: ℓ_{q'}^k → ℓ_u^m‖`.
pub fn weak_norm<T: Scalar>(family: &VectorFamily<T>, q: Exponent) -> NormEstimate<T> {
    weak_norm_with(family, q, &AscentConfig::default())
}

pub fn weak_norm_with<T: Scalar>(family: &VectorFamily<T>, q: Exponent, cfg: &AscentConfig) -> NormEstimate<T> {
    if family.is_empty() {
        return NormEstimate::exact(T::zero(), "empty", None);
    }
    family.column_operator(q).operator_norm_with(cfg)
}

/// `(Σ_j ‖T x_j‖_v^p)^{1/p}`, the maximum over `j` when `p = ∞`.
pub fn strong_norm<T: Scalar>(family: &VectorFamily<T>, op: &MatrixOperator<T>, p: Exponent) -> Result<T> {
    let norms: Vec<T> = family.images(op)?.iter().map(|y| p_norm(y, op.codomain())).collect();
    Ok(p_norm(&norms, p))
}

/// `π_{p1}^k(T)`: the partition oracle when `T` lives on `ℓ_∞^m` and the
/// enumeration fits the cap, otherwise [`pi_estimate`].
pub fn pi_p1<T: Scalar>(op: &MatrixOperator<T>, p: Exponent, k: usize, cfg: &AscentConfig) -> Result<NormEstimate<T>> {
    if op.domain().is_infinite() && partition_configurations(op.cols(), k) <= cfg.partition_cap {
        return pi_exact_linf_q1(op, p, k, cfg);
    }
    pi_estimate(op, SummingParams::new(p, Exponent::ONE, k)?, cfg)
}

/// Value of the homogeneous ratio `strong_norm / weak_norm` on one family.
pub fn family_ratio<T: Scalar>(
    family: &VectorFamily<T>,
    op: &MatrixOperator<T>,
    p: Exponent,
    q: Exponent,
    cfg: &AscentConfig,
) -> Result<T> {
    let s = strong_norm(family, op, p)?;
    let w = weak_norm_with(family, q, cfg).value;
    Ok(if w > T::zero() { s / w } else { T::zero() })
}
