//! Truncation of a family to its largest images.

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::family::VectorFamily;
use crate::norms::p_norm;
use crate::operators::MatrixOperator;
use crate::scalar::Scalar;

fn reject_equal(p: Exponent, q: Exponent) -> Result<()> {
    if q >= p {
        return Err(Error::ExponentRelation(format!("truncation needs q < p, got q={q}, p={p}")));
    }
    Ok(())
}

/// Indices sorted by `norms` nonincreasing (ties keep the original order) and
/// the shortest prefix after which every norm is `≤ delta`.
pub fn truncate_by_norms<T: Scalar>(norms: &[T], delta: T) -> (Vec<usize>, usize) {
    let mut order: Vec<usize> = (0..norms.len()).collect();
    order.sort_by(|a, b| norms[*b].partial_cmp(&norms[*a]).unwrap_or(std::cmp::Ordering::Equal));
    let n = order.iter().take_while(|&&j| norms[j] > delta).count();
    (order, n)
}

/// Sorts `F` by `‖Tx_j‖` nonincreasing and keeps the minimal prefix beyond
/// which all image norms are `≤ delta`. The prefix may be empty.
pub fn jameson_truncate<T: Scalar>(
    family: &VectorFamily<T>,
    op: &MatrixOperator<T>,
    p: Exponent,
    q: Exponent,
    delta: T,
) -> Result<(VectorFamily<T>, usize)> {
    reject_equal(p, q)?;
    if !(delta > T::zero()) {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    let norms: Vec<T> = family.images(op)?.iter().map(|y| p_norm(y, op.codomain())).collect();
    let (order, n) = truncate_by_norms(&norms, delta);
    let kept = if n == 0 { VectorFamily::empty(family.dim(), family.ambient()) } else { family.select(&order[..n]) };
    Ok((kept, n))
}

/// `⌈(2^{1/p} π_q / π_pq)^{1/(1/q − 1/p)}⌉`.
pub fn jameson_bound(pi_q: f64, pi_pq: f64, p: Exponent, q: Exponent) -> Result<u64> {
    reject_equal(p, q)?;
    if !(pi_q > 0.0 && pi_pq > 0.0) || !pi_q.is_finite() || !pi_pq.is_finite() {
        return Err(Error::InvalidParameter("summing norms must be positive and finite".into()));
    }
    if pi_pq > pi_q * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!("pi_pq = {pi_pq} exceeds pi_q = {pi_q}")));
    }
    // Normalized so that π_q = 1.
    let ratio = 2f64.powf(p.recip_value::<f64>()) / (pi_pq / pi_q);
    let gap = q.recip_value::<f64>() - p.recip_value::<f64>();
    let x = ratio.powf(1.0 / gap);
    let r = x.round();
    let n = if (x - r).abs() <= 1e-9 * r.max(1.0) { r } else { x.ceil() };
    Ok(n.max(1.0) as u64)
}
