//! The quotient formula `π_pq^k(T) = sup π_{r1}^k(T V D_σ)` as executable
//! reductions in both directions, and checks of the inequality chains built on it.

mod chains;
mod maurey;
mod quotient;

pub use chains::{interpolation_bound_check, lemma_rate, limit_chain_check, vector_scaling_check};
pub use maurey::{maurey_reduce, MaureyReduction, SignedBlocks};
pub use quotient::{
    quotient_certificate, quotient_rhs, quotient_verify, CandidateOutcome, QuotientCertificate, QuotientEvaluation, QuotientOptions,
    QuotientVerification,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::NormEstimate;
use crate::exponent::{Exponent, Rational};
use crate::operators::MatrixOperator;
use crate::scalar::Scalar;

/// `T` with `1 ≤ q ≤ p ≤ ∞`, `1 ≤ r ≤ s ≤ q'` and `1/r = 1/p + 1/s`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientInstance<T> {
    pub op: MatrixOperator<T>,
    pub p: Exponent,
    pub q: Exponent,
    pub r: Exponent,
    pub s: Exponent,
    pub k: usize,
}

impl<T: Scalar> QuotientInstance<T> {
    /// `s` defaults to `q'`.
    pub fn new(op: MatrixOperator<T>, p: Exponent, q: Exponent, s: Option<Exponent>, k: usize) -> Result<Self> {
        if q > p {
            return Err(Error::ExponentRelation(format!("need q <= p, got q={q}, p={p}")));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("vector budget k must be positive".into()));
        }
        let s = s.unwrap_or_else(|| q.conjugate());
        if s > q.conjugate() {
            return Err(Error::ExponentRelation(format!("need s <= q' = {}, got s={s}", q.conjugate())));
        }
        let r = Exponent::from_recip(p.recip() + s.recip())
            .map_err(|_| Error::ExponentRelation(format!("1/p + 1/s = {} exceeds 1", p.recip() + s.recip())))?;
        Ok(QuotientInstance { op, p, q, r, s, k })
    }

    pub fn context(&self) -> BTreeMap<String, String> {
        let mut c = BTreeMap::new();
        for (name, e) in [("p", self.p), ("q", self.q), ("r", self.r), ("s", self.s)] {
            c.insert(name.to_string(), e.to_string());
        }
        c.insert("k".into(), self.k.to_string());
        c.insert("shape".into(), format!("{}x{}", self.op.rows(), self.op.cols()));
        c
    }
}

/// One checked inequality `lhs ≤ rhs` (or `lhs ≈ rhs`) with its parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct InequalityReport<T> {
    pub name: String,
    pub lhs: NormEstimate<T>,
    pub rhs: NormEstimate<T>,
    pub ratio: T,
    pub holds: bool,
    pub context: BTreeMap<String, String>,
}

/// `lhs/rhs`, with `0/0 = 1` and `x/0 = ∞`.
pub fn safe_ratio<T: Scalar>(lhs: T, rhs: T) -> T {
    if rhs == T::zero() {
        if lhs == T::zero() {
            T::one()
        } else {
            T::infinity()
        }
    } else {
        lhs / rhs
    }
}

impl<T: Scalar> InequalityReport<T> {
    pub fn new(name: &str, lhs: NormEstimate<T>, rhs: NormEstimate<T>, holds: bool, context: BTreeMap<String, String>) -> Self {
        let ratio = safe_ratio(lhs.value, rhs.value);
        InequalityReport { name: name.to_string(), lhs, rhs, ratio, holds, context }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn csv_header() -> [&'static str; 6] {
        ["name", "params", "lhs", "rhs", "ratio", "holds"]
    }

    /// `name, params, lhs, rhs, ratio, holds` with numbers at 12 significant digits.
    pub fn csv_row(&self) -> [String; 6] {
        let params = self.context.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
        [
            self.name.clone(),
            params,
            format_sig(self.lhs.value.to_f64_lossy()),
            format_sig(self.rhs.value.to_f64_lossy()),
            format_sig(self.ratio.to_f64_lossy()),
            self.holds.to_string(),
        ]
    }
}

/// Decimal text with 12 significant digits; `inf`/`nan` spelled out.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{:.11e}", x);
    let v: f64 = s.parse().expect("formatted float parses");
    let plain = format!("{v}");
    if plain.len() <= 20 {
        plain
    } else {
        s
    }
}

pub(crate) fn rational_text(r: Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    #[test]
    fn instance_derives_r() {
        let op = MatrixOperator::<f64>::identity(2, Exponent::TWO);
        let inst = QuotientInstance::new(op.clone(), e("2"), e("2"), None, 2).unwrap();
        assert_eq!((inst.r, inst.s), (e("1"), e("2")));
        let inst = QuotientInstance::new(op.clone(), e("2"), e("1"), None, 3).unwrap();
        assert_eq!((inst.r, inst.s), (e("2"), Exponent::INF));
        assert!(QuotientInstance::new(op.clone(), e("2"), e("2"), Some(e("3")), 2).is_err());
        assert!(QuotientInstance::new(op.clone(), e("1"), e("2"), None, 2).is_err());
        assert!(QuotientInstance::new(op, e("1"), e("1"), Some(e("2")), 2).is_err());
    }

    #[test]
    fn ratio_and_csv() {
        assert_eq!(safe_ratio(0.0, 0.0), 1.0);
        assert_eq!(safe_ratio(1.0, 0.0), f64::INFINITY);
        assert_eq!(format_sig(2f64.sqrt()), "1.41421356237");
        assert_eq!(format_sig(2.0), "2");
        assert_eq!(format_sig(1e-30 / 3.0), "3.33333333333e-31");
        let lhs = NormEstimate::exact(1.0, "a", None);
        let rhs = NormEstimate::exact(2.0, "b", None);
        let mut ctx = BTreeMap::new();
        ctx.insert("n".to_string(), "4".to_string());
        let r = InequalityReport::new("demo", lhs, rhs, true, ctx);
        assert_eq!(r.csv_row(), ["demo", "n=4", "1", "2", "0.5", "true"].map(String::from));
        assert!(r.to_json().contains("\"ratio\":0.5"));
    }
}
