//! Exact exponents in `[1, ∞]`.
//!
//! Exponents are kept as rationals (or infinity) so that relations such as
//! `1/q = 1/p + 1/r` and conjugacy hold exactly rather than up to rounding.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Rational = Ratio<i64>;

/// An extended-real exponent `e ∈ [1, ∞]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Exponent {
    Finite(Rational),
    Infinite,
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(Ratio::new_raw(1, 1));
    pub const TWO: Exponent = Exponent::Finite(Ratio::new_raw(2, 1));
    pub const INF: Exponent = Exponent::Infinite;

    pub fn finite(value: Rational) -> Result<Self> {
        if value < Rational::one() {
            return Err(Error::ExponentBelowOne(value.to_string()));
        }
        Ok(Exponent::Finite(value))
    }

    pub fn int(value: i64) -> Result<Self> {
        Self::finite(Rational::from_integer(value))
    }

    pub fn ratio(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        Self::finite(Rational::new(numer, denom))
    }

    /// Builds the exponent whose reciprocal is `recip`; `recip = 0` gives `∞`.
    pub fn from_recip(recip: Rational) -> Result<Self> {
        if recip.is_negative() || recip > Rational::one() {
            return Err(Error::ExponentBelowOne(format!("1/({recip})")));
        }
        if recip.is_zero() {
            Ok(Exponent::Infinite)
        } else {
            Ok(Exponent::Finite(recip.recip()))
        }
    }

    /// Closest rational with denominator at most `max_denom` (continued fractions).
    /// `f64::INFINITY` maps to `∞`.
    pub fn approximate(x: f64, max_denom: i64) -> Result<Self> {
        if x.is_infinite() && x > 0.0 {
            return Ok(Exponent::Infinite);
        }
        if !x.is_finite() || x < 1.0 {
            return Err(Error::ExponentBelowOne(x.to_string()));
        }
        Self::finite(approximate_rational(x, max_denom))
    }

    /// `1/e`, zero for `∞`.
    pub fn recip(&self) -> Rational {
        match self {
            Exponent::Finite(v) => v.recip(),
            Exponent::Infinite => Rational::zero(),
        }
    }

    pub fn conjugate(&self) -> Exponent {
        Exponent::from_recip(Rational::one() - self.recip()).expect("conjugate of e >= 1 is >= 1")
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    pub fn is_one(&self) -> bool {
        *self == Exponent::ONE
    }

    pub fn is_two(&self) -> bool {
        *self == Exponent::TWO
    }

    pub fn value<T: Scalar>(&self) -> T {
        match self {
            Exponent::Finite(v) => T::of(ratio_to_f64(*v)),
            Exponent::Infinite => T::infinity(),
        }
    }

    pub fn recip_value<T: Scalar>(&self) -> T {
        T::of(ratio_to_f64(self.recip()))
    }

    pub fn to_f64(&self) -> f64 {
        self.value::<f64>()
    }
}

/// Returns `r` with `1/q = 1/p + 1/r`; `r = ∞` when `q = p`.
pub fn holder_split(q: Exponent, p: Exponent) -> Result<Exponent> {
    if q > p {
        return Err(Error::ExponentRelation(format!("holder_split needs q <= p, got q={q}, p={p}")));
    }
    Exponent::from_recip(q.recip() - p.recip())
}

/// Conjugate exponent `e'` with `1/e + 1/e' = 1`.
pub fn conjugate(e: Exponent) -> Exponent {
    e.conjugate()
}

fn ratio_to_f64(r: Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

fn approximate_rational(x: f64, max_denom: i64) -> Rational {
    // Convergents h/k of the continued fraction of x.
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut frac = x;
    loop {
        let a = frac.floor();
        if a > i64::MAX as f64 / 4.0 {
            break;
        }
        let a = a as i64;
        let (h2, k2) = match (a.checked_mul(h1).and_then(|v| v.checked_add(h0)), a.checked_mul(k1).and_then(|v| v.checked_add(k0))) {
            (Some(h), Some(k)) => (h, k),
            _ => break,
        };
        if k2 > max_denom {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let rest = frac - a as f64;
        if rest.abs() < 1e-15 {
            break;
        }
        frac = 1.0 / rest;
    }
    if k1 == 0 {
        return Rational::from_integer(x.round() as i64);
    }
    Rational::new(h1, k1)
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        // Larger exponent <=> smaller reciprocal.
        other.recip().cmp(&self.recip())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Infinite => write!(f, "inf"),
            Exponent::Finite(v) if v.is_integer() => write!(f, "{}", v.numer()),
            Exponent::Finite(v) => write!(f, "{}/{}", v.numer(), v.denom()),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::ParseExponent(s.to_string());
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => return Ok(Exponent::Infinite),
            _ => {}
        }
        if let Some((a, b)) = t.split_once('/') {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            return Exponent::ratio(a, b);
        }
        if let Ok(n) = t.parse::<i64>() {
            return Exponent::int(n);
        }
        // Decimal literal, read exactly: "1.25" -> 125/100.
        if let Some((int, frac)) = t.split_once('.') {
            if !frac.is_empty() && frac.len() <= 12 && frac.chars().all(|c| c.is_ascii_digit()) {
                let scale = 10i64.pow(frac.len() as u32);
                let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
                let frac: i64 = frac.parse().map_err(|_| bad())?;
                let numer = int.checked_mul(scale).and_then(|v| v.checked_add(frac)).ok_or_else(bad)?;
                return Exponent::ratio(numer, scale);
            }
        }
        Err(bad())
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(i64),
            Float(f64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(n) => Exponent::int(n).map_err(serde::de::Error::custom),
            Repr::Float(x) => Exponent::approximate(x, 1_000_000).map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(conjugate(Exponent::ONE), Exponent::INF);
        assert_eq!(conjugate(Exponent::INF), Exponent::ONE);
        assert_eq!(conjugate(Exponent::TWO), Exponent::TWO);
        assert_eq!(conjugate(e("4")), e("4/3"));
    }

    #[test]
    fn conjugate_is_an_involution() {
        for s in ["1", "3/2", "2", "7/3", "4", "100", "inf"] {
            assert_eq!(conjugate(conjugate(e(s))), e(s));
        }
    }

    #[test]
    fn holder_split_examples() {
        assert_eq!(holder_split(e("1"), e("2")).unwrap(), e("2"));
        assert_eq!(holder_split(e("2"), e("2")).unwrap(), Exponent::INF);
        assert_eq!(holder_split(e("1"), e("4")).unwrap(), e("4/3"));
        assert!(holder_split(e("3"), e("2")).is_err());
    }

    #[test]
    fn parsing_and_display() {
        assert_eq!(e("1.5"), e("3/2"));
        assert_eq!(e("∞"), Exponent::INF);
        assert_eq!(e("6/4").to_string(), "3/2");
        assert!("0.5".parse::<Exponent>().is_err());
        assert!("abc".parse::<Exponent>().is_err());
        let json = serde_json::to_string(&e("4/3")).unwrap();
        assert_eq!(json, "\"4/3\"");
        let back: Exponent = serde_json::from_str("3").unwrap();
        assert_eq!(back, e("3"));
    }

    #[test]
    fn ordering_matches_numeric_order() {
        assert!(e("1") < e("3/2"));
        assert!(e("100") < Exponent::INF);
        assert_eq!(e("2").cmp(&e("4/2")), Ordering::Equal);
    }

    #[test]
    fn approximation_keeps_small_denominators() {
        assert_eq!(Exponent::approximate(1.5, 100).unwrap(), e("3/2"));
        let s = Exponent::approximate(2.0 * (1.0 + 3f64.ln()), 1000).unwrap();
        assert!((s.to_f64() - 2.0 * (1.0 + 3f64.ln())).abs() < 1e-5);
    }
}
