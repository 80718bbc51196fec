//! Exact rational numbers used for every value, threshold and bound.
//!
//! Values are reduced fractions of `i64`. They serialize as
//! `{"num": p, "den": q}` and parse from `"p/q"` or `"p"` strings; floats are
//! never accepted.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    /// Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        Rational(Ratio::new(num, den))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    /// `count / total` for multiset counts.
    pub fn frac(count: usize, total: usize) -> Self {
        Rational::new(count as i64, total as i64)
    }

    pub fn num(&self) -> i64 {
        *self.0.numer()
    }

    pub fn den(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn floor(&self) -> i64 {
        *self.0.floor().numer()
    }

    pub fn ceil(&self) -> i64 {
        *self.0.ceil().numer()
    }

    /// Round half up: `floor(x + 1/2)`.
    pub fn round_half_up(&self) -> i64 {
        (*self + Rational::new(1, 2)).floor()
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn to_f64(&self) -> f64 {
        self.num() as f64 / self.den() as f64
    }

    /// `self * n` compared against an integer count without overflow games:
    /// true iff `count <= self * n`.
    pub fn bounds_count(&self, count: usize, n: usize) -> bool {
        Rational::from_int(count as i64) <= *self * Rational::from_int(n as i64)
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Smallest integer `m >= 0` with `2^m >= self`; zero for `self <= 1`.
    pub fn ceil_log2(&self) -> u32 {
        let mut m = 0u32;
        let mut p = Rational::ONE;
        while p < *self {
            p = p * Rational::from_int(2);
            m += 1;
        }
        m
    }

    /// `Some(m)` when `self == 2^m` for an integer `m >= 0`.
    pub fn exact_log2(&self) -> Option<u32> {
        let m = self.ceil_log2();
        (Rational::from_int(1i64 << m) == *self).then_some(m)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(self.0.$m(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den() == 1 {
            write!(f, "{}", self.num())
        } else {
            write!(f, "{}/{}", self.num(), self.den())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num(), self.den())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational {0:?}: expected \"p/q\" or \"p\" with integer p, q and q != 0")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        let (p, q) = match t.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (t, "1"),
        };
        let p: i64 = p.parse().map_err(|_| err())?;
        let q: i64 = q.parse().map_err(|_| err())?;
        if q == 0 {
            return Err(err());
        }
        Ok(Rational::new(p, q))
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    num: i64,
    den: i64,
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        Wire {
            num: self.num(),
            den: self.den(),
        }
        .serialize(serializer)
    }
}

/// Input also accepts the `"p/q"` string form, for hand-written configs.
#[derive(Deserialize)]
#[serde(untagged)]
enum WireIn {
    Pair(Wire),
    Text(String),
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let w = match WireIn::deserialize(deserializer)? {
            WireIn::Pair(w) => w,
            WireIn::Text(s) => return s.parse().map_err(serde::de::Error::custom),
        };
        if w.den == 0 {
            return Err(serde::de::Error::custom("rational with zero denominator"));
        }
        Ok(Rational::new(w.num, w.den))
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        *self == Rational::from_int(*other)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.cmp(&Rational::from_int(*other)))
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::ONE
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_reduces() {
        assert_eq!("94/12800".parse::<Rational>().unwrap(), Rational::new(47, 6400));
        assert_eq!("3".parse::<Rational>().unwrap(), Rational::from_int(3));
        assert!("0.5".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
    }

    #[test]
    fn json_shape() {
        let r = Rational::new(3, 4);
        assert_eq!(serde_json::to_string(&r).unwrap(), r#"{"num":3,"den":4}"#);
        let back: Rational = serde_json::from_str(r#"{"num":6,"den":8}"#).unwrap();
        assert_eq!(serde_json::from_str::<Rational>(r#""6/8""#).unwrap(), back);
        assert!(serde_json::from_str::<Rational>(r#""1/0""#).is_err());
        assert_eq!(back, r);
    }

    #[test]
    fn logs() {
        assert_eq!(Rational::from_int(4).ceil_log2(), 2);
        assert_eq!(Rational::from_int(5).ceil_log2(), 3);
        assert_eq!(Rational::ONE.ceil_log2(), 0);
        assert_eq!(Rational::new(1, 2).ceil_log2(), 0);
        assert_eq!(Rational::from_int(64).exact_log2(), Some(6));
        assert_eq!(Rational::from_int(6).exact_log2(), None);
    }

    #[test]
    fn rounding() {
        assert_eq!(Rational::new(1, 2).round_half_up(), 1);
        assert_eq!(Rational::new(5, 4).round_half_up(), 1);
        assert_eq!(Rational::new(7, 4).round_half_up(), 2);
        assert_eq!(Rational::ZERO.round_half_up(), 0);
    }
}
