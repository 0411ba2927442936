//! The exact scalar field every measure, offset and weight lives in.
//!
//! Everything downstream is generic over [`Scalar`]; the crate root fixes the
//! default to arbitrary-precision rationals. Fixed-width rationals work too
//! but may overflow on long computations.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed};

/// An exact ordered field of rationals.
pub trait Scalar:
    Clone + Ord + Hash + Debug + Display + Signed + Send + Sync + 'static
{
    /// `numer / denom`. Panics on a zero denominator.
    fn frac(numer: i64, denom: i64) -> Self;

    fn from_int(n: i64) -> Self {
        Self::frac(n, 1)
    }

    /// Always `p/q`, even for integers, so exported numerics have one shape.
    fn to_pq(&self) -> String;

    /// Accepts `p/q` or a bare integer `p`.
    fn parse_pq(text: &str) -> Option<Self>;

    /// Largest integer not above `self`, if it fits in an `i64`.
    fn floor_i64(&self) -> Option<i64>;
}

impl<T> Scalar for Ratio<T>
where
    T: Clone + Integer + Signed + Hash + Debug + Display + FromStr + FromPrimitive + Send + Sync + 'static,
{
    fn frac(numer: i64, denom: i64) -> Self {
        let n = T::from_i64(numer).expect("numerator fits scalar integer type");
        let d = T::from_i64(denom).expect("denominator fits scalar integer type");
        Ratio::new(n, d)
    }

    fn to_pq(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_pq(text: &str) -> Option<Self> {
        let text = text.trim();
        let (n, d) = match text.split_once('/') {
            Some((n, d)) => (n.trim().parse::<T>().ok()?, d.trim().parse::<T>().ok()?),
            None => (text.parse::<T>().ok()?, T::one()),
        };
        if d.is_zero() {
            return None;
        }
        Some(Ratio::new(n, d))
    }

    fn floor_i64(&self) -> Option<i64> {
        let f = self.floor().to_integer();
        let s = f.to_string();
        s.parse::<i64>().ok()
    }
}

/// A nonnegative extended real: an exact value or `+∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Extended<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> Extended<S> {
    pub fn zero() -> Self {
        Extended::Finite(S::zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a.clone() + b.clone()),
            _ => Extended::Infinite,
        }
    }

    /// `self · factor` with the measure-theory convention `∞ · 0 = 0`.
    pub fn scale(&self, factor: &S) -> Self {
        if factor.is_zero() {
            return Extended::zero();
        }
        match self {
            Extended::Finite(a) => Extended::Finite(a.clone() * factor.clone()),
            Extended::Infinite => Extended::Infinite,
        }
    }

    pub fn to_pq(&self) -> String {
        match self {
            Extended::Finite(a) => a.to_pq(),
            Extended::Infinite => "inf".to_string(),
        }
    }
}

impl<S: Display> Display for Extended<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Extended::Finite(a) => write!(f, "{a}"),
            Extended::Infinite => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type Q = Ratio<BigInt>;

    #[test]
    fn pq_round_trip() {
        let x = Q::frac(-6, 4);
        assert_eq!(x.to_pq(), "-3/2");
        assert_eq!(Q::parse_pq("-3/2"), Some(x));
        assert_eq!(Q::parse_pq("5").unwrap().to_pq(), "5/1");
        assert_eq!(Q::parse_pq("1/0"), None);
        assert_eq!(Q::parse_pq("abc"), None);
    }

    #[test]
    fn floor_of_negative_fraction() {
        assert_eq!(Q::frac(-1, 3).floor_i64(), Some(-1));
        assert_eq!(Ratio::<i64>::frac(7, 2).floor_i64(), Some(3));
    }

    #[test]
    fn extended_arithmetic() {
        let one = Extended::Finite(Q::from_int(1));
        assert_eq!(one.add(&Extended::Infinite), Extended::Infinite);
        assert_eq!(Extended::<Q>::Infinite.scale(&Q::from_int(0)), Extended::zero());
        assert_eq!(one.scale(&Q::frac(1, 2)).to_pq(), "1/2");
    }
}
