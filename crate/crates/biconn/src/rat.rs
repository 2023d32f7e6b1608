//! Exact rational arithmetic for edge costs, node profits and stretch ratios.
//!
//! All cost comparisons and report ratios are computed over `Ratio<i128>`, so
//! reports are bit-reproducible per seed. JSON accepts integers, `"p/q"`
//! strings and decimal strings; emitted values are an integer when the value
//! is integral and a `"p/q"` string otherwise.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(Ratio<i128>);

impl Rat {
    pub fn zero() -> Rat {
        Rat(Ratio::zero())
    }

    pub fn one() -> Rat {
        Rat(Ratio::one())
    }

    pub fn int(n: i64) -> Rat {
        Rat(Ratio::from_integer(n as i128))
    }

    /// Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Rat {
        Rat(Ratio::new(num as i128, den as i128))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn min(self, other: Rat) -> Rat {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Rat) -> Rat {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact conversion of a finite f64 (every finite double is p/2^k).
    /// Returns None for NaN, infinities, or magnitudes outside i128 range.
    pub fn from_f64_exact(x: f64) -> Option<Rat> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Rat::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i128 } else { 1i128 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = (bits & ((1u64 << 52) - 1)) as i128;
        let (mant, e2) = if exp == 0 {
            (frac, -1074i64)
        } else {
            (frac | (1i128 << 52), exp - 1075)
        };
        if e2 >= 0 {
            if e2 > 70 {
                return None;
            }
            Some(Rat(Ratio::from_integer(sign * (mant << e2))))
        } else {
            let shift = -e2;
            if shift > 126 {
                return None;
            }
            Some(Rat(Ratio::new(sign * mant, 1i128 << shift)))
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRatError(pub String);

impl fmt::Display for ParseRatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational: {}", self.0)
    }
}

impl std::error::Error for ParseRatError {}

impl FromStr for Rat {
    type Err = ParseRatError;

    /// Accepts `"12"`, `"-3/4"` and decimal strings like `"2.5"`.
    fn from_str(s: &str) -> Result<Rat, ParseRatError> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let n: i128 = num.trim().parse().map_err(|_| ParseRatError(s.into()))?;
            let d: i128 = den.trim().parse().map_err(|_| ParseRatError(s.into()))?;
            if d == 0 {
                return Err(ParseRatError(s.into()));
            }
            return Ok(Rat(Ratio::new(n, d)));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let negative = int_part.trim_start().starts_with('-');
            let i: i128 = if int_part.is_empty() || int_part == "-" {
                0
            } else {
                int_part.parse().map_err(|_| ParseRatError(s.into()))?
            };
            if frac_part.is_empty() || frac_part.len() > 27 {
                return Err(ParseRatError(s.into()));
            }
            let f: i128 = frac_part.parse().map_err(|_| ParseRatError(s.into()))?;
            if f < 0 {
                return Err(ParseRatError(s.into()));
            }
            let scale = 10i128.pow(frac_part.len() as u32);
            let frac = Ratio::new(f, scale);
            let whole = Ratio::from_integer(i.abs());
            let mag = whole + frac;
            return Ok(Rat(if negative || i < 0 { -mag } else { mag }));
        }
        let n: i128 = s.parse().map_err(|_| ParseRatError(s.into()))?;
        Ok(Rat(Ratio::from_integer(n)))
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        Rat(self.0 + rhs.0)
    }
}

impl AddAssign for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl Sub for Rat {
    type Output = Rat;
    fn sub(self, rhs: Rat) -> Rat {
        Rat(self.0 - rhs.0)
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        Rat(self.0 * rhs.0)
    }
}

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        Rat(self.0 / rhs.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.is_integer() {
            let n = self.numer();
            if n >= i64::MIN as i128 && n <= i64::MAX as i128 {
                return serializer.serialize_i64(n as i64);
            }
        }
        serializer.serialize_str(&self.to_string())
    }
}

struct RatVisitor;

impl Visitor<'_> for RatVisitor {
    type Value = Rat;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("an integer, a \"p/q\" string, or a decimal string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
        Ok(Rat::int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
        Ok(Rat(Ratio::from_integer(v as i128)))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rat, E> {
        Rat::from_f64_exact(v)
            .ok_or_else(|| E::custom(format!("non-finite or out-of-range number {v}")))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Rat, E> {
        v.parse().map_err(|e: ParseRatError| E::custom(e))
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Rat, D::Error> {
        deserializer.deserialize_any(RatVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!("7".parse::<Rat>().unwrap(), Rat::int(7));
        assert_eq!("-3/4".parse::<Rat>().unwrap(), Rat::new(-3, 4));
        assert_eq!("2.5".parse::<Rat>().unwrap(), Rat::new(5, 2));
        assert_eq!("-0.25".parse::<Rat>().unwrap(), Rat::new(-1, 4));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
    }

    #[test]
    fn display_round_trip() {
        for r in [Rat::int(3), Rat::new(7, 2), Rat::new(-1, 3), Rat::zero()] {
            assert_eq!(r.to_string().parse::<Rat>().unwrap(), r);
        }
    }

    #[test]
    fn f64_exact() {
        assert_eq!(Rat::from_f64_exact(1.5).unwrap(), Rat::new(3, 2));
        assert_eq!(Rat::from_f64_exact(-0.75).unwrap(), Rat::new(-3, 4));
        assert_eq!(Rat::from_f64_exact(0.0).unwrap(), Rat::zero());
        assert!(Rat::from_f64_exact(f64::NAN).is_none());
    }

    #[test]
    fn json_round_trip() {
        let r: Rat = serde_json::from_str("5").unwrap();
        assert_eq!(r, Rat::int(5));
        let r: Rat = serde_json::from_str("\"5/3\"").unwrap();
        assert_eq!(r, Rat::new(5, 3));
        assert_eq!(serde_json::to_string(&Rat::new(5, 3)).unwrap(), "\"5/3\"");
        assert_eq!(serde_json::to_string(&Rat::int(4)).unwrap(), "4");
    }
}
