//! Exact nonnegative rationals used for every probability and weight.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Prob(BigRational);

impl Prob {
    pub fn zero() -> Self {
        Prob(BigRational::zero())
    }

    pub fn one() -> Self {
        Prob(BigRational::one())
    }

    /// `num/den`; panics if `den` is 0.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        Prob(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        assert!(!r.is_negative(), "negative probability");
        Prob(r)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// `1 - self`, saturating at 0.
    pub fn complement(&self) -> Prob {
        if self.0 >= BigRational::one() {
            Prob::zero()
        } else {
            Prob(BigRational::one() - &self.0)
        }
    }

    /// Absolute difference.
    pub fn distance(&self, other: &Prob) -> Prob {
        Prob((&self.0 - &other.0).abs())
    }

    /// Decimal expansion truncated to `digits` places.
    pub fn to_decimal(&self, digits: usize) -> String {
        let num = self.0.numer().clone();
        let den = self.0.denom().clone();
        let int = &num / &den;
        let mut rem = &num % &den;
        let mut s = format!("{int}.");
        for _ in 0..digits {
            rem *= 10;
            s.push_str(&(&rem / &den).to_string());
            rem %= &den;
        }
        s
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Prob {
    type Err = String;

    /// Accepts `n`, `n/d`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |x: &str| {
            x.trim()
                .parse::<BigInt>()
                .map_err(|e| format!("bad rational `{s}`: {e}"))
        };
        let r = match s.split_once('/') {
            Some((n, d)) => {
                let d = parse(d)?;
                if d.is_zero() {
                    return Err(format!("bad rational `{s}`: zero denominator"));
                }
                BigRational::new(parse(n)?, d)
            }
            None => BigRational::from_integer(parse(s)?),
        };
        if r.is_negative() {
            return Err(format!("bad rational `{s}`: negative"));
        }
        Ok(Prob(r))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Prob> for &Prob {
            type Output = Prob;
            fn $m(self, rhs: &Prob) -> Prob {
                Prob((&self.0).$m(&rhs.0))
            }
        }
        impl $tr<Prob> for Prob {
            type Output = Prob;
            fn $m(self, rhs: Prob) -> Prob {
                Prob(self.0.$m(rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Mul, mul);
binop!(Div, div);

impl Sub<&Prob> for &Prob {
    type Output = Prob;
    /// Panics if the result would be negative.
    fn sub(self, rhs: &Prob) -> Prob {
        Prob::from_rational(&self.0 - &rhs.0)
    }
}

impl AddAssign<&Prob> for Prob {
    fn add_assign(&mut self, rhs: &Prob) {
        self.0 += &rhs.0;
    }
}

impl<'a> Sum<&'a Prob> for Prob {
    fn sum<I: Iterator<Item = &'a Prob>>(iter: I) -> Prob {
        let mut acc = Prob::zero();
        for p in iter {
            acc += p;
        }
        acc
    }
}

impl Sum<Prob> for Prob {
    fn sum<I: Iterator<Item = Prob>>(iter: I) -> Prob {
        let mut acc = Prob::zero();
        for p in iter {
            acc += &p;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_exact() {
        let a = Prob::new(1, 2) * Prob::new(1, 4) + Prob::new(1, 2) * Prob::new(1, 9);
        assert_eq!(a, Prob::new(13, 72));
        assert_eq!(a.to_string(), "13/72");
        assert_eq!("26/144".parse::<Prob>().unwrap(), a);
        assert_eq!("1".parse::<Prob>().unwrap(), Prob::one());
        assert!("1/0".parse::<Prob>().is_err());
    }

    #[test]
    fn decimal_expansion() {
        assert_eq!(Prob::new(13, 72).to_decimal(6), "0.180555");
        assert_eq!(Prob::one().to_decimal(2), "1.00");
    }

    #[test]
    fn complement_saturates() {
        assert_eq!(Prob::new(1, 3).complement(), Prob::new(2, 3));
        assert_eq!(Prob::one().complement(), Prob::zero());
    }
}
