//! Exact arithmetic over dyadic rationals (numerator / 2^exponent).
//!
//! Every coefficient produced by expanding a clause's inconsistency cost is
//! dyadic, so the whole compile/learn/relax pipeline runs on this type with
//! no rounding anywhere. General (non-dyadic) exact values, which only show
//! up in tolerances and per-order tensor reporting, use [`Rational`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Exact rational for tolerances and reporting; dyadics convert in losslessly.
pub type Rational = num_rational::Ratio<i128>;

/// A rational with a power-of-two denominator, kept in canonical form:
/// the numerator is odd whenever the exponent is positive, and zero is
/// always stored as `0/2^0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numerator: i128,
    exponent: u32,
}

impl DyadicRational {
    pub const ZERO: DyadicRational = DyadicRational { numerator: 0, exponent: 0 };
    pub const ONE: DyadicRational = DyadicRational { numerator: 1, exponent: 0 };

    /// `numerator / 2^exponent`, normalized.
    pub fn new(numerator: i128, exponent: u32) -> Self {
        let mut d = DyadicRational { numerator, exponent };
        d.normalize();
        d
    }

    pub fn from_int(n: i128) -> Self {
        DyadicRational { numerator: n, exponent: 0 }
    }

    /// `1 / 2^k`.
    pub fn half_pow(k: u32) -> Self {
        DyadicRational { numerator: 1, exponent: k }
    }

    fn normalize(&mut self) {
        if self.numerator == 0 {
            self.exponent = 0;
            return;
        }
        while self.exponent > 0 && self.numerator % 2 == 0 {
            self.numerator /= 2;
            self.exponent -= 1;
        }
    }

    pub fn numerator(&self) -> i128 {
        self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    /// Sign of the value: -1, 0, or +1.
    pub fn signum(&self) -> i8 {
        self.numerator.signum() as i8
    }

    /// Exact division by 2^k.
    pub fn div_pow2(&self, k: u32) -> Self {
        DyadicRational::new(self.numerator, self.exponent + k)
    }

    pub fn abs(&self) -> Self {
        DyadicRational { numerator: self.numerator.abs(), exponent: self.exponent }
    }

    /// Lossless conversion for tolerance comparisons and reporting.
    pub fn to_rational(&self) -> Rational {
        let den: i128 = 1i128
            .checked_shl(self.exponent)
            .expect("dyadic exponent exceeds i128 range");
        Rational::new(self.numerator, den)
    }

    /// Approximate value for CSV/plot emission only.
    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 * (-(self.exponent as f64)).exp2()
    }
}

impl std::ops::Neg for DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        DyadicRational { numerator: -self.numerator, exponent: self.exponent }
    }
}

impl std::ops::Add for DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: DyadicRational) -> DyadicRational {
        let exponent = self.exponent.max(rhs.exponent);
        let a = shl_checked(self.numerator, exponent - self.exponent);
        let b = shl_checked(rhs.numerator, exponent - rhs.exponent);
        DyadicRational::new(a.checked_add(b).expect("dyadic addition overflow"), exponent)
    }
}

impl std::ops::Sub for DyadicRational {
    type Output = DyadicRational;
    fn sub(self, rhs: DyadicRational) -> DyadicRational {
        self + (-rhs)
    }
}

impl std::ops::Mul for DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: DyadicRational) -> DyadicRational {
        DyadicRational::new(
            self.numerator
                .checked_mul(rhs.numerator)
                .expect("dyadic multiplication overflow"),
            self.exponent + rhs.exponent,
        )
    }
}

impl std::ops::AddAssign for DyadicRational {
    fn add_assign(&mut self, rhs: DyadicRational) {
        *self = *self + rhs;
    }
}

fn shl_checked(n: i128, k: u32) -> i128 {
    if n == 0 {
        return 0;
    }
    n.checked_shl(k)
        .filter(|v| v >> k == n)
        .expect("dyadic exponent alignment overflow")
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        (*self - *other).numerator.cmp(&0)
    }
}

/// Weights-file rendering: `numerator/2^exponent` with the denominator spelled
/// out as a decimal power of two, e.g. `-3/8` or `0/1`.
impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den: u128 = 1u128
            .checked_shl(self.exponent)
            .expect("dyadic exponent too large to print");
        write!(f, "{}/{}", self.numerator, den)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DyadicParseError {
    #[error("expected `numerator/denominator`, got `{0}`")]
    Malformed(String),
    #[error("invalid integer in `{0}`")]
    BadInteger(String),
    #[error("denominator {0} is not a power of two")]
    NotPowerOfTwo(u128),
}

impl FromStr for DyadicRational {
    type Err = DyadicParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num, den) = s
            .split_once('/')
            .ok_or_else(|| DyadicParseError::Malformed(s.to_string()))?;
        let numerator: i128 = num
            .trim()
            .parse()
            .map_err(|_| DyadicParseError::BadInteger(s.to_string()))?;
        let den: u128 = den
            .trim()
            .parse()
            .map_err(|_| DyadicParseError::BadInteger(s.to_string()))?;
        if den == 0 || !den.is_power_of_two() {
            return Err(DyadicParseError::NotPowerOfTwo(den));
        }
        Ok(DyadicRational::new(numerator, den.trailing_zeros()))
    }
}
