use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// An angle stored exactly as a fraction of a full turn, reduced into `[0, 1)`.
///
/// `TurnFraction::new(1, 4)` is the angle `π/2`; its point on the unit circle
/// is `i`. Equality is exact, so periodicity identities on the circle can be
/// asserted without tolerances.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TurnFraction(BigRational);

impl TurnFraction {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_rational(r: BigRational) -> Self {
        let den = r.denom().clone();
        let num = r.numer().mod_floor(&den);
        TurnFraction(BigRational::new(num, den))
    }

    pub fn zero() -> Self {
        TurnFraction(BigRational::zero())
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Reduced denominator: the multiplicative order of the corresponding
    /// root of unity.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// `k`-fold angle, i.e. the `k`-th power of the root of unity.
    pub fn times(&self, k: impl Into<BigInt>) -> Self {
        Self::from_rational(&self.0 * BigRational::from_integer(k.into()))
    }

    pub fn neg(&self) -> Self {
        Self::from_rational(-self.0.clone())
    }

    /// Angle in radians within `[0, 2π)`.
    pub fn radians(&self) -> f64 {
        // numerator < denominator, so the quotient is well conditioned
        let num = self.0.numer().to_f64().unwrap_or(f64::NAN);
        let den = self.0.denom().to_f64().unwrap_or(f64::NAN);
        std::f64::consts::TAU * num / den
    }

    /// Floating mirror: the point `exp(i·2π·self)`.
    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.radians())
    }
}

impl Add for &TurnFraction {
    type Output = TurnFraction;

    fn add(self, rhs: &TurnFraction) -> TurnFraction {
        TurnFraction::from_rational(&self.0 + &rhs.0)
    }
}

impl fmt::Debug for TurnFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} turn", self.0.numer(), self.0.denom())
    }
}

impl fmt::Display for TurnFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}
