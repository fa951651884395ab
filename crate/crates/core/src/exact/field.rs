use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// The exact field a computation runs over.
///
/// Elements are always carried as [`BigRational`]; in prime-field mode they
/// are integers reduced into `[0, p-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rational,
    Prime(BigUint),
}

impl FieldKind {
    pub fn prime(p: impl Into<BigUint>) -> Result<Self> {
        let p = p.into();
        if !crate::modular::is_prime(&p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        Ok(FieldKind::Prime(p))
    }

    /// Maps an arbitrary rational into canonical field form.
    pub fn normalize(&self, x: &BigRational) -> Result<BigRational> {
        match self {
            FieldKind::Rational => Ok(x.clone()),
            FieldKind::Prime(p) => {
                let p = BigInt::from(p.clone());
                let num = x.numer().mod_floor(&p);
                let den = x.denom().mod_floor(&p);
                if den.is_zero() {
                    return Err(Error::InvalidParameter(format!(
                        "denominator of {x} vanishes modulo {p}"
                    )));
                }
                let inv = mod_inverse(&den, &p).expect("prime modulus");
                Ok(BigRational::from_integer((num * inv).mod_floor(&p)))
            }
        }
    }

    fn reduce(&self, x: BigRational) -> BigRational {
        match self {
            FieldKind::Rational => x,
            FieldKind::Prime(p) => {
                debug_assert!(x.is_integer());
                BigRational::from_integer(x.to_integer().mod_floor(&BigInt::from(p.clone())))
            }
        }
    }

    pub fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        self.reduce(a + b)
    }

    pub fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        self.reduce(a - b)
    }

    pub fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        self.reduce(a * b)
    }

    pub fn neg(&self, a: &BigRational) -> BigRational {
        self.reduce(-a)
    }

    pub fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            return None;
        }
        match self {
            FieldKind::Rational => Some(a.recip()),
            FieldKind::Prime(p) => {
                let p = BigInt::from(p.clone());
                mod_inverse(&a.to_integer(), &p).map(BigRational::from_integer)
            }
        }
    }

    /// Pivot preference during elimination. Rationals prefer the largest
    /// numerator magnitude; any nonzero residue is as good as another.
    pub fn pivot_weight(&self, a: &BigRational) -> BigInt {
        match self {
            FieldKind::Rational => a.numer().abs(),
            FieldKind::Prime(_) => {
                if a.is_zero() {
                    BigInt::zero()
                } else {
                    BigInt::one()
                }
            }
        }
    }
}

/// Inverse of `a` modulo `m` via the extended Euclidean algorithm.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.mod_floor(m).extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}
