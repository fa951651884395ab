//! Exact arithmetic in the cyclotomic field `Q(ζ_n)`, with elements stored
//! as polynomials in `ζ_n` reduced modulo the `n`-th cyclotomic polynomial.
//! Representations are canonical, so equality of sums of roots of unity is
//! decided exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::turn::TurnFraction;
use crate::error::{Error, Result};

/// The ring `Q(ζ_n)` with its defining polynomial.
#[derive(Debug, Clone)]
pub struct CyclotomicRing {
    n: usize,
    /// Φ_n, low degree first, monic.
    phi: Vec<BigInt>,
}

/// An element of a [`CyclotomicRing`]: coefficients of `1, ζ, …, ζ^{φ(n)-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cyclotomic {
    coeffs: Vec<BigRational>,
}

/// `n`-th cyclotomic polynomial, coefficients low degree first.
pub fn cyclotomic_polynomial(n: usize) -> Vec<BigInt> {
    assert!(n >= 1, "cyclotomic polynomial of order 0");
    // x^n - 1
    let mut num = vec![BigInt::zero(); n + 1];
    num[0] = BigInt::from(-1);
    num[n] = BigInt::one();
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        num = div_monic(&num, &cyclotomic_polynomial(d));
    }
    num
}

/// Exact quotient of `a` by a monic `b`; panics if the division is not exact.
fn div_monic(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    if rem.len() <= db {
        return vec![BigInt::zero()];
    }
    let mut q = vec![BigInt::zero(); rem.len() - db];
    for i in (0..q.len()).rev() {
        let c = rem[i + db].clone();
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    assert!(rem.iter().all(Zero::is_zero), "inexact cyclotomic division");
    q
}

impl CyclotomicRing {
    pub fn new(n: usize) -> Self {
        CyclotomicRing {
            n,
            phi: cyclotomic_polynomial(n),
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Degree of the field over Q, i.e. Euler's totient of `n`.
    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn zero(&self) -> Cyclotomic {
        Cyclotomic {
            coeffs: vec![BigRational::zero(); self.degree()],
        }
    }

    pub fn from_rational(&self, r: BigRational) -> Cyclotomic {
        let mut z = self.zero();
        z.coeffs[0] = r;
        z
    }

    /// `ζ_n^k` for any integer `k`.
    pub fn root_power(&self, k: i64) -> Cyclotomic {
        let k = k.mod_floor(&(self.n as i64)) as usize;
        let mut poly = vec![BigRational::zero(); k + 1];
        poly[k] = BigRational::one();
        self.reduce(poly)
    }

    /// The point `exp(2πi·t)`, which must be an `n`-th root of unity.
    pub fn from_turn(&self, t: &TurnFraction) -> Result<Cyclotomic> {
        let den = t.denom().to_usize().unwrap_or(0);
        if den == 0 || !self.n.is_multiple_of(den) {
            return Err(Error::InvalidParameter(format!(
                "angle {t} is not an {}-th root of unity",
                self.n
            )));
        }
        let k = t.numer().to_i64().expect("reduced numerator") * (self.n / den) as i64;
        Ok(self.root_power(k))
    }

    fn reduce(&self, mut poly: Vec<BigRational>) -> Cyclotomic {
        let d = self.degree();
        while poly.len() > d {
            let top = poly.pop().expect("nonempty");
            if top.is_zero() {
                continue;
            }
            let shift = poly.len() - d;
            for (j, pj) in self.phi[..d].iter().enumerate() {
                poly[shift + j] -= &top * BigRational::from_integer(pj.clone());
            }
        }
        poly.resize(d, BigRational::zero());
        Cyclotomic { coeffs: poly }
    }

    pub fn add(&self, a: &Cyclotomic, b: &Cyclotomic) -> Cyclotomic {
        Cyclotomic {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, a: &Cyclotomic, b: &Cyclotomic) -> Cyclotomic {
        Cyclotomic {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn scale(&self, a: &Cyclotomic, s: &BigRational) -> Cyclotomic {
        Cyclotomic {
            coeffs: a.coeffs.iter().map(|x| x * s).collect(),
        }
    }

    pub fn mul(&self, a: &Cyclotomic, b: &Cyclotomic) -> Cyclotomic {
        let d = self.degree();
        let mut prod = vec![BigRational::zero(); 2 * d];
        for (i, x) in a.coeffs.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.coeffs.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        self.reduce(prod)
    }
}

impl Cyclotomic {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }
}
