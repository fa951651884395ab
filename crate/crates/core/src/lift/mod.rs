//! Observable dictionaries and companion-form linear representations of the
//! modular dynamics.
//!
//! With shift observables `h_j(x_k) = x_{k+j}` the lifted state evolves as
//! `z_{k+1} = A z_k` for a companion matrix `A` whose last row holds the
//! closing coefficients `α`. [`closing`] contains the exact machinery that
//! decides which `α` (if any) close the recurrence for a given order `q`.

pub mod closing;
pub mod elementary;

pub use closing::{
    canonical_alpha, closing_holds_over, full_period_system, hankel_system,
    index_lookup_attack, minimal_lifting_dimension, solve_alpha_exact, verify_closing,
    HankelSystem,
};
pub use elementary::{additive_complex_lift, affine_augment_system, AdditiveLift, AffineLift};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{RatMatrix, TurnFraction};
use crate::modular::{mod_pow, DhParams, ModTrajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DictionaryKind {
    Shift,
    ComplexExp,
    AffineAugment,
    AdditiveComplex,
}

/// A finite collection of observables defining a lifting map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObservableDictionary {
    /// `h_j(x_k) = x_{k+j}`, `j = 0..=q`.
    Shift { q: usize },
    /// `h_j(x) = exp(i·2π/p·m^{j+1}·x)`, `j = 0..=q`.
    ComplexExp { params: DhParams, q: usize },
    /// `z = (x, a)` for the affine map `x ↦ m x + a`.
    AffineAugment { m: BigInt, a: BigInt },
    /// `z = exp(i·2π/n·x)` for `x ↦ x + 1 mod n`.
    AdditiveComplex { modulus: BigUint },
}

impl ObservableDictionary {
    pub fn kind(&self) -> DictionaryKind {
        match self {
            ObservableDictionary::Shift { .. } => DictionaryKind::Shift,
            ObservableDictionary::ComplexExp { .. } => DictionaryKind::ComplexExp,
            ObservableDictionary::AffineAugment { .. } => DictionaryKind::AffineAugment,
            ObservableDictionary::AdditiveComplex { .. } => DictionaryKind::AdditiveComplex,
        }
    }

    /// Lifted state dimension.
    pub fn dimension(&self) -> usize {
        match self {
            ObservableDictionary::Shift { q } | ObservableDictionary::ComplexExp { q, .. } => q + 1,
            ObservableDictionary::AffineAugment { .. } => 2,
            ObservableDictionary::AdditiveComplex { .. } => 1,
        }
    }
}

/// `(x_k, x_{k+1}, …, x_{k+q})`, extending the trajectory through its own
/// dynamics where it is too short.
pub fn lift_shift(traj: &ModTrajectory, q: usize, k: usize) -> Vec<BigUint> {
    (k..=k + q).map(|i| traj.state(i)).collect()
}

/// Lifts an observed ciphertext `c = x_e` by iterating the public map:
/// `(c, m c, m² c, …, m^q c) mod p`.
pub fn lift_ciphertext(c: &BigUint, params: &DhParams, q: usize) -> Result<Vec<BigUint>> {
    let p = params.p();
    if c.is_zero() || c >= p {
        return Err(Error::InvalidParameter(format!("ciphertext {c} outside [1, {}]", p - 1u32)));
    }
    let mut out = Vec::with_capacity(q + 1);
    let mut x = c.clone();
    for _ in 0..=q {
        out.push(x.clone());
        x = x * params.m() % p;
    }
    Ok(out)
}

/// Complex-exponential observables, with each angle kept exactly as the
/// fraction `(m^{j+1} x mod p) / p` of a turn.
pub fn lift_complex(x: &BigUint, params: &DhParams, q: usize) -> Result<Vec<TurnFraction>> {
    let p = params.p();
    if x.is_zero() || x >= p {
        return Err(Error::InvalidParameter(format!("state {x} outside [1, {}]", p - 1u32)));
    }
    let mut out = Vec::with_capacity(q + 1);
    let mut coeff = mod_pow(params.m(), &BigUint::one(), p)? * x % p;
    for _ in 0..=q {
        out.push(TurnFraction::new(BigInt::from(coeff.clone()), BigInt::from(p.clone())));
        coeff = coeff * params.m() % p;
    }
    Ok(out)
}

/// Companion-form linear system: the first `q` rows shift, the last row is
/// `αᵀ`, so `x_{k+q+1} = Σ_j α_j x_{k+j}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompanionSystem {
    #[serde(serialize_with = "crate::io::ser_rational_seq")]
    alpha: Vec<BigRational>,
}

impl CompanionSystem {
    pub fn new(alpha: Vec<BigRational>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidParameter("empty coefficient vector".into()));
        }
        Ok(CompanionSystem { alpha })
    }

    pub fn alpha(&self) -> &[BigRational] {
        &self.alpha
    }

    pub fn q(&self) -> usize {
        self.alpha.len() - 1
    }

    pub fn dimension(&self) -> usize {
        self.alpha.len()
    }

    pub fn matrix(&self) -> RatMatrix {
        let n = self.dimension();
        let mut a = RatMatrix::zeros(n, n);
        for i in 0..n - 1 {
            a[(i, i + 1)] = BigRational::one();
        }
        for (j, v) in self.alpha.iter().enumerate() {
            a[(n - 1, j)] = v.clone();
        }
        a
    }

    /// Coefficients of `λ^{q+1} − Σ_j α_j λ^j`, lowest degree first.
    pub fn characteristic_polynomial(&self) -> Vec<BigRational> {
        let mut c: Vec<BigRational> = self.alpha.iter().map(|a| -a).collect();
        c.push(BigRational::one());
        c
    }

    /// One step `A z` without forming the matrix.
    pub fn step(&self, z: &[BigRational]) -> Result<Vec<BigRational>> {
        if z.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                actual: z.len(),
            });
        }
        let last = self
            .alpha
            .iter()
            .zip(z)
            .fold(BigRational::zero(), |acc, (a, x)| acc + a * x);
        let mut next = z[1..].to_vec();
        next.push(last);
        Ok(next)
    }
}

pub(crate) fn to_rationals(v: &[BigUint]) -> Vec<BigRational> {
    v.iter().map(crate::exact::rat).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ri;
    use crate::modular::simulate;

    fn u(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn us(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| u(x)).collect()
    }

    #[test]
    fn shift_lift_examples() {
        let p5 = DhParams::new(5u32, 2u32).unwrap();
        let p7 = DhParams::new(7u32, 3u32).unwrap();
        let t5 = p5.base_trajectory().unwrap();
        let t7 = p7.base_trajectory().unwrap();
        assert_eq!(lift_shift(&t5, 2, 0), us(&[1, 2, 4]));
        assert_eq!(lift_shift(&t7, 3, 0), us(&[1, 3, 2, 6]));
        assert_eq!(lift_shift(&t7, 0, 4), us(&[4]));
        // wraps past the stored period
        assert_eq!(lift_shift(&t5, 2, 3), us(&[3, 1, 2]));
    }

    #[test]
    fn ciphertext_lift_examples() {
        let p7 = DhParams::new(7u32, 3u32).unwrap();
        let p5 = DhParams::new(5u32, 2u32).unwrap();
        assert_eq!(lift_ciphertext(&u(4), &p7, 3).unwrap(), us(&[4, 5, 1, 3]));
        assert_eq!(lift_ciphertext(&u(3), &p5, 2).unwrap(), us(&[3, 1, 2]));
        let t = simulate(p7.m(), &p7, &u(1), 6).unwrap();
        assert_eq!(lift_ciphertext(&u(1), &p7, 3).unwrap(), lift_shift(&t, 3, 0));
        assert!(lift_ciphertext(&u(0), &p7, 3).is_err());
        assert!(lift_ciphertext(&u(7), &p7, 3).is_err());
    }

    #[test]
    fn complex_lift_examples() {
        let p5 = DhParams::new(5u32, 2u32).unwrap();
        let h = lift_complex(&u(1), &p5, 1).unwrap();
        assert_eq!(h, vec![TurnFraction::new(2, 5), TurnFraction::new(4, 5)]);
        let h2 = lift_complex(&u(2), &p5, 1).unwrap();
        assert_eq!(h2[0], h[1]);
        for z in h.iter().map(TurnFraction::to_complex) {
            assert!((z.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn companion_structure() {
        let sys = CompanionSystem::new(vec![ri(1), ri(-1), ri(1)]).unwrap();
        let a = sys.matrix();
        assert_eq!(a.row(0), &[ri(0), ri(1), ri(0)]);
        assert_eq!(a.row(1), &[ri(0), ri(0), ri(1)]);
        assert_eq!(a.row(2), &[ri(1), ri(-1), ri(1)]);
        assert_eq!(sys.characteristic_polynomial(), vec![ri(-1), ri(1), ri(-1), ri(1)]);
        let z = vec![ri(1), ri(2), ri(4)];
        assert_eq!(sys.step(&z).unwrap(), a.mul_vec(&z).unwrap());
        assert!(sys.step(&z[..2]).is_err());
        assert!(CompanionSystem::new(vec![]).is_err());
    }

    #[test]
    fn dictionary_dimensions() {
        let p5 = DhParams::new(5u32, 2u32).unwrap();
        assert_eq!(ObservableDictionary::Shift { q: 2 }.dimension(), 3);
        assert_eq!(ObservableDictionary::ComplexExp { params: p5, q: 4 }.dimension(), 5);
        let aff = ObservableDictionary::AffineAugment { m: 2.into(), a: 2.into() };
        assert_eq!((aff.kind(), aff.dimension()), (DictionaryKind::AffineAugment, 2));
        assert_eq!(ObservableDictionary::AdditiveComplex { modulus: u(3) }.dimension(), 1);
    }
}
