//! Linear liftings for elementary integer maps where the Koopman state is
//! smaller than the sequence's linear complexity.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::TurnFraction;

/// Affine map `x ↦ m x + a` as the 2-dimensional linear system
/// `z_{k+1} = [[m, 1], [0, 1]] z_k` on `z = (x, a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineLift {
    pub matrix: [[BigInt; 2]; 2],
    pub z0: [BigInt; 2],
}

pub fn affine_augment_system(m: &BigInt, a: &BigInt, x0: &BigInt) -> AffineLift {
    AffineLift {
        matrix: [[m.clone(), BigInt::from(1)], [BigInt::zero(), BigInt::from(1)]],
        z0: [x0.clone(), a.clone()],
    }
}

impl AffineLift {
    pub fn step(&self, z: &[BigInt; 2]) -> [BigInt; 2] {
        let a = &self.matrix;
        [
            &a[0][0] * &z[0] + &a[0][1] * &z[1],
            &a[1][0] * &z[0] + &a[1][1] * &z[1],
        ]
    }

    pub fn recover(z: &[BigInt; 2]) -> BigInt {
        z[0].clone()
    }

    /// First `n` states `x_0, …, x_{n-1}`.
    pub fn generate(&self, n: usize) -> Vec<BigInt> {
        let mut z = self.z0.clone();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(Self::recover(&z));
            z = self.step(&z);
        }
        out
    }
}

/// Scalar complex lifting of `x ↦ x + 1 mod n`: `z = exp(i·2π·x/n)` evolves
/// as `z_{k+1} = exp(i·2π/n)·z_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditiveLift {
    pub modulus: BigUint,
    pub multiplier: TurnFraction,
    pub z0: TurnFraction,
}

pub fn additive_complex_lift(modulus: &BigUint, x0: &BigUint) -> Result<AdditiveLift> {
    if modulus.is_zero() {
        return Err(Error::InvalidParameter("modulus must be positive".into()));
    }
    let n = BigInt::from(modulus.clone());
    Ok(AdditiveLift {
        modulus: modulus.clone(),
        multiplier: TurnFraction::new(1, n.clone()),
        z0: TurnFraction::new(BigInt::from(x0.clone()), n),
    })
}

impl AdditiveLift {
    pub fn dimension(&self) -> usize {
        1
    }

    pub fn step(&self, z: &TurnFraction) -> TurnFraction {
        z + &self.multiplier
    }

    /// `x = angle · n / 2π`, exact on the rational-angle representation.
    pub fn recover(&self, z: &TurnFraction) -> BigUint {
        let x = z.as_rational() * BigInt::from(self.modulus.clone());
        debug_assert!(x.is_integer());
        x.to_integer()
            .mod_floor(&BigInt::from(self.modulus.clone()))
            .to_biguint()
            .expect("nonnegative after mod_floor")
    }

    /// Recovery from a floating point on the circle via the principal angle.
    pub fn recover_complex(&self, z: Complex64) -> BigUint {
        let n = self.modulus.to_f64().unwrap_or(f64::INFINITY);
        let k = (z.arg() * n / std::f64::consts::TAU).round() as i64;
        let n_int = BigInt::from(self.modulus.clone());
        BigInt::from(k).mod_floor(&n_int).to_biguint().expect("nonnegative")
    }

    pub fn generate(&self, steps: usize) -> Vec<BigUint> {
        let mut z = self.z0.clone();
        let mut out = Vec::with_capacity(steps);
        for _ in 0..steps {
            out.push(self.recover(&z));
            z = self.step(&z);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn bu(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn affine_examples() {
        let s = affine_augment_system(&2.into(), &2.into(), &1.into());
        assert_eq!(s.generate(5), bi(&[1, 4, 10, 22, 46]));
        let s = affine_augment_system(&1.into(), &0.into(), &7.into());
        assert_eq!(s.generate(4), bi(&[7, 7, 7, 7]));
        let s = affine_augment_system(&3.into(), &1.into(), &0.into());
        assert_eq!(s.generate(4), bi(&[0, 1, 4, 13]));
    }

    #[test]
    fn additive_examples() {
        let l = additive_complex_lift(&3u32.into(), &0u32.into()).unwrap();
        assert_eq!(l.dimension(), 1);
        assert_eq!(l.generate(6), bu(&[0, 1, 2, 0, 1, 2]));
        let l = additive_complex_lift(&4u32.into(), &0u32.into()).unwrap();
        assert_eq!(l.generate(5), bu(&[0, 1, 2, 3, 0]));
        assert!(additive_complex_lift(&0u32.into(), &0u32.into()).is_err());
    }

    #[test]
    fn floating_recovery_uses_principal_angle() {
        let l = additive_complex_lift(&3u32.into(), &0u32.into()).unwrap();
        let mut z = l.z0.to_complex();
        let w = l.multiplier.to_complex();
        for k in 0..9u64 {
            assert_eq!(l.recover_complex(z), BigUint::from(k % 3));
            z *= w;
        }
    }
}
