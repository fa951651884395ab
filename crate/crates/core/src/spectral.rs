//! Analytic eigendecomposition of the canonical companion matrix and
//! recovery of the secret exponent from lifted initial and terminal states.
//!
//! At `q = (p-1)/2` the canonical characteristic polynomial factors as
//! `(λ^q + 1)(λ − 1)`, so the spectrum is `λ = 1` together with the odd
//! `2q`-th roots of unity. Eigenvalues are kept exactly as fractions of a
//! turn; the Vandermonde eigenvector matrix and its inverse live in a
//! floating mirror.
//!
//! Recovery compares `z̃_{e,j} / z̃_{0,j}` against the distinct powers of
//! `λ_j` instead of dividing angles, which turns the branch index search
//! into a residue `e ≡ t_j (mod ord λ_j)` per eigenvalue. The residues are
//! then merged with the Chinese remainder theorem.

use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::cyclotomic::CyclotomicRing;
use crate::exact::TurnFraction;
use crate::lift::{canonical_alpha, CompanionSystem};
use crate::modular::to_index;

/// Transformed coordinates below this fraction of the largest one are
/// treated as zero.
pub const DEGENERATE_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    q: usize,
    system: CompanionSystem,
    eigenvalues: Vec<TurnFraction>,
    v: DMatrix<Complex64>,
    vinv: DMatrix<Complex64>,
}

/// `z̃ = V⁻¹ z`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedState {
    pub entries: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    Unavailable,
}

/// Residue constraint contributed by one eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidueMatch {
    pub eigen_index: usize,
    /// Multiplicative order of the eigenvalue; the constraint is `e ≡ t`
    /// modulo this.
    pub order: usize,
    pub t: usize,
    #[serde(serialize_with = "crate::io::ser_f64_15")]
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentEstimate {
    #[serde(serialize_with = "crate::io::ser_display")]
    pub e: BigUint,
    pub residues: Vec<ResidueMatch>,
    pub parity: Parity,
}

/// Spectrum and Vandermonde eigenvectors of the canonical companion system
/// of order `q = (p-1)/2`.
///
/// Above that order the canonical polynomial picks up a factor `λ^{q-q̃}`
/// and the companion matrix is no longer diagonalizable, so any other `q`
/// is rejected.
pub fn eigen_canonical(p: &BigUint, q: usize) -> Result<SpectralDecomposition> {
    let half = to_index(&((p - 1u32) >> 1))?;
    if q == 0 {
        return Err(Error::InvalidParameter("order must be at least 1".into()));
    }
    if q != half {
        return Err(Error::NonCanonical(format!(
            "analytic spectrum is only available at q = {half} for p = {p}, got q = {q}"
        )));
    }
    let system = CompanionSystem::new(canonical_alpha(p, q)?)?;
    let two_q = BigInt::from(2 * q);
    let mut eigenvalues = vec![TurnFraction::zero()];
    eigenvalues.extend((0..q).map(|k| TurnFraction::new(BigInt::from(2 * k + 1), two_q.clone())));

    let n = q + 1;
    let v = DMatrix::from_fn(n, n, |i, j| eigenvalues[j].times(i).to_complex());
    let vinv = v
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Internal("Vandermonde matrix is singular".into()))?;
    Ok(SpectralDecomposition {
        q,
        system,
        eigenvalues,
        v,
        vinv,
    })
}

impl SpectralDecomposition {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn system(&self) -> &CompanionSystem {
        &self.system
    }

    pub fn eigenvalues(&self) -> &[TurnFraction] {
        &self.eigenvalues
    }

    pub fn eigenvalues_f64(&self) -> Vec<Complex64> {
        self.eigenvalues.iter().map(TurnFraction::to_complex).collect()
    }

    pub fn vandermonde(&self) -> &DMatrix<Complex64> {
        &self.v
    }

    pub fn vandermonde_inverse(&self) -> &DMatrix<Complex64> {
        &self.vinv
    }

    /// Index of `λ = -1`, present exactly when `q` is odd.
    pub fn minus_one_index(&self) -> Option<usize> {
        let half = TurnFraction::new(1, 2);
        self.eigenvalues.iter().position(|l| *l == half)
    }

    /// `A v(λ) = λ v(λ)` and `(λ^q + 1)(λ − 1) = 0` for every eigenvalue,
    /// decided exactly in `Q(ζ_{2q})`.
    pub fn verify_eigenpairs_exact(&self) -> Result<bool> {
        let ring = CyclotomicRing::new(2 * self.q);
        let alpha = self.system.alpha();
        let one = ring.from_rational(BigRational::from_integer(1.into()));
        for lambda in &self.eigenvalues {
            let l = ring.from_turn(lambda)?;
            let v: Vec<_> = (0..=self.q)
                .map(|i| ring.from_turn(&lambda.times(i)))
                .collect::<Result<_>>()?;
            // shift rows
            for i in 0..self.q {
                if ring.sub(&v[i + 1], &ring.mul(&l, &v[i])).is_zero() {
                    continue;
                }
                return Ok(false);
            }
            let last = alpha
                .iter()
                .zip(&v)
                .fold(ring.zero(), |acc, (a, vi)| ring.add(&acc, &ring.scale(vi, a)));
            if !ring.sub(&last, &ring.mul(&l, &v[self.q])).is_zero() {
                return Ok(false);
            }
            let lq = ring.from_turn(&lambda.times(self.q))?;
            let poly = ring.mul(&ring.add(&lq, &one), &ring.sub(&l, &one));
            if !poly.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `max_j ‖A v_j − λ_j v_j‖_∞` in the floating mirror.
    pub fn max_eigenpair_residual(&self) -> f64 {
        let alpha: Vec<f64> = self
            .system
            .alpha()
            .iter()
            .map(|a| a.to_f64().unwrap_or(f64::NAN))
            .collect();
        let n = self.q + 1;
        let mut worst = 0.0f64;
        for (j, lambda) in self.eigenvalues.iter().enumerate() {
            let l = lambda.to_complex();
            let col: Vec<Complex64> = (0..n).map(|i| self.v[(i, j)]).collect();
            for i in 0..n {
                let av = if i + 1 < n {
                    col[i + 1]
                } else {
                    col.iter().zip(&alpha).map(|(c, a)| c * a).sum()
                };
                worst = worst.max((av - l * col[i]).norm());
            }
        }
        worst
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.q + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.q + 1,
                actual: len,
            });
        }
        Ok(())
    }
}

/// `z̃ = V⁻¹ z`.
pub fn transform(z: &[Complex64], dec: &SpectralDecomposition) -> Result<TransformedState> {
    dec.check_dim(z.len())?;
    let zt = &dec.vinv * nalgebra::DVector::from_column_slice(z);
    Ok(TransformedState {
        entries: zt.iter().copied().collect(),
    })
}

impl TransformedState {
    /// `V z̃`, the inverse of [`transform`].
    pub fn reconstruct(&self, dec: &SpectralDecomposition) -> Result<Vec<Complex64>> {
        dec.check_dim(self.entries.len())?;
        let z = &dec.v * nalgebra::DVector::from_column_slice(&self.entries);
        Ok(z.iter().copied().collect())
    }

    /// `Λ^e z̃`, with the eigenvalue powers taken exactly.
    pub fn advance(&self, dec: &SpectralDecomposition, e: usize) -> Result<TransformedState> {
        dec.check_dim(self.entries.len())?;
        Ok(TransformedState {
            entries: self
                .entries
                .iter()
                .zip(&dec.eigenvalues)
                .map(|(z, l)| z * l.times(e).to_complex())
                .collect(),
        })
    }
}

/// Converts an integer lifted state to the floating mirror.
pub fn to_complex(z: &[BigUint]) -> Vec<Complex64> {
    z.iter()
        .map(|x| Complex64::new(x.to_f64().unwrap_or(f64::NAN), 0.0))
        .collect()
}

fn degenerate_threshold(z0: &TransformedState) -> f64 {
    let scale = z0.entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
    scale * DEGENERATE_REL_TOL
}

/// Merges `x ≡ r1 (mod n1)` and `x ≡ r2 (mod n2)`.
fn crt(r1: i128, n1: i128, r2: i128, n2: i128) -> Option<(i128, i128)> {
    let g = n1.extended_gcd(&n2);
    if (r2 - r1) % g.gcd != 0 {
        return None;
    }
    let lcm = n1 / g.gcd * n2;
    let k = ((r2 - r1) / g.gcd * g.x).mod_floor(&(n2 / g.gcd));
    Some(((r1 + n1 * k).mod_floor(&lcm), lcm))
}

/// Recovers `e` from `z_e = A^e z_0`.
///
/// Every usable eigenvalue other than `λ = 1` (zero angle, no information)
/// contributes one residue; all residues must agree, and together they must
/// determine `e` modulo `p - 1`.
pub fn recover_exponent(
    z_e: &[Complex64],
    z_0: &[Complex64],
    dec: &SpectralDecomposition,
    p: &BigUint,
) -> Result<ExponentEstimate> {
    let period = to_index(&(p - 1u32))?;
    if period != 2 * dec.q {
        return Err(Error::InvalidParameter(format!(
            "decomposition of order {} does not belong to p = {p}",
            dec.q
        )));
    }
    let te = transform(z_e, dec)?;
    let t0 = transform(z_0, dec)?;
    let tol = degenerate_threshold(&t0);

    let mut residues = Vec::new();
    let (mut r, mut modulus) = (0i128, 1i128);
    for (j, lambda) in dec.eigenvalues.iter().enumerate().skip(1) {
        let base = t0.entries[j];
        if base.norm() <= tol {
            continue;
        }
        let ratio = te.entries[j] / base;
        if !ratio.norm().is_finite() || ratio.norm() == 0.0 {
            return Err(Error::Inconsistent(format!(
                "vanishing ratio at eigenvalue {j}"
            )));
        }
        let ratio = ratio / ratio.norm();
        let order = lambda.denom().to_usize().expect("small order");
        let (t, err) = (0..order)
            .map(|t| (t, (ratio - lambda.times(t).to_complex()).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("order ≥ 1");
        // half the minimum distance between distinct powers
        let accept = (std::f64::consts::PI / order as f64).sin();
        if err >= accept {
            return Err(Error::Inconsistent(format!(
                "eigenvalue {j}: ratio matches no power (distance {err:.3e})"
            )));
        }
        residues.push(ResidueMatch {
            eigen_index: j,
            order,
            t,
            error: err,
        });
        (r, modulus) = crt(r, modulus, t as i128, order as i128).ok_or_else(|| {
            Error::Inconsistent(format!(
                "eigenvalue {j} gives e ≡ {t} (mod {order}), contradicting e ≡ {r} (mod {modulus})"
            ))
        })?;
    }
    if modulus as usize != period {
        return Err(Error::Ambiguous {
            modulus: modulus as usize,
            needed: period,
        });
    }
    let e = if r == 0 { period } else { r as usize };
    let parity = match parity(z_e, z_0, dec) {
        Ok(par) => par,
        Err(Error::Degenerate(_)) => Parity::Unavailable,
        Err(other) => return Err(other),
    };
    Ok(ExponentEstimate {
        e: BigUint::from(e),
        residues,
        parity,
    })
}

/// Parity of `e` from the sign of `z̃_{e,k} / z̃_{0,k}` at `λ = -1`;
/// unavailable when `q` is even.
pub fn parity(
    z_e: &[Complex64],
    z_0: &[Complex64],
    dec: &SpectralDecomposition,
) -> Result<Parity> {
    let Some(k) = dec.minus_one_index() else {
        return Ok(Parity::Unavailable);
    };
    let te = transform(z_e, dec)?;
    let t0 = transform(z_0, dec)?;
    let base = t0.entries[k];
    if base.norm() <= degenerate_threshold(&t0) || base.is_zero() {
        return Err(Error::Degenerate(k));
    }
    let ratio = te.entries[k] / base;
    Ok(if ratio.re > 0.0 {
        Parity::Even
    } else {
        Parity::Odd
    })
}
