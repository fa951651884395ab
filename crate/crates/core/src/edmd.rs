//! Extended dynamic mode decomposition with shift observables, solved in
//! exact rational arithmetic.
//!
//! Lifted states are stored as columns: `Z = [z_0 … z_{N-1}]`,
//! `Z₊ = [z_1 … z_N]`, and the fit minimizes `‖Z₊ − Â Z‖_F`. When `Z` is
//! row-rank deficient the minimum-Frobenius-norm solution `Â = Z₊ Z^†` is
//! returned, with `Z^†` built from a full-rank factorization `Z = F G`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{FieldKind, RatMatrix};
use crate::lift::{lift_shift, to_rationals, CompanionSystem};
use crate::modular::{to_index, ModTrajectory};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdmdDataset {
    pub q: usize,
    pub n: usize,
    #[serde(serialize_with = "crate::io::ser_rational_matrix")]
    pub z: RatMatrix,
    #[serde(serialize_with = "crate::io::ser_rational_matrix")]
    pub z_plus: RatMatrix,
    pub rank_z: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    Unique,
    MinimumNorm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FittedOperator {
    #[serde(serialize_with = "crate::io::ser_rational_matrix")]
    pub a_hat: RatMatrix,
    /// `‖Z₊ − Â Z‖_F²`, exact.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub residual_sq: BigRational,
    /// `‖Z₊ − Â Z‖_F` in floating point.
    #[serde(serialize_with = "crate::io::ser_f64_15")]
    pub residual: f64,
    pub fit_kind: FitKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OperatorComparison {
    pub entrywise_equal: bool,
    pub prediction_equivalent: bool,
}

/// Fit below the minimal order together with how badly it predicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnderparameterizedFit {
    pub fit: FittedOperator,
    /// One-step predictions `Â z_k ≠ z_{k+1}` over one period.
    pub one_step_mismatches: usize,
    pub period: usize,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub max_abs_error: BigRational,
}

/// Snapshot matrices from `N` consecutive lifted pairs of the stored
/// trajectory values.
pub fn build_dataset(traj: &ModTrajectory, q: usize, n: usize) -> Result<EdmdDataset> {
    let needed = n + q + 1;
    if traj.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            available: traj.len(),
        });
    }
    let values: Vec<BigInt> = traj.values().iter().map(|v| BigInt::from(v.clone())).collect();
    dataset_from_sequence(&values, q, n)
}

/// Snapshot matrices from a raw integer sequence, e.g. ingested from CSV.
pub fn dataset_from_sequence(values: &[BigInt], q: usize, n: usize) -> Result<EdmdDataset> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one snapshot pair".into()));
    }
    let needed = n + q + 1;
    if values.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            available: values.len(),
        });
    }
    let column = |k: usize| -> Vec<BigRational> {
        values[k..=k + q]
            .iter()
            .map(|v| BigRational::from_integer(v.clone()))
            .collect()
    };
    let z = RatMatrix::from_columns(&(0..n).map(column).collect::<Vec<_>>())?;
    let z_plus = RatMatrix::from_columns(&(1..=n).map(column).collect::<Vec<_>>())?;
    let rank_z = z.rank(&FieldKind::Rational);
    Ok(EdmdDataset {
        q,
        n,
        z,
        z_plus,
        rank_z,
    })
}

/// `N ≥ q̃ + 1` and `q ≥ q̃`. When both hold, `rank(Z) = q̃ + 1` is required
/// as well, and a violation is reported as an internal error.
pub fn check_assumption(dataset: &EdmdDataset, p: &BigUint) -> Result<bool> {
    let half = to_index(&((p - 1u32) >> 1))?;
    let holds = dataset.n > half && dataset.q >= half;
    if holds && dataset.rank_z != half + 1 {
        return Err(Error::Internal(format!(
            "rank(Z) = {} under the data assumption, expected {}",
            dataset.rank_z,
            half + 1
        )));
    }
    Ok(holds)
}

/// Moore–Penrose pseudo-inverse over the rationals via `Z = F G`:
/// `Z^† = Gᵀ (G Gᵀ)⁻¹ (Fᵀ F)⁻¹ Fᵀ`.
pub fn pseudo_inverse(z: &RatMatrix) -> Result<RatMatrix> {
    let field = FieldKind::Rational;
    let (rref, pivots) = z.rref(&field);
    let r = pivots.len();
    if r == 0 {
        return Ok(RatMatrix::zeros(z.cols(), z.rows()));
    }
    let f = z.select_columns(&pivots);
    let g = rref.select_rows(&(0..r).collect::<Vec<_>>());
    let ft = f.transpose();
    let gt = g.transpose();
    let ggt_inv = g
        .mul(&gt)?
        .inverse(&field)
        .ok_or_else(|| Error::Internal("G Gᵀ singular".into()))?;
    let ftf_inv = ft
        .mul(&f)?
        .inverse(&field)
        .ok_or_else(|| Error::Internal("Fᵀ F singular".into()))?;
    gt.mul(&ggt_inv)?.mul(&ftf_inv)?.mul(&ft)
}

fn residual_of(dataset: &EdmdDataset, a_hat: &RatMatrix) -> Result<BigRational> {
    Ok(dataset.z_plus.sub(&a_hat.mul(&dataset.z)?)?.frobenius_sq())
}

pub fn edmd_fit(dataset: &EdmdDataset) -> Result<FittedOperator> {
    if dataset.n == 0 || dataset.z.cols() == 0 {
        return Err(Error::InvalidParameter("empty dataset".into()));
    }
    let field = FieldKind::Rational;
    let (a_hat, fit_kind) = if dataset.rank_z == dataset.z.rows() {
        let zt = dataset.z.transpose();
        let gram_inv = dataset
            .z
            .mul(&zt)?
            .inverse(&field)
            .ok_or_else(|| Error::Internal("Z Zᵀ singular at full row rank".into()))?;
        (dataset.z_plus.mul(&zt)?.mul(&gram_inv)?, FitKind::Unique)
    } else {
        (
            dataset.z_plus.mul(&pseudo_inverse(&dataset.z)?)?,
            FitKind::MinimumNorm,
        )
    };
    let residual_sq = residual_of(dataset, &a_hat)?;
    let residual = residual_sq.to_f64().unwrap_or(f64::NAN).sqrt();
    Ok(FittedOperator {
        a_hat,
        residual_sq,
        residual,
        fit_kind,
    })
}

/// Exact squared residual of an arbitrary candidate operator on `dataset`.
pub fn residual_sq(dataset: &EdmdDataset, a_hat: &RatMatrix) -> Result<BigRational> {
    residual_of(dataset, a_hat)
}

pub fn compare_operators(
    fitted: &FittedOperator,
    analytic: &CompanionSystem,
    traj: &ModTrajectory,
    horizon: usize,
) -> Result<OperatorComparison> {
    let dim = fitted.a_hat.rows();
    if dim != analytic.dimension() {
        return Err(Error::DimensionMismatch {
            expected: analytic.dimension(),
            actual: dim,
        });
    }
    let entrywise_equal = fitted.a_hat == analytic.matrix();
    let q = dim - 1;
    let mut z = to_rationals(&lift_shift(traj, q, 0));
    let mut prediction_equivalent = true;
    for k in 1..=horizon {
        z = fitted.a_hat.mul_vec(&z)?;
        if z != to_rationals(&lift_shift(traj, q, k)) {
            prediction_equivalent = false;
            break;
        }
    }
    Ok(OperatorComparison {
        entrywise_equal,
        prediction_equivalent,
    })
}

/// Minimum-norm fit for `q < (p-1)/2`, where no exact representation exists.
pub fn edmd_underparameterized(
    traj: &ModTrajectory,
    q: usize,
    n: usize,
) -> Result<UnderparameterizedFit> {
    let half = traj.params().half_period()?;
    if q >= half {
        return Err(Error::InvalidParameter(format!(
            "order {q} is not below the minimal order {half}"
        )));
    }
    let fit = edmd_fit(&build_dataset(traj, q, n)?)?;
    let period = traj.params().period()?;
    let mut mismatches = 0;
    let mut max_abs_error = BigRational::zero();
    for k in 0..period {
        let pred = fit.a_hat.mul_vec(&to_rationals(&lift_shift(traj, q, k)))?;
        let truth = to_rationals(&lift_shift(traj, q, k + 1));
        let err = pred
            .iter()
            .zip(&truth)
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or_else(BigRational::zero);
        if !err.is_zero() {
            mismatches += 1;
        }
        max_abs_error = max_abs_error.max(err);
    }
    Ok(UnderparameterizedFit {
        fit,
        one_step_mismatches: mismatches,
        period,
        max_abs_error,
    })
}
