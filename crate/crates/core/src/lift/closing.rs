//! Closing condition `x_{k+q+1} = Σ_j α_j x_{k+j}` for shift observables.
//!
//! The condition is decided over the rationals, never modulo `p`: the lifted
//! system is a real linear system, so an identity that only holds for the
//! residues does not count. Solvability for a given `q` is the rank test on
//! the periodic Hankel system built from one period of the orbit.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{lift_shift, to_rationals, CompanionSystem};
use crate::error::{Error, Result};
use crate::exact::{rat, FieldKind, RatMatrix, Solution};
use crate::modular::{DhParams, ModTrajectory};

/// `Ã α = b̃` with `Ã[r][c] = x_{(r+c) mod (p-1)}` and
/// `b̃[r] = x_{(r+q+1) mod (p-1)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HankelSystem {
    pub matrix: RatMatrix,
    pub rhs: Vec<BigRational>,
}

/// Sparse closing coefficients for any `q ≥ (p-1)/2`:
/// `α_{q-q̃} = 1`, `α_{q-q̃+1} = -1`, `α_q = 1`, zero elsewhere.
pub fn canonical_alpha(p: &BigUint, q: usize) -> Result<Vec<BigRational>> {
    let half = crate::modular::to_index(&((p - 1u32) >> 1))?;
    if half < 2 {
        return Err(Error::InvalidParameter(format!("modulus {p} must exceed 3")));
    }
    if q < half {
        return Err(Error::InvalidParameter(format!(
            "order {q} below the minimal order {half}"
        )));
    }
    let mut alpha = vec![BigRational::zero(); q + 1];
    alpha[q - half] = BigRational::one();
    alpha[q - half + 1] = -BigRational::one();
    alpha[q] = BigRational::one();
    Ok(alpha)
}

/// Checks the closing condition for `k` in `0..horizon`, exactly.
pub fn closing_holds_over(traj: &ModTrajectory, alpha: &[BigRational], horizon: usize) -> bool {
    if alpha.is_empty() {
        return false;
    }
    let q = alpha.len() - 1;
    (0..horizon).all(|k| {
        let window = to_rationals(&lift_shift(traj, q + 1, k));
        let lhs = alpha
            .iter()
            .zip(&window)
            .fold(BigRational::zero(), |acc, (a, x)| acc + a * x);
        lhs == window[q + 1]
    })
}

/// Closing condition over one full period `k ∈ [0, p-2]`, which by
/// periodicity covers every `k ≥ 0`.
pub fn verify_closing(traj: &ModTrajectory, alpha: &[BigRational]) -> bool {
    match traj.params().period() {
        Ok(n) => closing_holds_over(traj, alpha, n),
        Err(_) => false,
    }
}

pub fn hankel_system(traj: &ModTrajectory, q: usize) -> Result<HankelSystem> {
    let n = traj.params().period()?;
    let period: Vec<BigRational> = (0..n).map(|i| rat(&traj.state(i))).collect();
    let mut matrix = RatMatrix::zeros(n, q + 1);
    let mut rhs = Vec::with_capacity(n);
    for r in 0..n {
        for c in 0..=q {
            matrix[(r, c)] = period[(r + c) % n].clone();
        }
        rhs.push(period[(r + q + 1) % n].clone());
    }
    Ok(HankelSystem { matrix, rhs })
}

/// Exact rational solve of the Hankel system. Unsolvable systems report
/// `rank(Ã) < rank(Ã|b̃)`.
pub fn solve_alpha_exact(sys: &HankelSystem) -> Result<Solution> {
    sys.matrix.solve(&sys.rhs, &FieldKind::Rational)
}

/// Smallest lifting dimension `q + 1` for which shift observables admit an
/// exact companion representation, found by scanning `q = 0, 1, …`.
pub fn minimal_lifting_dimension(params: &DhParams) -> Result<usize> {
    let traj = params.base_trajectory()?;
    let cap = params.period()? - 1;
    for q in 0..=cap {
        if let Solution::Solved { x, .. } = solve_alpha_exact(&hankel_system(&traj, q)?)? {
            if verify_closing(&traj, &x) {
                return Ok(q + 1);
            }
        }
    }
    Err(Error::Internal(format!(
        "no closing coefficients up to q = {cap} for p = {}",
        params.p()
    )))
}

/// The `(p-1)`-dimensional cyclic shift, `α = (1, 0, …, 0)`.
pub fn full_period_system(params: &DhParams) -> Result<CompanionSystem> {
    let n = params.period()?;
    let mut alpha = vec![BigRational::zero(); n];
    alpha[0] = BigRational::one();
    CompanionSystem::new(alpha)
}

/// Reads the exponent off the position of `c` inside `z_0` at `q = p - 2`,
/// where `z_0` lists the whole orbit. Position 0 maps to `p - 1`.
pub fn index_lookup_attack(c: &BigUint, params: &DhParams) -> Result<BigUint> {
    let n = params.period()?;
    if c.is_zero() || c >= params.p() {
        return Err(Error::InvalidParameter(format!(
            "ciphertext {c} outside [1, {n}]"
        )));
    }
    let z0 = lift_shift(&params.base_trajectory()?, n - 1, 0);
    let idx = z0
        .iter()
        .position(|x| x == c)
        .ok_or_else(|| Error::Internal(format!("{c} missing from the orbit")))?;
    Ok(BigUint::from(if idx == 0 { n } else { idx }))
}
