//! Shared fixtures for the benchmarks.

use koopman_dh::spectral::to_complex;
use koopman_dh::{lift_shift, DhParams, EdmdDataset, SequenceSample};
use num_bigint::BigInt;
use num_complex::Complex64;

pub const PRIMES: [u32; 4] = [23, 61, 101, 199];

pub fn params(p: u32) -> DhParams {
    DhParams::with_smallest_root(p).expect("benchmark primes are valid")
}

/// Two periods of the base orbit over the rationals.
pub fn two_periods(p: u32) -> SequenceSample {
    let values = koopman_dh::complexity::two_period_sequence(&params(p)).expect("valid params");
    SequenceSample::from_integers(&values, koopman_dh::FieldKind::Rational).expect("non-empty")
}

/// Lifted states at steps 0 and `e` with `q = (p-1)/2`.
pub fn lifted_pair(p: u32, e: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let pr = params(p);
    let traj = pr.base_trajectory().expect("valid params");
    let q = pr.half_period().expect("valid params");
    (to_complex(&lift_shift(&traj, q, e)), to_complex(&lift_shift(&traj, q, 0)))
}

/// One period of snapshots at order `q`.
pub fn dataset(p: u32, q: usize) -> EdmdDataset {
    let pr = params(p);
    let traj = pr.base_trajectory().expect("valid params");
    let n = pr.period().expect("valid params");
    let values: Vec<BigInt> = (0..n + q + 1).map(|k| BigInt::from(traj.state(k))).collect();
    koopman_dh::edmd::dataset_from_sequence(&values, q, n).expect("enough samples")
}
