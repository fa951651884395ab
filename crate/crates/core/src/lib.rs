//! Koopman-operator analysis of the Diffie-Hellman key exchange.
//!
//! The exchange `c = m^e mod p` is the endpoint of the orbit of
//! `x_{k+1} = m x_k mod p` from `x_0 = 1`. Lifting the state with shift
//! observables yields an exact finite-dimensional linear system, whose
//! companion matrix has order `(p-1)/2`. This crate builds that
//! representation exactly, recovers exponents from its spectrum, fits it
//! from data, and compares it with the classical linear complexity.
//!
//! Modules:
//! - [`modular`]: arithmetic over `Z_p*`, protocol simulation, brute-force oracles
//! - [`lift`]: observable dictionaries, companion systems, closing condition
//! - [`spectral`]: eigendecomposition and exponent / parity recovery
//! - [`edmd`]: exact least-squares identification from snapshots
//! - [`complexity`]: Berlekamp–Massey and LFSRs
//! - [`exact`]: the rational / cyclotomic arithmetic underneath

pub mod complexity;
pub mod edmd;
pub mod error;
pub mod exact;
pub mod io;
pub mod lift;
pub mod modular;
pub mod spectral;

pub use complexity::{
    berlekamp_massey, bruteforce_min_lfsr, check_reference_length, compare_koopman_vs_lfsr,
    lfsr_generate, ReferenceCheck,
    KoopmanLfsrReport, LinearComplexityResult, SequenceSample,
};
pub use edmd::{
    build_dataset, check_assumption, compare_operators, edmd_fit, edmd_underparameterized,
    EdmdDataset, FitKind, FittedOperator, OperatorComparison, UnderparameterizedFit,
};
pub use error::{Error, Result};
pub use exact::{FieldKind, RatMatrix, Solution, TurnFraction};
pub use lift::{
    canonical_alpha, full_period_system, hankel_system, index_lookup_attack, lift_ciphertext,
    lift_complex, lift_shift, minimal_lifting_dimension, solve_alpha_exact, verify_closing,
    CompanionSystem, DictionaryKind, HankelSystem, ObservableDictionary,
};
pub use modular::{
    dh_exchange, discrete_log_bruteforce, euler_criterion, find_primitive_root, intersection_candidates,
    is_primitive_root, mod_pow, shared_secret_intersection, simulate, DhParams, DhTranscript,
    Intersection, ModTrajectory, Residuosity,
};
pub use spectral::{
    eigen_canonical, parity, recover_exponent, transform, ExponentEstimate, Parity,
    SpectralDecomposition, TransformedState,
};
