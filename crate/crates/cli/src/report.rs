//! Per-case records for `run`, and the versioned report envelope.

use koopman_dh::io::{ser_display, ser_f64_15, ExactRational};
use koopman_dh::lift::closing::closing_holds_over;
use koopman_dh::spectral::to_complex;
use koopman_dh::*;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Case, ExperimentConfig};
use crate::error::CliResult;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt_f64")]
    pub wall_clock_seconds: Option<f64>,
}

fn ser_opt_f64<S: serde::Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => ser_f64_15(x, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub manifest: Manifest,
    pub records: Vec<CaseRecord>,
}

#[derive(Debug, Serialize)]
pub struct EigenSummary {
    /// Order of the decomposition, always `(p-1)/2`.
    pub q: usize,
    pub count: usize,
    /// Eigenvalue angles as fractions of a full turn.
    pub angles: Vec<ExactRational>,
    pub contains_one: bool,
    pub contains_minus_one: bool,
    pub exact_eigenpairs: bool,
    #[serde(serialize_with = "ser_f64_15")]
    pub max_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct RecoveryRecord {
    pub e: u64,
    pub recovered: Option<String>,
    pub oracle: String,
    pub matches: bool,
    pub parity: Option<Parity>,
    pub parity_correct: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct EdmdRecord {
    pub q: usize,
    pub n: usize,
    pub rank_z: usize,
    pub fit_kind: FitKind,
    #[serde(serialize_with = "koopman_dh::io::ser_rational")]
    pub residual_sq: num_rational::BigRational,
    /// Which analytic operator the fit is compared against.
    pub reference: &'static str,
    pub entrywise_equal: Option<bool>,
    pub prediction_equivalent: bool,
}

#[derive(Debug, Serialize)]
pub struct CaseRecord {
    #[serde(serialize_with = "ser_display")]
    pub p: BigUint,
    #[serde(serialize_with = "ser_display")]
    pub m: BigUint,
    pub q: usize,
    pub minimal_dimension: usize,
    pub predicted_dimension: usize,
    pub theorem_match: bool,
    pub alpha: Option<Vec<ExactRational>>,
    pub closing_verified: Option<bool>,
    pub eigenvalues: EigenSummary,
    pub recovery: Vec<RecoveryRecord>,
    pub edmd: EdmdRecord,
    pub complexity: KoopmanLfsrReport,
    pub failures: Vec<String>,
}

fn eigen_summary(dec: &SpectralDecomposition) -> CliResult<EigenSummary> {
    let angles = dec.eigenvalues();
    Ok(EigenSummary {
        q: dec.q(),
        count: angles.len(),
        angles: angles.iter().map(|t| ExactRational::from(t.as_rational())).collect(),
        contains_one: angles.iter().any(|t| t.as_rational().is_zero()),
        contains_minus_one: dec.minus_one_index().is_some(),
        exact_eigenpairs: dec.verify_eigenpairs_exact()?,
        max_residual: dec.max_eigenpair_residual(),
    })
}

fn recovery(case: &Case, dec: &SpectralDecomposition) -> CliResult<Vec<RecoveryRecord>> {
    let pr = &case.params;
    let half = dec.q();
    let z0 = to_complex(&lift_shift(&pr.base_trajectory()?, half, 0));
    case.exponents
        .iter()
        .map(|&e| {
            let c = mod_pow(pr.m(), &BigUint::from(e), pr.p())?;
            let oracle = discrete_log_bruteforce(&c, pr)?;
            let ze = to_complex(&lift_ciphertext(&c, pr, half)?);
            let want_parity = match (dec.minus_one_index(), e % 2) {
                (None, _) => Parity::Unavailable,
                (Some(_), 0) => Parity::Even,
                _ => Parity::Odd,
            };
            let est = recover_exponent(&ze, &z0, dec, pr.p());
            let par = parity(&ze, &z0, dec);
            let error = match (&est, &par) {
                (Err(a), _) | (_, Err(a)) => Some(a.to_string()),
                _ => None,
            };
            let recovered = est.ok().map(|x| x.e);
            let parity = par.ok();
            Ok(RecoveryRecord {
                e,
                matches: recovered.as_ref() == Some(&oracle),
                recovered: recovered.map(|r| r.to_string()),
                oracle: oracle.to_string(),
                parity_correct: parity == Some(want_parity),
                parity,
                error,
            })
        })
        .collect()
}

fn edmd_record(case: &Case, half: usize) -> CliResult<EdmdRecord> {
    let pr = &case.params;
    let q = case.q;
    let period = pr.period()?;
    let traj = simulate(pr.m(), pr, &BigUint::one(), 3 * period)?;
    let n = period;
    let ds = build_dataset(&traj, q, n)?;
    let fit = edmd_fit(&ds)?;
    let (reference, cmp) = if q < half {
        ("none", None)
    } else if q == period - 1 {
        let cyclic = full_period_system(pr)?;
        ("cyclic", Some(compare_operators(&fit, &cyclic, &traj, 2 * period)?))
    } else {
        let canon = CompanionSystem::new(canonical_alpha(pr.p(), q)?)?;
        ("canonical", Some(compare_operators(&fit, &canon, &traj, 2 * period)?))
    };
    Ok(EdmdRecord {
        q,
        n,
        rank_z: ds.rank_z,
        fit_kind: fit.fit_kind,
        residual_sq: fit.residual_sq,
        reference,
        entrywise_equal: cmp.map(|c| c.entrywise_equal),
        prediction_equivalent: cmp.is_some_and(|c| c.prediction_equivalent),
    })
}

pub fn build_record(case: &Case) -> CliResult<CaseRecord> {
    let pr = &case.params;
    let half = pr.half_period()?;
    let q = case.q;
    let minimal_dimension = minimal_lifting_dimension(pr)?;
    let traj = pr.base_trajectory()?;
    let alpha = if q >= half { Some(canonical_alpha(pr.p(), q)?) } else { None };
    let closing_verified = alpha
        .as_ref()
        .map(|a| closing_holds_over(&traj, a, 2 * pr.period().unwrap_or(0)));
    let dec = eigen_canonical(pr.p(), half)?;
    let eigenvalues = eigen_summary(&dec)?;
    let recovery = recovery(case, &dec)?;
    let edmd = edmd_record(case, half)?;
    let complexity = compare_koopman_vs_lfsr(pr)?;

    let mut failures = Vec::new();
    if minimal_dimension != half + 1 {
        failures.push(format!("minimal dimension {minimal_dimension} != {}", half + 1));
    }
    if closing_verified == Some(false) {
        failures.push("canonical closing coefficients fail".into());
    }
    if !eigenvalues.exact_eigenpairs {
        failures.push("eigenpair residual nonzero".into());
    }
    for r in &recovery {
        if !r.matches {
            failures.push(format!("e={}: recovery disagrees with oracle", r.e));
        }
        if !r.parity_correct {
            failures.push(format!("e={}: parity incorrect", r.e));
        }
    }
    if q == half && !(edmd.entrywise_equal == Some(true) && edmd.residual_sq.is_zero()) {
        failures.push("EDMD fit at minimal order is not exact".into());
    }
    if q > half && !edmd.prediction_equivalent {
        failures.push("EDMD fit does not reproduce the trajectory".into());
    }
    if !complexity.equal {
        failures.push("linear complexity differs from Koopman dimension".into());
    }

    Ok(CaseRecord {
        p: pr.p().clone(),
        m: pr.m().clone(),
        q,
        minimal_dimension,
        predicted_dimension: half + 1,
        theorem_match: minimal_dimension == half + 1,
        alpha: alpha.map(|a| a.iter().map(ExactRational::from).collect()),
        closing_verified,
        eigenvalues,
        recovery,
        edmd,
        complexity,
        failures,
    })
}

/// Builds every case concurrently and orders the records by `(p, m)`;
/// recoveries inside a record are already ordered by `e`.
pub fn build_records(cases: &[Case]) -> CliResult<Vec<CaseRecord>> {
    let mut records = cases.par_iter().map(build_record).collect::<CliResult<Vec<_>>>()?;
    records.sort_by(|a, b| (&a.p, &a.m).cmp(&(&b.p, &b.m)));
    Ok(records)
}

/// Flat per-case row for CSV output.
#[derive(Debug, Serialize)]
pub struct CsvRow {
    pub p: String,
    pub m: String,
    pub q: usize,
    pub minimal_dimension: usize,
    pub predicted_dimension: usize,
    pub theorem_match: bool,
    pub closing_verified: String,
    pub exponents_tested: usize,
    pub recovered_all: bool,
    pub parity_correct_all: bool,
    pub edmd_residual_sq: String,
    pub edmd_entrywise_equal: String,
    pub edmd_prediction_equivalent: bool,
    pub lfsr_length: usize,
    pub failures: usize,
}

impl From<&CaseRecord> for CsvRow {
    fn from(r: &CaseRecord) -> Self {
        let opt = |b: Option<bool>| b.map_or_else(String::new, |v| v.to_string());
        CsvRow {
            p: r.p.to_string(),
            m: r.m.to_string(),
            q: r.q,
            minimal_dimension: r.minimal_dimension,
            predicted_dimension: r.predicted_dimension,
            theorem_match: r.theorem_match,
            closing_verified: opt(r.closing_verified),
            exponents_tested: r.recovery.len(),
            recovered_all: r.recovery.iter().all(|x| x.matches),
            parity_correct_all: r.recovery.iter().all(|x| x.parity_correct),
            edmd_residual_sq: r.edmd.residual_sq.to_string(),
            edmd_entrywise_equal: opt(r.edmd.entrywise_equal),
            edmd_prediction_equivalent: r.edmd.prediction_equivalent,
            lfsr_length: r.complexity.lfsr_length,
            failures: r.failures.len(),
        }
    }
}
