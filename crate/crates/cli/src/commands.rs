use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use koopman_dh::complexity::{check_reference_length, ReferenceCheck};
use koopman_dh::edmd::dataset_from_sequence;
use koopman_dh::io::{read_integer_csv, ser_display, write_integer_csv};
use koopman_dh::modular::{is_prime, primitive_roots};
use koopman_dh::spectral::to_complex;
use koopman_dh::*;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, OutputFormat};
use crate::error::{CliError, CliResult};
use crate::report::{self, CsvRow, Manifest, Report, SCHEMA_VERSION};

pub const OUTPUT_DIR_ENV: &str = "KOOPMAN_DH_OUTPUT_DIR";

/// Relative output paths land in the override directory when it is set.
fn resolve(out: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if out.is_relative() => PathBuf::from(dir).join(out),
        _ => out.to_path_buf(),
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn emit_text(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => write_file(&resolve(path), text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

fn emit_json<T: Serialize>(command: &str, body: T, out: Option<&Path>) -> CliResult<()> {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        body,
    };
    let mut text = serde_json::to_string_pretty(&env).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    emit_text(&text, out)
}

fn read_sequence(path: &Path) -> CliResult<Vec<BigInt>> {
    let file = fs::File::open(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    Ok(read_integer_csv(file)?)
}

pub fn simulate_cmd(
    p: &BigUint,
    m: &BigUint,
    steps: usize,
    x0: &BigUint,
    multiplier: Option<&BigUint>,
    out: Option<&Path>,
) -> CliResult<()> {
    let params = DhParams::new(p.clone(), m.clone())?;
    let traj = simulate(multiplier.unwrap_or(params.m()), &params, x0, steps)?;
    emit_text(&write_integer_csv(traj.values()), out)
}

#[derive(Serialize)]
struct TheoremRow {
    #[serde(serialize_with = "ser_display")]
    p: BigUint,
    #[serde(serialize_with = "ser_display")]
    m: BigUint,
    minimal_dimension: usize,
    predicted: usize,
    #[serde(rename = "match")]
    matches: bool,
}

#[derive(Serialize)]
struct Skipped {
    p: u64,
    note: String,
}

#[derive(Serialize)]
struct TheoremReport {
    rows: Vec<TheoremRow>,
    skipped: Vec<Skipped>,
    all_match: bool,
}

pub fn verify_theorem_cmd(from: u64, to: u64, all_generators: bool, out: Option<&Path>) -> CliResult<()> {
    if from > to {
        return Err(CliError::Invalid(format!("empty range [{from}, {to}]")));
    }
    if from == to && !is_prime(&BigUint::from(from)) {
        return Err(CliError::Invalid(format!("{from} is not prime")));
    }
    let mut skipped = Vec::new();
    let mut pairs = Vec::new();
    for p in (from..=to).filter(|&n| is_prime(&BigUint::from(n))) {
        if p <= 3 {
            skipped.push(Skipped {
                p,
                note: "the minimal-dimension law needs p > 3".into(),
            });
            continue;
        }
        let pb = BigUint::from(p);
        let roots = if all_generators {
            primitive_roots(&pb)?
        } else {
            vec![find_primitive_root(&pb)?]
        };
        pairs.extend(roots.into_iter().map(|m| (p, m)));
    }
    let rows = pairs
        .par_iter()
        .map(|(p, m)| {
            let params = DhParams::new(*p, m.clone())?;
            let got = minimal_lifting_dimension(&params)?;
            let predicted = params.half_period()? + 1;
            Ok(TheoremRow {
                p: params.p().clone(),
                m: m.clone(),
                minimal_dimension: got,
                predicted,
                matches: got == predicted,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let all_match = rows.iter().all(|r| r.matches);
    let n_bad = rows.iter().filter(|r| !r.matches).count();
    emit_json("verify-theorem", TheoremReport { rows, skipped, all_match }, out)?;
    if !all_match {
        return Err(CliError::Inconsistent(format!("{n_bad} cases violate the dimension law")));
    }
    Ok(())
}

#[derive(Serialize)]
struct RecoverReport {
    params: DhParams,
    #[serde(serialize_with = "ser_display")]
    c: BigUint,
    #[serde(skip_serializing_if = "Option::is_none")]
    e: Option<String>,
    parity: Parity,
    #[serde(serialize_with = "ser_display")]
    oracle_e: BigUint,
    oracle: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    residues: Option<Vec<koopman_dh::spectral::ResidueMatch>>,
}

pub fn recover_cmd(
    p: &BigUint,
    m: &BigUint,
    c: Option<&BigUint>,
    e: Option<&BigUint>,
    parity_only: bool,
    out: Option<&Path>,
) -> CliResult<()> {
    let params = DhParams::new(p.clone(), m.clone())?;
    let c = match (c, e) {
        (Some(c), None) => {
            if c.bits() == 0 || c >= p {
                return Err(CliError::Invalid(format!("ciphertext {c} outside [1, {}]", p - 1u32)));
            }
            c.clone()
        }
        (None, Some(e)) => {
            if e.bits() == 0 || e >= p {
                return Err(CliError::Invalid(format!("exponent {e} outside [1, {}]", p - 1u32)));
            }
            mod_pow(params.m(), e, params.p())?
        }
        _ => return Err(CliError::Invalid("give exactly one of --c and --e".into())),
    };
    let half = params.half_period()?;
    let dec = eigen_canonical(params.p(), half)?;
    let z0 = to_complex(&lift_shift(&params.base_trajectory()?, half, 0));
    let ze = to_complex(&lift_ciphertext(&c, &params, half)?);
    let oracle_e = discrete_log_bruteforce(&c, &params)?;
    let par = parity(&ze, &z0, &dec)?;
    let expected_parity = match (dec.minus_one_index(), (&oracle_e % 2u32).is_one()) {
        (None, _) => Parity::Unavailable,
        (Some(_), true) => Parity::Odd,
        (Some(_), false) => Parity::Even,
    };
    let (e_rec, residues) = if parity_only {
        (None, None)
    } else {
        let est = recover_exponent(&ze, &z0, &dec, params.p())?;
        (Some(est.e), Some(est.residues))
    };
    let ok = par == expected_parity && e_rec.as_ref().is_none_or(|x| *x == oracle_e);
    emit_json(
        "recover",
        RecoverReport {
            params,
            c,
            e: e_rec.map(|x| x.to_string()),
            parity: par,
            oracle_e,
            oracle: if ok { "match" } else { "mismatch" },
            residues,
        },
        out,
    )?;
    if !ok {
        return Err(CliError::Inconsistent("spectral recovery disagrees with the discrete-log oracle".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct SecretReport {
    params: DhParams,
    #[serde(serialize_with = "ser_display")]
    c_e: BigUint,
    #[serde(serialize_with = "ser_display")]
    c_d: BigUint,
    intersection: Intersection,
    cross_check: bool,
}

pub fn shared_secret_cmd(p: &BigUint, m: &BigUint, c_e: &BigUint, c_d: &BigUint, out: Option<&Path>) -> CliResult<()> {
    let params = DhParams::new(p.clone(), m.clone())?;
    let hit = shared_secret_intersection(c_e, c_d, &params)?;
    let t = dh_exchange(&params, &hit.e, &hit.d)?;
    let cross_check = t.c_ed == hit.secret && t.c_e == *c_e && t.c_d == *c_d;
    emit_json(
        "shared-secret",
        SecretReport {
            params,
            c_e: c_e.clone(),
            c_d: c_d.clone(),
            intersection: hit,
            cross_check,
        },
        out,
    )?;
    if !cross_check {
        return Err(CliError::Inconsistent("intersection disagrees with the protocol".into()));
    }
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum Regime {
    /// `q = (p-1)/2`: the fit must be the canonical companion matrix.
    Exact,
    /// `q > (p-1)/2`: many exact operators; the minimum-norm one is reported.
    Overparameterized,
    /// `q < (p-1)/2`: no exact finite representation exists.
    Underparameterized,
    /// Sequence data without known modulus.
    Unknown,
}

#[derive(Serialize)]
struct EdmdReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<DhParams>,
    q: usize,
    n: usize,
    rank_z: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    assumption_holds: Option<bool>,
    regime: Regime,
    fit: FittedOperator,
    #[serde(skip_serializing_if = "Option::is_none")]
    entrywise_equal: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    prediction_equivalent: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    one_step_mismatches: Option<usize>,
}

pub fn edmd_cmd(
    p: Option<&BigUint>,
    m: Option<&BigUint>,
    q: usize,
    n: Option<usize>,
    data: Option<&Path>,
    out: Option<&Path>,
) -> CliResult<()> {
    if let Some(path) = data {
        let values = read_sequence(path)?;
        let max_n = values.len().checked_sub(q + 1).filter(|&k| k > 0).ok_or(CliError::Malformed(format!(
            "{} values are too few for q = {q}",
            values.len()
        )))?;
        let n = n.unwrap_or(max_n);
        let ds = dataset_from_sequence(&values, q, n)?;
        let fit = edmd_fit(&ds)?;
        return emit_json(
            "edmd",
            EdmdReport {
                params: None,
                q,
                n,
                rank_z: ds.rank_z,
                assumption_holds: None,
                regime: Regime::Unknown,
                fit,
                entrywise_equal: None,
                prediction_equivalent: None,
                one_step_mismatches: None,
            },
            out,
        );
    }
    let (Some(p), Some(m)) = (p, m) else {
        return Err(CliError::Invalid("give --p and --m, or --data".into()));
    };
    let params = DhParams::new(p.clone(), m.clone())?;
    let period = params.period()?;
    if q > period - 1 {
        return Err(CliError::Invalid(format!("q = {q} exceeds p - 2")));
    }
    let half = params.half_period()?;
    let n = n.unwrap_or(period);
    if n == 0 {
        return Err(CliError::Invalid("need at least one snapshot".into()));
    }
    let traj = simulate(params.m(), &params, &BigUint::one(), (n + q + 1).max(3 * period))?;
    let ds = build_dataset(&traj, q, n)?;
    let assumption = check_assumption(&ds, params.p())?;
    let fit = edmd_fit(&ds)?;
    let horizon = 2 * period;
    let (regime, cmp, mismatches) = if q < half {
        let under = edmd_underparameterized(&traj, q, n)?;
        (Regime::Underparameterized, None, Some(under.one_step_mismatches))
    } else {
        let reference = if q == period - 1 {
            full_period_system(&params)?
        } else {
            CompanionSystem::new(canonical_alpha(params.p(), q)?)?
        };
        let regime = if q == half { Regime::Exact } else { Regime::Overparameterized };
        (regime, Some(compare_operators(&fit, &reference, &traj, horizon)?), None)
    };
    let failed = match regime {
        Regime::Exact => assumption && !(cmp.is_some_and(|c| c.entrywise_equal) && fit.residual_sq.is_zero()),
        Regime::Overparameterized => assumption && !cmp.is_some_and(|c| c.prediction_equivalent),
        _ => false,
    };
    emit_json(
        "edmd",
        EdmdReport {
            params: Some(params),
            q,
            n,
            rank_z: ds.rank_z,
            assumption_holds: Some(assumption),
            regime,
            fit,
            entrywise_equal: cmp.map(|c| c.entrywise_equal),
            prediction_equivalent: cmp.map(|c| c.prediction_equivalent),
            one_step_mismatches: mismatches,
        },
        out,
    )?;
    if failed {
        return Err(CliError::Inconsistent("EDMD fit is not exact although the rank assumption holds".into()));
    }
    Ok(())
}

/// Sequences with a known stated LFSR length, checked when they appear.
fn reference_length(values: &[BigInt]) -> Option<usize> {
    let periodic_012 = values.len() >= 3
        && values.iter().enumerate().all(|(k, v)| v.to_u64() == Some(k as u64 % 3));
    let affine: Vec<BigInt> = [1, 4, 10, 22, 46].iter().map(|&x| BigInt::from(x)).collect();
    if periodic_012 {
        Some(3)
    } else if values == affine.as_slice() {
        Some(51)
    } else {
        None
    }
}

#[derive(Serialize)]
struct SequenceComplexity {
    length: usize,
    rational: LinearComplexityResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    prime_field: Option<LinearComplexityResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<ReferenceCheck>,
}

pub fn complexity_cmd(
    p: Option<&BigUint>,
    m: Option<&BigUint>,
    sequence: Option<&Path>,
    prime: Option<u64>,
    out: Option<&Path>,
) -> CliResult<()> {
    if let Some(path) = sequence {
        let values = read_sequence(path)?;
        let seq = SequenceSample::from_integers(&values, FieldKind::Rational)?;
        let rational = berlekamp_massey(&seq)?;
        let prime_field = match prime {
            Some(q) => {
                let field = FieldKind::prime(q)?;
                Some(berlekamp_massey(&SequenceSample::from_integers(&values, field)?)?)
            }
            None => None,
        };
        let reference = reference_length(&values)
            .map(|r| check_reference_length(&seq, r))
            .transpose()?;
        return emit_json(
            "complexity",
            SequenceComplexity {
                length: values.len(),
                rational,
                prime_field,
                reference,
            },
            out,
        );
    }
    let (Some(p), Some(m)) = (p, m) else {
        return Err(CliError::Invalid("give --p and --m, or --sequence".into()));
    };
    let params = DhParams::new(p.clone(), m.clone())?;
    let r = compare_koopman_vs_lfsr(&params)?;
    let equal = r.equal;
    emit_json("complexity", r, out)?;
    if !equal {
        return Err(CliError::Inconsistent("linear complexity differs from the Koopman dimension".into()));
    }
    Ok(())
}

pub fn run_cmd(config_path: &Path, golden: bool) -> CliResult<()> {
    let start = Instant::now();
    let text = fs::read_to_string(config_path)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", config_path.display())))?;
    let config = ExperimentConfig::parse(&text)?;
    let cases = config.cases()?;
    let records = report::build_records(&cases)?;
    let failures: usize = records.iter().map(|r| r.failures.len()).sum();

    let dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| config.output.path.clone());
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = match config.output.format {
        OutputFormat::Json => {
            let report = Report {
                schema_version: SCHEMA_VERSION,
                manifest: Manifest {
                    tool: report::TOOL,
                    version: report::VERSION,
                    config: config.clone(),
                    wall_clock_seconds: (!golden).then(|| start.elapsed().as_secs_f64()),
                },
                records,
            };
            let mut text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
            text.push('\n');
            let path = dir.join("report.json");
            write_file(&path, &text)?;
            path
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &records {
                w.serialize(CsvRow::from(r)).map_err(|e| CliError::Io(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
            let path = dir.join("report.csv");
            write_file(&path, &String::from_utf8_lossy(&bytes))?;
            path
        }
    };
    println!("{}", path.display());
    if failures > 0 {
        return Err(CliError::Inconsistent(format!("{failures} check(s) failed; see {}", path.display())));
    }
    Ok(())
}
