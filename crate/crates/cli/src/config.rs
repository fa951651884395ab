//! TOML experiment configuration.
//!
//! ```toml
//! primes = { from = 5, to = 61 }     # or an explicit list: [5, 7, 11]
//! generators = "smallest"            # "all", or a list of roots
//! q_policy = "minimal"               # "p_minus_2", or an integer
//! exponent_sweep = { sample = 8 }    # "all", or a list of exponents
//! seed = 7
//!
//! [output]
//! path = "out"
//! format = "json"                    # or "csv"
//! ```

use std::path::PathBuf;

use koopman_dh::modular::{is_primitive_root, primitive_roots};
use koopman_dh::{find_primitive_root, modular::is_prime, DhParams};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub primes: PrimeSet,
    #[serde(default)]
    pub generators: GeneratorPolicy,
    #[serde(default)]
    pub q_policy: QPolicy,
    #[serde(default)]
    pub exponent_sweep: ExponentSweep,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PrimeSet {
    List(Vec<u64>),
    Range { from: u64, to: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorName {
    Smallest,
    All,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorPolicy {
    Named(GeneratorName),
    Explicit(Vec<u64>),
}

impl Default for GeneratorPolicy {
    fn default() -> Self {
        GeneratorPolicy::Named(GeneratorName::Smallest)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QName {
    /// `(p-1)/2`
    Minimal,
    #[serde(rename = "p_minus_2")]
    PMinus2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QPolicy {
    Named(QName),
    Explicit(usize),
}

impl Default for QPolicy {
    fn default() -> Self {
        QPolicy::Named(QName::Minimal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllTag {
    All,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExponentSweep {
    All(AllTag),
    Sample { sample: usize },
    Explicit(Vec<u64>),
}

impl Default for ExponentSweep {
    fn default() -> Self {
        ExponentSweep::All(AllTag::All)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_output_path")]
    pub path: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

fn default_output_path() -> PathBuf {
    PathBuf::from("koopman-dh-out")
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            path: default_output_path(),
            format: OutputFormat::Json,
        }
    }
}

/// One `(p, m)` case with its lifting order and exponents to test.
#[derive(Debug, Clone)]
pub struct Case {
    pub params: DhParams,
    pub q: usize,
    pub exponents: Vec<u64>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Malformed(format!("config: {e}")))
    }

    pub fn primes(&self) -> CliResult<Vec<u64>> {
        let list = match &self.primes {
            PrimeSet::List(v) => {
                for &p in v {
                    if p <= 3 || !is_prime(&BigUint::from(p)) {
                        return Err(CliError::Invalid(format!("{p} is not an odd prime above 3")));
                    }
                }
                let mut v = v.clone();
                v.sort_unstable();
                v.dedup();
                v
            }
            PrimeSet::Range { from, to } => {
                if *from <= 3 || from > to {
                    return Err(CliError::Invalid(format!(
                        "prime range [{from}, {to}] must satisfy 3 < from <= to"
                    )));
                }
                (*from..=*to).filter(|&n| is_prime(&BigUint::from(n))).collect()
            }
        };
        if list.is_empty() {
            return Err(CliError::Invalid("no primes selected".into()));
        }
        Ok(list)
    }

    fn generators(&self, p: u64) -> CliResult<Vec<BigUint>> {
        let pb = BigUint::from(p);
        Ok(match &self.generators {
            GeneratorPolicy::Named(GeneratorName::Smallest) => vec![find_primitive_root(&pb)?],
            GeneratorPolicy::Named(GeneratorName::All) => primitive_roots(&pb)?,
            GeneratorPolicy::Explicit(list) => {
                let mut out = Vec::new();
                for &m in list {
                    let mb = BigUint::from(m);
                    if m < 2 || m >= p || !is_primitive_root(&mb, &pb)? {
                        return Err(CliError::Invalid(format!("{m} is not a primitive root modulo {p}")));
                    }
                    out.push(mb);
                }
                out.sort();
                out.dedup();
                out
            }
        })
    }

    fn q_for(&self, p: u64) -> CliResult<usize> {
        let p = p as usize;
        match self.q_policy {
            QPolicy::Named(QName::Minimal) => Ok((p - 1) / 2),
            QPolicy::Named(QName::PMinus2) => Ok(p - 2),
            QPolicy::Explicit(q) if q <= p - 2 => Ok(q),
            QPolicy::Explicit(q) => Err(CliError::Invalid(format!("q = {q} exceeds p - 2 for p = {p}"))),
        }
    }

    /// Exponents for one case. Sampling draws from a stream seeded by the
    /// config seed and the case, so reruns select the same exponents.
    fn exponents(&self, p: u64, m: &BigUint) -> CliResult<Vec<u64>> {
        match &self.exponent_sweep {
            ExponentSweep::All(_) => Ok((1..p).collect()),
            ExponentSweep::Sample { sample } => {
                let m64: u64 = m.try_into().map_err(|_| CliError::Invalid("generator too large".into()))?;
                let case_seed = self.seed ^ p.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ m64.rotate_left(32);
                let mut rng = ChaCha8Rng::seed_from_u64(case_seed);
                let amount = (*sample).min(p as usize - 1);
                let mut picked: Vec<u64> = rand::seq::index::sample(&mut rng, p as usize - 1, amount)
                    .into_iter()
                    .map(|i| i as u64 + 1)
                    .collect();
                picked.sort_unstable();
                Ok(picked)
            }
            ExponentSweep::Explicit(list) => {
                for &e in list {
                    if e == 0 || e >= p {
                        return Err(CliError::Invalid(format!("exponent {e} outside [1, {}]", p - 1)));
                    }
                }
                let mut v = list.clone();
                v.sort_unstable();
                v.dedup();
                Ok(v)
            }
        }
    }

    /// Expands the configuration into cases ordered by `(p, m)`.
    pub fn cases(&self) -> CliResult<Vec<Case>> {
        let mut out = Vec::new();
        for p in self.primes()? {
            let q = self.q_for(p)?;
            for m in self.generators(p)? {
                let exponents = self.exponents(p, &m)?;
                out.push(Case {
                    params: DhParams::new(p, m)?,
                    q,
                    exponents,
                });
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_shapes() {
        let c = ExperimentConfig::parse(
            r#"
            primes = { from = 5, to = 13 }
            generators = "all"
            q_policy = "p_minus_2"
            exponent_sweep = { sample = 3 }
            seed = 9
            [output]
            path = "x"
            format = "csv"
            "#,
        )
        .unwrap();
        assert_eq!(c.primes().unwrap(), vec![5, 7, 11, 13]);
        assert_eq!(c.output.format, OutputFormat::Csv);
        let cases = c.cases().unwrap();
        // φ(4) + φ(6) + φ(10) + φ(12) generators
        assert_eq!(cases.len(), 2 + 2 + 4 + 4);
        assert!(cases.iter().all(|k| k.exponents.len() == 3));
        assert_eq!(cases[0].q, 3);

        let c = ExperimentConfig::parse("primes = [7, 5]\nq_policy = 2\nexponent_sweep = [1, 4]").unwrap();
        let cases = c.cases().unwrap();
        assert_eq!((cases.len(), cases[0].q), (2, 2));
        assert_eq!(cases[0].exponents, vec![1, 4]);
    }

    #[test]
    fn sampling_is_seeded() {
        let text = "primes = [101]\nexponent_sweep = { sample = 5 }\nseed = 3";
        let a = ExperimentConfig::parse(text).unwrap().cases().unwrap();
        let b = ExperimentConfig::parse(text).unwrap().cases().unwrap();
        assert_eq!(a[0].exponents, b[0].exponents);
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            "primes = [3]",
            "primes = [9]",
            "primes = { from = 2, to = 11 }",
            "primes = [7]\nq_policy = 6",
            "primes = [7]\ngenerators = [2]",
            "primes = [7]\nexponent_sweep = [7]",
        ] {
            let err = ExperimentConfig::parse(text).and_then(|c| c.cases()).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}");
        }
        assert_eq!(ExperimentConfig::parse("primes = ").unwrap_err().exit_code(), 3);
        assert_eq!(ExperimentConfig::parse("primes = [5]\nbogus = 1").unwrap_err().exit_code(), 3);
    }
}
