//! Linear complexity via Berlekamp–Massey over an exact field, LFSR
//! generation, and the comparison against the minimal Koopman lifting.
//!
//! Connection coefficients are newest-first: `s_k = Σ_{i=1}^{L} c_i s_{k-i}`.
//! In companion form with `L = q + 1` this is `α_j = c_{L-j}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{FieldKind, RatMatrix, Solution};
use crate::lift::minimal_lifting_dimension;
use crate::modular::DhParams;

/// A finite sequence over an exact field, stored in canonical field form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSample {
    terms: Vec<BigRational>,
    field: FieldKind,
}

impl SequenceSample {
    pub fn new(terms: &[BigRational], field: FieldKind) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("empty sequence".into()));
        }
        let terms = terms.iter().map(|t| field.normalize(t)).collect::<Result<_>>()?;
        Ok(SequenceSample { terms, field })
    }

    pub fn from_integers(terms: &[BigInt], field: FieldKind) -> Result<Self> {
        let terms: Vec<BigRational> = terms.iter().cloned().map(BigRational::from_integer).collect();
        Self::new(&terms, field)
    }

    pub fn terms(&self) -> &[BigRational] {
        &self.terms
    }

    pub fn field(&self) -> &FieldKind {
        &self.field
    }
}

pub(crate) fn ser_field<S: Serializer>(f: &FieldKind, s: S) -> std::result::Result<S::Ok, S::Error> {
    match f {
        FieldKind::Rational => s.serialize_str("rational"),
        FieldKind::Prime(p) => s.collect_str(&format_args!("prime({p})")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearComplexityResult {
    pub length: usize,
    /// `c_1, …, c_L`.
    #[serde(serialize_with = "crate::io::ser_rational_seq")]
    pub connection: Vec<BigRational>,
    #[serde(serialize_with = "ser_field")]
    pub field: FieldKind,
}

impl LinearComplexityResult {
    /// The same recurrence as closing coefficients `α_0, …, α_{L-1}`.
    pub fn alpha(&self) -> Vec<BigRational> {
        self.connection.iter().rev().cloned().collect()
    }
}

/// Shortest LFSR generating `seq`.
pub fn berlekamp_massey(seq: &SequenceSample) -> Result<LinearComplexityResult> {
    let f = &seq.field;
    let s = &seq.terms;
    // connection polynomial C(x) = 1 + C_1 x + … ; s_n + Σ C_i s_{n-i} = 0
    let mut c = vec![BigRational::one()];
    let mut b = vec![BigRational::one()];
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut last_disc = BigRational::one();

    for n in 0..s.len() {
        let mut disc = s[n].clone();
        for i in 1..=len {
            if let Some(ci) = c.get(i) {
                disc = f.add(&disc, &f.mul(ci, &s[n - i]));
            }
        }
        if disc.is_zero() {
            shift += 1;
            continue;
        }
        let coef = f.mul(&disc, &f.inv(&last_disc).expect("nonzero discrepancy"));
        let prev = c.clone();
        if c.len() < b.len() + shift {
            c.resize(b.len() + shift, BigRational::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            c[i + shift] = f.sub(&c[i + shift], &f.mul(&coef, bi));
        }
        if 2 * len <= n {
            len = n + 1 - len;
            b = prev;
            last_disc = disc;
            shift = 1;
        } else {
            shift += 1;
        }
    }

    c.resize(len + 1, BigRational::zero());
    let connection: Vec<BigRational> = c[1..].iter().map(|x| f.neg(x)).collect();
    let result = LinearComplexityResult {
        length: len,
        connection,
        field: f.clone(),
    };
    let regenerated = lfsr_generate(&result.connection, &s[..len], s.len(), f)?;
    if regenerated != *s {
        return Err(Error::Internal("Berlekamp–Massey output fails to regenerate".into()));
    }
    Ok(result)
}

/// Extends `seed` to `n` terms with `s_k = Σ c_i s_{k-i}`.
pub fn lfsr_generate(
    connection: &[BigRational],
    seed: &[BigRational],
    n: usize,
    field: &FieldKind,
) -> Result<Vec<BigRational>> {
    if seed.len() != connection.len() {
        return Err(Error::DimensionMismatch {
            expected: connection.len(),
            actual: seed.len(),
        });
    }
    let mut out: Vec<BigRational> =
        seed.iter().map(|x| field.normalize(x)).collect::<Result<_>>()?;
    let l = connection.len();
    while out.len() < n {
        let k = out.len();
        let next = connection
            .iter()
            .enumerate()
            .fold(BigRational::zero(), |acc, (i, ci)| {
                field.add(&acc, &field.mul(ci, &out[k - 1 - i]))
            });
        out.push(next);
    }
    if l == 0 {
        // the empty register emits zeros
        out.resize(n, BigRational::zero());
    }
    out.truncate(n);
    Ok(out)
}

/// Smallest order whose exact fit reproduces the whole sequence, found by
/// solving the recurrence equations order by order. `None` if no order up
/// to `max_order` works.
pub fn bruteforce_min_lfsr(
    seq: &SequenceSample,
    max_order: usize,
) -> Result<Option<LinearComplexityResult>> {
    let s = &seq.terms;
    let f = &seq.field;
    for l in 0..=max_order {
        if l == 0 {
            if s.iter().all(Zero::is_zero) {
                return Ok(Some(LinearComplexityResult {
                    length: 0,
                    connection: vec![],
                    field: f.clone(),
                }));
            }
            continue;
        }
        if s.len() <= l {
            return Ok(Some(LinearComplexityResult {
                length: l,
                connection: vec![BigRational::zero(); l],
                field: f.clone(),
            }));
        }
        let rows: Vec<Vec<BigRational>> =
            (l..s.len()).map(|k| (1..=l).map(|i| s[k - i].clone()).collect()).collect();
        let a = RatMatrix::from_rows(rows)?;
        if let Solution::Solved { x, .. } = a.solve(&s[l..], f)? {
            return Ok(Some(LinearComplexityResult {
                length: l,
                connection: x,
                field: f.clone(),
            }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KoopmanLfsrReport {
    pub lfsr_length: usize,
    pub koopman_dimension: usize,
    pub equal: bool,
    /// Newest-first LFSR taps.
    #[serde(serialize_with = "crate::io::ser_rational_seq")]
    pub connection: Vec<BigRational>,
    /// The same taps in closing-coefficient order.
    #[serde(serialize_with = "crate::io::ser_rational_seq")]
    pub alpha: Vec<BigRational>,
}

/// Two periods of the base orbit, as integers.
pub fn two_period_sequence(params: &DhParams) -> Result<Vec<BigInt>> {
    let traj = params.base_trajectory()?;
    let n = params.period()?;
    Ok((0..2 * n).map(|k| BigInt::from(traj.state(k))).collect())
}

pub fn compare_koopman_vs_lfsr(params: &DhParams) -> Result<KoopmanLfsrReport> {
    let seq = SequenceSample::from_integers(&two_period_sequence(params)?, FieldKind::Rational)?;
    let lc = berlekamp_massey(&seq)?;
    let koopman_dimension = minimal_lifting_dimension(params)?;
    Ok(KoopmanLfsrReport {
        lfsr_length: lc.length,
        koopman_dimension,
        equal: lc.length == koopman_dimension,
        alpha: lc.alpha(),
        connection: lc.connection,
    })
}

/// Outcome of checking a stated LFSR length against the computed one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReferenceCheck {
    pub reference_length: usize,
    pub computed_length: usize,
    pub agrees: bool,
    pub note: Option<String>,
}

pub fn check_reference_length(seq: &SequenceSample, reference_length: usize) -> Result<ReferenceCheck> {
    let lc = berlekamp_massey(seq)?;
    let agrees = lc.length == reference_length;
    let note = (!agrees).then(|| {
        let taps: Vec<String> = lc.connection.iter().map(ToString::to_string).collect();
        let field = match &lc.field {
            FieldKind::Rational => "the rationals".to_string(),
            FieldKind::Prime(p) => format!("GF({p})"),
        };
        format!(
            "stated length {reference_length} is not reproduced: over {field} the {} terms satisfy \
             a recurrence of order {} with taps [{}]",
            seq.terms.len(),
            lc.length,
            taps.join(", ")
        )
    });
    Ok(ReferenceCheck {
        reference_length,
        computed_length: lc.length,
        agrees,
        note,
    })
}
