//! Data ingest and serialization helpers shared by the library and the CLI.
//!
//! CSV inputs carry one integer per line with no header. Exact rationals
//! serialize as `{"num": "...", "den": "..."}` string pairs so that no
//! precision is lost in JSON.

use std::fmt::Display;
use std::io::Read;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::RatMatrix;

/// Lossless JSON form of a rational.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactRational {
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for ExactRational {
    fn from(r: &BigRational) -> Self {
        ExactRational {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

impl TryFrom<&ExactRational> for BigRational {
    type Error = Error;

    fn try_from(r: &ExactRational) -> Result<BigRational> {
        let parse = |s: &str| {
            s.parse::<BigInt>()
                .map_err(|_| Error::MalformedInput(format!("not an integer: {s:?}")))
        };
        let (num, den) = (parse(&r.num)?, parse(&r.den)?);
        if num_traits::Zero::is_zero(&den) {
            return Err(Error::MalformedInput("zero denominator".into()));
        }
        Ok(BigRational::new(num, den))
    }
}

pub fn ser_display<T: Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn ser_display_seq<T: Display, S: Serializer>(
    v: &[T],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

pub fn ser_rational<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    ExactRational::from(v).serialize(s)
}

pub fn ser_rational_seq<S: Serializer>(
    v: &[BigRational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ExactRational::from))
}

pub fn ser_rational_matrix<S: Serializer>(
    m: &RatMatrix,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(
        m.to_rows()
            .iter()
            .map(|row| row.iter().map(ExactRational::from).collect::<Vec<_>>()),
    )
}

/// Rounds to 15 significant digits, the precision floating mirrors are
/// reported with.
pub fn round_sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

pub fn ser_f64_15<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig15(*v))
}

/// Reads one integer per line; blank trailing lines are ignored.
pub fn read_integer_csv<R: Read>(reader: R) -> Result<Vec<BigInt>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::MalformedInput(e.to_string()))?;
        if record.len() != 1 {
            return Err(Error::MalformedInput(format!(
                "line {}: expected one value, found {}",
                line + 1,
                record.len()
            )));
        }
        let field = &record[0];
        let v = field.parse::<BigInt>().map_err(|_| {
            Error::MalformedInput(format!("line {}: not an integer: {field:?}", line + 1))
        })?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::MalformedInput("no values".into()));
    }
    Ok(out)
}

/// Writes one value per line.
pub fn write_integer_csv<T: Display>(values: &[T]) -> String {
    let mut s = String::new();
    for v in values {
        s.push_str(&v.to_string());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_parsing() {
        let v = read_integer_csv("1\n3\n 2 \n-6\n".as_bytes()).unwrap();
        let expected: Vec<BigInt> = [1, 3, 2, -6].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(v, expected);
        assert!(read_integer_csv("1\nx\n".as_bytes()).is_err());
        assert!(read_integer_csv("1,2\n".as_bytes()).is_err());
        assert!(read_integer_csv("".as_bytes()).is_err());
    }

    #[test]
    fn rational_json_round_trip() {
        let r = BigRational::new((-3).into(), 12.into());
        let json = serde_json::to_string(&ExactRational::from(&r)).unwrap();
        assert_eq!(json, r#"{"num":"-1","den":"4"}"#);
        let back: ExactRational = serde_json::from_str(&json).unwrap();
        assert_eq!(BigRational::try_from(&back).unwrap(), r);
    }

    #[test]
    fn fifteen_digits() {
        assert_eq!(round_sig15(0.1 + 0.2), 0.3);
        assert_eq!(round_sig15(-1.0), -1.0);
    }
}
