//! Declarative field-spec files (JSON or TOML).

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Deserialize;

use super::{FieldData, TotallyRealField, ZetaKind, DEFAULT_PRECISION_BITS};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecFormat {
    Json,
    Toml,
}

/// A number written as an integer, a float, or a string holding an exact
/// rational (`"-3/7"`) or decimal (`"1.2469796037174670610500097680"`).
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Num {
    Int(i64),
    Float(f64),
    Str(String),
}

impl Num {
    fn exact(&self) -> Result<BigRational> {
        match self {
            Num::Int(i) => Ok(BigRational::from_integer((*i).into())),
            Num::Float(f) => {
                BigRational::from_float(*f).ok_or_else(|| Error::InvalidFieldSpec(format!("non-finite number {f}")))
            }
            Num::Str(s) => parse_exact(s),
        }
    }
}

/// Parses `a`, `a/b` or a decimal with optional exponent into an exact rational.
pub fn parse_exact(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidFieldSpec(format!("cannot parse number {s:?}"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a = BigInt::from_str(a.trim()).map_err(|_| bad())?;
        let b = BigInt::from_str(b.trim()).map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = BigInt::from_str(&format!("{int}{frac}")).map_err(|_| bad())?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if shift >= 0 {
        BigRational::from_integer(digits * ten.pow(shift as u32))
    } else {
        BigRational::new(digits, ten.pow((-shift) as u32))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(default)]
    name: Option<String>,
    degree: usize,
    #[serde(default)]
    basis_labels: Option<Vec<String>>,
    mult_table: Vec<Vec<Vec<Num>>>,
    embeddings: Vec<Vec<Num>>,
    discriminant: Num,
    fundamental_units: Vec<Vec<Num>>,
    regulator: Num,
    index_plus_sq: u32,
    #[serde(default)]
    primitive_poly: Option<Vec<i64>>,
    #[serde(default)]
    class_number: Option<u32>,
}

/// Parses and validates a field spec from text.
pub fn parse_field_spec(text: &str, format: SpecFormat, precision_bits: u32) -> Result<TotallyRealField> {
    let raw: RawSpec = match format {
        SpecFormat::Json => serde_json::from_str(text).map_err(|e| Error::InvalidFieldSpec(e.to_string()))?,
        SpecFormat::Toml => toml::from_str(text).map_err(|e| Error::InvalidFieldSpec(e.to_string()))?,
    };
    let n = raw.degree;
    if raw.mult_table.len() != n {
        return Err(Error::InvalidFieldSpec(format!("degree {n} but mult_table has {} rows", raw.mult_table.len())));
    }
    if raw.class_number.is_some_and(|h| h != 1) {
        return Err(Error::UnsupportedField("only class number one is supported".into()));
    }
    let table = |rows: &[Vec<Num>]| -> Result<Vec<Vec<BigRational>>> {
        rows.iter().map(|r| r.iter().map(Num::exact).collect()).collect()
    };
    let mult_table = raw.mult_table.iter().map(|r| table(r)).collect::<Result<Vec<_>>>()?;
    let disc = raw.discriminant.exact()?;
    if !disc.is_integer() {
        return Err(Error::InvalidFieldSpec("discriminant must be an integer".into()));
    }
    let regulator = crate::linalg::rational_to_f64(&raw.regulator.exact()?);
    let labels = raw.basis_labels.unwrap_or_else(|| {
        (0..n).map(|i| if i == 0 { "1".to_string() } else { format!("e{i}") }).collect()
    });
    let data = FieldData {
        name: raw.name.unwrap_or_else(|| format!("degree-{n} field of discriminant {}", disc.to_integer())),
        basis_labels: labels,
        mult_table,
        embeddings: table(&raw.embeddings)?,
        discriminant: disc.to_integer(),
        fundamental_units: table(&raw.fundamental_units)?,
        regulator: if n == 1 && regulator.is_zero() { 1.0 } else { regulator },
        index_plus_sq: raw.index_plus_sq,
        zeta: match raw.primitive_poly {
            Some(c) => ZetaKind::Polynomial { coeffs: c },
            None if n == 1 => ZetaKind::Rational,
            None => ZetaKind::Unavailable,
        },
        precision_bits,
    };
    TotallyRealField::new(data)
}

/// Loads a field spec, choosing the format from the file extension.
pub fn load_field_spec(path: &Path, precision_bits: Option<u32>) -> Result<TotallyRealField> {
    let format = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => SpecFormat::Json,
        Some("toml") => SpecFormat::Toml,
        _ => return Err(Error::InvalidFieldSpec(format!("{}: expected a .json or .toml extension", path.display()))),
    };
    let text = std::fs::read_to_string(path)?;
    parse_field_spec(&text, format, precision_bits.unwrap_or(DEFAULT_PRECISION_BITS))
}
