//! Parsers for τ, cusp and field-element literals.

use hilbert_cusps::hyperbolic_geometry::UpperHalfPoint;
use hilbert_cusps::{Cusp, FieldElement, TotallyRealField};
use num_complex::Complex64;
use num_rational::BigRational;

/// `x+yi`, `x-yi` is rejected later by the upper-half-space check; `yi` alone means x = 0.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let body = t.strip_suffix('i').ok_or_else(|| format!("complex literal `{s}` must end in `i`"))?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        v => v,
    };
    let re: f64 = re.parse().map_err(|_| format!("bad real part in `{s}`"))?;
    let im: f64 = im.trim_start_matches('+').parse().map_err(|_| format!("bad imaginary part in `{s}`"))?;
    Ok(Complex64::new(re, im))
}

/// n comma-separated complex literals.
pub fn parse_tau(field: &TotallyRealField, s: &str) -> Result<UpperHalfPoint, String> {
    let coords = s.split(',').map(parse_complex).collect::<Result<Vec<_>, _>>()?;
    if coords.len() != field.degree() {
        return Err(format!("tau needs {} coordinates for {}, got {}", field.degree(), field.name(), coords.len()));
    }
    UpperHalfPoint::new(coords).map_err(|e| e.to_string())
}

fn parse_rational(s: &str) -> Result<(i64, i64), String> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: i64 = n.parse().map_err(|_| format!("bad coefficient `{s}`"))?;
    let d: i64 = d.parse().map_err(|_| format!("bad coefficient `{s}`"))?;
    if d == 0 {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok((n, d))
}

/// Sums of terms `q`, `q*label` or `label` with rational q and basis labels.
/// A bare `q` is q·1.
pub fn parse_element(field: &TotallyRealField, s: &str) -> Result<FieldElement, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty field element".into());
    }
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = t.as_bytes();
    for k in 1..bytes.len() {
        if matches!(bytes[k], b'+' | b'-') && bytes[k - 1] != b'*' {
            terms.push(&t[start..k]);
            start = k;
        }
    }
    terms.push(&t[start..]);
    let n = field.degree();
    let mut acc = field.zero();
    for term in terms {
        let (sign, body) = match term.as_bytes().first() {
            Some(b'-') => (-1, &term[1..]),
            Some(b'+') => (1, &term[1..]),
            _ => (1, term),
        };
        let (coef, label) = match body.split_once('*') {
            Some((c, l)) => (c, Some(l)),
            None if body.chars().next().is_some_and(|c| c.is_ascii_digit()) => (body, None),
            None => ("1", Some(body)),
        };
        let (p, q) = parse_rational(coef)?;
        let mut unit = vec![0i64; n];
        match label {
            Some(l) => {
                let idx = field
                    .basis_labels()
                    .iter()
                    .position(|b| b == l)
                    .ok_or_else(|| format!("unknown basis symbol `{l}`; basis is {:?}", field.basis_labels()))?;
                unit[idx] = 1;
            }
            None => unit.copy_from_slice(field.one_coords()),
        }
        let e = field.element(&unit).map_err(|e| e.to_string())?;
        acc = &acc + &e.scale(&BigRational::new((sign * p).into(), q.into()));
    }
    Ok(acc)
}

/// `a:b` with field-element literals; `1:0` is ∞.
pub fn parse_cusp(field: &TotallyRealField, s: &str) -> Result<Cusp, String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("cusp literal `{s}` must look like a:b"))?;
    let a = parse_element(field, a)?;
    let b = parse_element(field, b)?;
    Cusp::new(field, &a, &b).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0+1i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-0.5+0.866i").unwrap(), Complex64::new(-0.5, 0.866));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("1e-3+1e2i").unwrap(), Complex64::new(1e-3, 100.0));
        assert_eq!(parse_complex("3-i").unwrap(), Complex64::new(3.0, -1.0));
        assert!(parse_complex("1+2").is_err());
        assert!(parse_complex("a+bi").is_err());
    }
}
