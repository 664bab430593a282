//! Built-in fields: Q and the real quadratic fields of class number one.

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::number_field::{FieldData, TotallyRealField, ZetaKind, DEFAULT_PRECISION_BITS};

/// Upper bound (exclusive) of the whitelist below.
pub const CLASS_NUMBER_ONE_BOUND: i64 = 100;

/// Squarefree `m < 100` with h(Q(√m)) = 1.
pub const CLASS_NUMBER_ONE: &[i64] = &[
    2, 3, 5, 6, 7, 11, 13, 14, 17, 19, 21, 22, 23, 29, 31, 33, 37, 38, 41, 43, 46, 47, 53, 57, 59, 61, 62, 67, 69, 71,
    73, 77, 83, 86, 89, 93, 94, 97,
];

const CF_ITERATION_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadraticFieldRequest {
    pub m: i64,
    pub precision_bits: u32,
}

impl QuadraticFieldRequest {
    pub fn new(m: i64) -> Self {
        Self { m, precision_bits: DEFAULT_PRECISION_BITS }
    }
}

pub fn make_rationals(precision_bits: u32) -> Result<TotallyRealField> {
    let one = BigRational::one();
    TotallyRealField::new(FieldData {
        name: "Q".into(),
        basis_labels: vec!["1".into()],
        mult_table: vec![vec![vec![one.clone()]]],
        embeddings: vec![vec![one]],
        discriminant: BigInt::one(),
        fundamental_units: Vec::new(),
        regulator: 1.0,
        index_plus_sq: 1,
        zeta: ZetaKind::Rational,
        precision_bits,
    })
}

pub fn is_squarefree(m: i64) -> bool {
    let m = m.unsigned_abs();
    (2..).take_while(|d| d * d <= m).all(|d| !m.is_multiple_of(d * d))
}

/// The fundamental unit `a + bω > 1` of Z[ω] together with its norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalUnit {
    pub a: BigInt,
    pub b: BigInt,
    pub norm: i64,
}

fn omega_norm(m: i64, a: &BigInt, b: &BigInt) -> BigInt {
    if m % 4 == 1 {
        a * a + a * b - b * b * BigInt::from((m - 1) / 4)
    } else {
        a * a - b * b * BigInt::from(m)
    }
}

/// `floor((p + √d) / q)` exactly.
fn floor_quadratic(p: i128, q: i128, d: i128) -> i128 {
    let s = d.sqrt();
    // a ≤ (p+√d)/q  ⇔  a q - p ≤ √d (q > 0)  or  ≥ √d (q < 0)
    let below_sqrt = |v: i128| v < 0 || v * v < d;
    let le = |a: i128| {
        let v = a * q - p;
        if q > 0 {
            below_sqrt(v)
        } else {
            !below_sqrt(v)
        }
    };
    let mut a = (p + s).div_euclid(q);
    while !le(a) {
        a -= 1;
    }
    while le(a + 1) {
        a += 1;
    }
    a
}

/// Fundamental unit of Z[ω] from the continued fraction of -ω̄.
///
/// Every unit `a + bω > 1` has `a/b` within `1/(2b²)` of `-ω̄`, hence is a
/// convergent; the first convergent of unit norm is therefore fundamental.
pub fn fundamental_unit(m: i64) -> Result<FundamentalUnit> {
    let d = i128::from(m);
    let (mut p, mut q) = if m % 4 == 1 { (-1i128, 2i128) } else { (0, 1) };
    let (mut p_prev, mut p_cur) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q_cur) = (BigInt::one(), BigInt::zero());
    for _ in 0..CF_ITERATION_CAP {
        let a = floor_quadratic(p, q, d);
        let next_p = BigInt::from(a) * &p_cur + &p_prev;
        let next_q = BigInt::from(a) * &q_cur + &q_prev;
        p_prev = std::mem::replace(&mut p_cur, next_p);
        q_prev = std::mem::replace(&mut q_cur, next_q);
        if q_cur.is_positive() {
            let nm = omega_norm(m, &p_cur, &q_cur);
            if nm.abs().is_one() {
                let norm = if nm.is_positive() { 1 } else { -1 };
                return Ok(FundamentalUnit { a: p_cur, b: q_cur, norm });
            }
        }
        // ξ ← 1/(ξ - a)
        let p_next = a * q - p;
        let q_next = (d - p_next * p_next) / q;
        p = p_next;
        q = q_next;
    }
    Err(Error::PrecisionExhausted(CF_ITERATION_CAP))
}

/// Truth table for the totally positive generator of a real quadratic unit
/// group with fundamental unit `ε > 0`.
///
/// Returns `(k, index_plus_sq)` with `ε^k` generating O^{×,+}.
pub fn totally_positive_rule(norm: i64, conjugate_positive: bool) -> (u32, u32) {
    match (norm, conjugate_positive) {
        // ε ε' = -1 with ε > 0: ε' < 0, mixed signs; only even powers are positive.
        (-1, false) => (2, 1),
        // ε ε' = 1 with ε > 0: ε' > 0, ε itself is totally positive and not a square.
        (1, true) => (1, 2),
        _ => unreachable!("norm {norm} is inconsistent with conjugate sign {conjugate_positive}"),
    }
}

pub fn make_real_quadratic(req: &QuadraticFieldRequest) -> Result<TotallyRealField> {
    let m = req.m;
    if m < 2 || !is_squarefree(m) {
        return Err(Error::NotSquarefree(m));
    }
    if !CLASS_NUMBER_ONE.contains(&m) {
        return Err(Error::NotClassNumberOne(m));
    }
    let bits = req.precision_bits;
    let guard = bits as usize + 16;
    let root = BigRational::new((BigInt::from(m) << (2 * guard)).sqrt(), BigInt::one() << guard);
    let r = |n: i64| BigRational::from_integer(n.into());
    let half = BigRational::new(1.into(), 2.into());
    let one_mod_four = m % 4 == 1;
    let (w1, w2, square, disc) = if one_mod_four {
        (&(r(1) + &root) * &half, &(r(1) - &root) * &half, vec![r((m - 1) / 4), r(1)], m)
    } else {
        (root.clone(), -root.clone(), vec![r(m), r(0)], 4 * m)
    };
    let unit = fundamental_unit(m)?;
    let eps1 = unit.a.to_f64().unwrap_or(f64::NAN) + unit.b.to_f64().unwrap_or(f64::NAN) * crate::linalg::rational_to_f64(&w1);
    // ε > 0 and ε ε' = N(ε), so the conjugate has the sign of the norm.
    let (power, index) = totally_positive_rule(unit.norm, unit.norm > 0);
    let mut ua = BigRational::from_integer(unit.a.clone());
    let mut ub = BigRational::from_integer(unit.b.clone());
    if power == 2 {
        // (a + bω)² = a² + 2abω + b²ω², ω² = square[0] + square[1] ω
        let (a, b) = (ua.clone(), ub.clone());
        ua = &a * &a + &b * &b * &square[0];
        ub = r(2) * &a * &b + &b * &b * &square[1];
    }
    TotallyRealField::new(FieldData {
        name: format!("Q(sqrt {m})"),
        basis_labels: vec!["1".into(), "w".into()],
        mult_table: vec![vec![vec![r(1), r(0)], vec![r(0), r(1)]], vec![vec![r(0), r(1)], square.clone()]],
        embeddings: vec![vec![r(1), w1], vec![r(1), w2]],
        discriminant: BigInt::from(disc),
        fundamental_units: vec![vec![ua, ub]],
        regulator: eps1.ln(),
        index_plus_sq: index,
        zeta: ZetaKind::Quadratic { discriminant: disc },
        precision_bits: bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_units() {
        let u5 = fundamental_unit(5).unwrap();
        assert_eq!((u5.a, u5.b, u5.norm), (0.into(), 1.into(), -1));
        let u3 = fundamental_unit(3).unwrap();
        assert_eq!((u3.a, u3.b, u3.norm), (2.into(), 1.into(), 1));
        let u2 = fundamental_unit(2).unwrap();
        assert_eq!((u2.a, u2.b, u2.norm), (1.into(), 1.into(), -1));
        // 1520 + 273√31
        let u31 = fundamental_unit(31).unwrap();
        assert_eq!((u31.a, u31.b, u31.norm), (1520.into(), 273.into(), 1));
        // (5 + √29)/2 = 2 + ω
        let u29 = fundamental_unit(29).unwrap();
        assert_eq!((u29.a, u29.b, u29.norm), (2.into(), 1.into(), -1));
    }

    #[test]
    fn invariants_of_examples() {
        let k = make_real_quadratic(&QuadraticFieldRequest::new(5)).unwrap();
        assert_eq!(k.discriminant(), &BigInt::from(5));
        assert_eq!(k.index_plus_sq(), 1);
        assert!((k.regulator() - 0.481_211_825_059_603_4).abs() < 1e-12);
        // φ² = 1 + φ
        assert_eq!(k.fundamental_units()[0], k.element(&[1, 1]).unwrap());
        let k = make_real_quadratic(&QuadraticFieldRequest::new(3)).unwrap();
        assert_eq!((k.discriminant().clone(), k.index_plus_sq()), (BigInt::from(12), 2));
        assert_eq!(k.fundamental_units()[0], k.element(&[2, 1]).unwrap());
        let k = make_real_quadratic(&QuadraticFieldRequest::new(2)).unwrap();
        assert_eq!((k.discriminant().clone(), k.index_plus_sq()), (BigInt::from(8), 1));
        assert_eq!(k.fundamental_units()[0], k.element(&[3, 2]).unwrap());
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(matches!(make_real_quadratic(&QuadraticFieldRequest::new(12)), Err(Error::NotSquarefree(12))));
        assert!(matches!(make_real_quadratic(&QuadraticFieldRequest::new(10)), Err(Error::NotClassNumberOne(10))));
        assert!(matches!(make_real_quadratic(&QuadraticFieldRequest::new(1)), Err(Error::NotSquarefree(1))));
    }

    #[test]
    fn whole_whitelist_builds() {
        for &m in CLASS_NUMBER_ONE {
            let k = make_real_quadratic(&QuadraticFieldRequest::new(m)).unwrap();
            assert!(k.regulator() > 0.0, "m = {m}");
        }
    }

    #[test]
    fn floor_handles_both_signs() {
        assert_eq!(floor_quadratic(0, 1, 2), 1);
        assert_eq!(floor_quadratic(0, -1, 2), -2);
        assert_eq!(floor_quadratic(-1, 2, 5), 0);
        assert_eq!(floor_quadratic(3, -2, 7), -3);
    }
}
