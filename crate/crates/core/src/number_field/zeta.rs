//! Euler products for ζ_K(2).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::{TotallyRealField, ZetaKind};
use crate::error::{Error, Result};
use crate::linalg::rational_det;

const MAX_PRIME_BOUND: u64 = 200_000_000;

/// Truncated Euler product with an absolute error bar.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZetaValue {
    pub value: f64,
    /// Bound on ζ_K(2) minus the partial product, from a tail of at most
    /// `4^n / prime_bound` in the logarithm.
    pub tail_bound: f64,
    pub prime_bound: u64,
}

pub(crate) fn zeta_k_2(field: &TotallyRealField, prime_bound: u64) -> Result<ZetaValue> {
    if prime_bound < 2 {
        return Err(Error::InvalidInput("prime_bound must be at least 2".into()));
    }
    if prime_bound > MAX_PRIME_BOUND {
        return Err(Error::InvalidInput(format!("prime_bound above {MAX_PRIME_BOUND}")));
    }
    let n = field.degree();
    let factor: Box<dyn Fn(u64) -> Vec<u32>> = match field.zeta_kind() {
        ZetaKind::Rational => Box::new(|_| vec![1]),
        ZetaKind::Quadratic { discriminant } => {
            let d = *discriminant;
            Box::new(move |p| match kronecker(d, p) {
                1 => vec![1, 1],
                -1 => vec![2],
                _ => vec![1],
            })
        }
        ZetaKind::Polynomial { coeffs } => {
            check_monogenic(field, coeffs)?;
            let coeffs = coeffs.clone();
            Box::new(move |p| residue_degrees(&coeffs, p))
        }
        ZetaKind::Unavailable => {
            return Err(Error::UnsupportedField(
                "no primitive-element polynomial supplied; cannot split primes".into(),
            ))
        }
    };
    let mut log = 0.0;
    for p in primes_up_to(prime_bound) {
        let pf = p as f64;
        for f in factor(p) {
            log -= (-pf.powi(-2 * f as i32)).ln_1p();
        }
    }
    let value = log.exp();
    let tail = 4f64.powi(n as i32) / prime_bound as f64;
    Ok(ZetaValue { value, tail_bound: value * tail.exp_m1(), prime_bound })
}

pub(crate) fn primes_up_to(bound: u64) -> Vec<u64> {
    let b = bound as usize;
    let mut composite = vec![false; b + 1];
    let mut out = Vec::new();
    for i in 2..=b {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= b {
            composite[j] = true;
            j += i;
        }
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let mut base = u128::from(b % m);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % u128::from(m);
        }
        base = base * base % u128::from(m);
        e >>= 1;
    }
    b = acc as u64;
    b
}

/// Kronecker symbol (d / p) for a prime p.
pub(crate) fn kronecker(d: i64, p: u64) -> i32 {
    if p == 2 {
        return match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    let r = d.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Degrees of the distinct irreducible factors of `f` mod `p`.
fn residue_degrees(coeffs: &[i64], p: u64) -> Vec<u32> {
    let f: Vec<u64> = coeffs.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
    let n = f.len() - 1;
    let x = vec![0, 1];
    let mut h = x.clone();
    let mut counts = vec![0u32; n + 1];
    for d in 1..=n {
        h = poly_powmod(&h, p, &f, p);
        let g = poly_gcd(poly_sub(&h, &x, p), f.clone(), p);
        let deg = g.len().saturating_sub(1) as u32;
        let lower: u32 = (1..d).filter(|e| d % e == 0).map(|e| e as u32 * counts[e]).sum();
        counts[d] = (deg - lower) / d as u32;
    }
    (1..=n).flat_map(|d| std::iter::repeat_n(d as u32, counts[d] as usize)).collect()
}

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let len = a.len().max(b.len());
    trim(
        (0..len)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect(),
    )
}

fn poly_rem(mut a: Vec<u64>, m: &[u64], p: u64) -> Vec<u64> {
    let m = trim(m.to_vec());
    let dm = m.len() - 1;
    let inv = pow_mod(m[dm], p - 2, p);
    a = trim(a);
    while a.len() > dm {
        let da = a.len() - 1;
        let q = (u128::from(a[da]) * u128::from(inv) % u128::from(p)) as u64;
        for i in 0..=dm {
            let s = (u128::from(q) * u128::from(m[i]) % u128::from(p)) as u64;
            a[da - dm + i] = (a[da - dm + i] + p - s) % p;
        }
        a = trim(a);
    }
    a
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((u128::from(out[i + j]) + u128::from(x) * u128::from(y)) % u128::from(p)) as u64;
        }
    }
    poly_rem(out, m, p)
}

fn poly_powmod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(a.to_vec(), m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, m, p);
        }
        b = poly_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    a = trim(a);
    b = trim(b);
    while !b.is_empty() {
        let r = poly_rem(a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Requires `f` monic of degree n with disc(f) = Δ_K, so that Z[θ] = O_K and
/// factoring f mod p describes every prime.
fn check_monogenic(field: &TotallyRealField, coeffs: &[i64]) -> Result<()> {
    let n = field.degree();
    if coeffs.len() != n + 1 || coeffs[n] != 1 {
        return Err(Error::UnsupportedField(format!(
            "primitive_poly must be monic of degree {n} (coefficients low to high)"
        )));
    }
    let disc = poly_discriminant(coeffs);
    if disc != BigRational::from_integer(field.discriminant().clone()) {
        return Err(Error::UnsupportedField(format!(
            "disc(primitive_poly) = {disc} differs from the field discriminant; Euler factors at primes dividing the index are undetermined"
        )));
    }
    Ok(())
}

/// Discriminant of a monic integer polynomial via the Sylvester resultant.
pub(crate) fn poly_discriminant(coeffs: &[i64]) -> BigRational {
    let n = coeffs.len() - 1;
    let f: Vec<BigInt> = coeffs.iter().rev().map(|&c| c.into()).collect();
    let df: Vec<BigInt> = (0..n).map(|i| BigInt::from(coeffs[n - i]) * BigInt::from((n - i) as i64)).collect();
    let size = 2 * n - 1;
    let mut m = vec![vec![BigRational::zero(); size]; size];
    for r in 0..n - 1 {
        for (i, c) in f.iter().enumerate() {
            m[r][r + i] = BigRational::from_integer(c.clone());
        }
    }
    for r in 0..n {
        for (i, c) in df.iter().enumerate() {
            m[n - 1 + r][r + i] = BigRational::from_integer(c.clone());
        }
    }
    let res = if n == 1 { BigRational::from_integer(1.into()) } else { rational_det(m) };
    if (n * (n - 1) / 2) % 2 == 1 {
        -res
    } else {
        res
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_small() {
        // (5/p): 1 for p = ±1 mod 5
        assert_eq!(kronecker(5, 11), 1);
        assert_eq!(kronecker(5, 7), -1);
        assert_eq!(kronecker(5, 5), 0);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(8, 2), 0);
        assert_eq!(kronecker(8, 7), 1);
    }

    #[test]
    fn cubic_factor_patterns() {
        // x^3 + x^2 - 2x - 1: 7 ramifies, 13 splits (13 = 1 mod 7), 2 is inert
        let f = [-1, -2, 1, 1];
        assert_eq!(residue_degrees(&f, 13), vec![1, 1, 1]);
        assert_eq!(residue_degrees(&f, 2), vec![3]);
        assert_eq!(residue_degrees(&f, 7), vec![1]);
        assert_eq!(poly_discriminant(&f), BigRational::from_integer(49.into()));
        assert_eq!(poly_discriminant(&[-5, 0, 1]), BigRational::from_integer(20.into()));
    }

    #[test]
    fn sieve() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }
}
