//! Exact arithmetic in a totally real number field of class number one.
//!
//! Elements are stored as rational coordinate vectors over an integral basis
//! `e_1..e_n`. Real embeddings are kept as fixed-point integers scaled by
//! `2^precision_bits`, so an exact element can be pushed through `σ_j` with
//! error far below f64 resolution before it is rounded; hot loops over
//! integral coordinates use a plain f64 copy of the same matrix.

mod ideal;
mod spec_file;
pub(crate) mod units;
mod zeta;

pub use ideal::Bezout;
pub use spec_file::{load_field_spec, parse_field_spec, SpecFormat};
pub use units::{UnitLattice, UNIT_CELL_LOWER};
pub use zeta::ZetaValue;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{f64_det, f64_inverse, rational_det, rational_solve, rational_to_f64};

/// Default fractional bits of the fixed-point embedding table.
pub const DEFAULT_PRECISION_BITS: u32 = 80;

/// Element of K in integral-basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    coords: Vec<BigRational>,
}

impl FieldElement {
    pub fn new(coords: Vec<BigRational>) -> Self {
        Self { coords }
    }

    pub fn zero(n: usize) -> Self {
        Self { coords: vec![BigRational::zero(); n] }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Self { coords: coords.iter().map(|&c| BigRational::from_integer(c.into())).collect() }
    }

    pub fn from_big_ints(coords: &[BigInt]) -> Self {
        Self { coords: coords.iter().map(|c| BigRational::from_integer(c.clone())).collect() }
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn degree(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    /// Integer coordinates, if integral.
    pub fn integer_coords(&self) -> Option<Vec<BigInt>> {
        self.is_integral().then(|| self.coords.iter().map(|c| c.to_integer()).collect())
    }

    /// Integer coordinates as i64, if integral and small enough.
    pub fn small_coords(&self) -> Option<Vec<i64>> {
        self.coords.iter().map(|c| if c.is_integer() { c.to_integer().to_i64() } else { None }).collect()
    }

    /// Least common multiple of the coordinate denominators.
    pub fn denominator(&self) -> BigInt {
        self.coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self { coords: self.coords.iter().map(|c| c * k).collect() }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        FieldElement { coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        FieldElement { coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { coords: self.coords.iter().map(|a| -a).collect() }
    }
}

impl Mul<&FieldElement> for &BigRational {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        rhs.scale(self)
    }
}

/// Which zeta routine applies to a field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZetaKind {
    Rational,
    /// Real quadratic with fundamental discriminant `d`.
    Quadratic { discriminant: i64 },
    /// Monic integer polynomial of a primitive element generating O_K.
    Polynomial { coeffs: Vec<i64> },
    Unavailable,
}

/// Raw description of a field, validated by [`TotallyRealField::new`].
#[derive(Clone, Debug)]
pub struct FieldData {
    pub name: String,
    pub basis_labels: Vec<String>,
    /// `mult_table[i][j]` = coordinates of `e_i e_j`.
    pub mult_table: Vec<Vec<Vec<BigRational>>>,
    /// `embeddings[i][j]` = σ_i(e_j), as exact rational approximations.
    pub embeddings: Vec<Vec<BigRational>>,
    pub discriminant: BigInt,
    /// Coordinates of totally positive units generating O^{×,+}.
    pub fundamental_units: Vec<Vec<BigRational>>,
    pub regulator: f64,
    pub index_plus_sq: u32,
    pub zeta: ZetaKind,
    pub precision_bits: u32,
}

/// A validated totally real field with h_K = 1.
#[derive(Clone, Debug)]
pub struct TotallyRealField {
    name: String,
    n: usize,
    labels: Vec<String>,
    mult: Vec<Vec<Vec<BigRational>>>,
    /// Flattened integer table, `mult_int[(i*n + j)*n + k]`.
    mult_int: Vec<i64>,
    emb_fixed: Vec<Vec<BigInt>>,
    bits: u32,
    /// `emb[j][i]` = σ_j(e_i) rounded to f64.
    emb: Vec<Vec<f64>>,
    emb_inv: Vec<Vec<f64>>,
    discriminant: BigInt,
    units: Vec<FieldElement>,
    unit_inverses: Vec<FieldElement>,
    regulator: f64,
    index_plus_sq: u32,
    zeta: ZetaKind,
    one: FieldElement,
    one_int: Vec<i64>,
    lattice: UnitLattice,
}

fn big(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidFieldSpec(msg.into())
}

impl TotallyRealField {
    /// Validates `data` against every field invariant and builds the field.
    pub fn new(data: FieldData) -> Result<Self> {
        let n = data.mult_table.len();
        if n == 0 {
            return Err(invalid("degree must be positive"));
        }
        if data.basis_labels.len() != n {
            return Err(invalid("basis_labels must have one label per basis element"));
        }
        if data.precision_bits < 53 || data.precision_bits > 4096 {
            return Err(invalid(format!("precision {} outside [53, 4096] bits", data.precision_bits)));
        }
        for row in &data.mult_table {
            if row.len() != n || row.iter().any(|v| v.len() != n) {
                return Err(invalid("mult_table must be n x n x n"));
            }
        }
        if data.embeddings.len() != n || data.embeddings.iter().any(|r| r.len() != n) {
            return Err(invalid("embeddings must be n x n"));
        }
        let mut mult_int = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                if data.mult_table[i][j] != data.mult_table[j][i] {
                    return Err(invalid("mult_table is not commutative"));
                }
                for c in &data.mult_table[i][j] {
                    let v = c
                        .is_integer()
                        .then(|| c.to_integer().to_i64())
                        .flatten()
                        .ok_or_else(|| invalid("mult_table entries must be (small) integers for an integral basis"))?;
                    mult_int.push(v);
                }
            }
        }
        let scale = BigRational::from_integer(BigInt::one() << data.precision_bits as usize);
        let emb_fixed: Vec<Vec<BigInt>> =
            data.embeddings.iter().map(|r| r.iter().map(|x| (x * &scale).round().to_integer()).collect()).collect();
        let emb: Vec<Vec<f64>> = data.embeddings.iter().map(|r| r.iter().map(rational_to_f64).collect()).collect();
        let emb_inv = f64_inverse(&emb).ok_or_else(|| invalid("embedding matrix is singular"))?;

        let mut field = TotallyRealField {
            name: data.name,
            n,
            labels: data.basis_labels,
            mult: data.mult_table,
            mult_int,
            emb_fixed,
            bits: data.precision_bits,
            emb,
            emb_inv,
            discriminant: data.discriminant,
            units: Vec::new(),
            unit_inverses: Vec::new(),
            regulator: data.regulator,
            index_plus_sq: data.index_plus_sq,
            zeta: data.zeta,
            one: FieldElement::zero(n),
            one_int: vec![0; n],
            lattice: UnitLattice::trivial(),
        };
        field.check_associative()?;
        field.locate_one()?;
        field.check_embeddings()?;
        field.install_units(data.fundamental_units)?;
        Ok(field)
    }

    fn check_associative(&self) -> Result<()> {
        let n = self.n;
        let e = |i: usize| {
            let mut c = vec![0i64; n];
            c[i] = 1;
            FieldElement::from_ints(&c)
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let l = self.mul(&self.mul(&e(i), &e(j)), &e(k));
                    let r = self.mul(&e(i), &self.mul(&e(j), &e(k)));
                    if l != r {
                        return Err(invalid("mult_table is not associative"));
                    }
                }
            }
        }
        Ok(())
    }

    fn locate_one(&mut self) -> Result<()> {
        let n = self.n;
        let t: Vec<f64> = (0..n).map(|i| self.emb_inv[i].iter().sum()).collect();
        let coords: Vec<i64> = t.iter().map(|v| v.round() as i64).collect();
        if t.iter().zip(&coords).any(|(v, &c)| (v - c as f64).abs() > 1e-6) {
            return Err(invalid("the element 1 is not an integral combination of the basis"));
        }
        let one = FieldElement::from_ints(&coords);
        for i in 0..n {
            let mut c = vec![0i64; n];
            c[i] = 1;
            let e = FieldElement::from_ints(&c);
            if self.mul(&one, &e) != e {
                return Err(invalid("embeddings and mult_table disagree on the unit element"));
            }
        }
        self.one = one;
        self.one_int = coords;
        Ok(())
    }

    fn check_embeddings(&self) -> Result<()> {
        let n = self.n;
        for j in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let lhs = self.emb[j][a] * self.emb[j][b];
                    let rhs: f64 =
                        (0..n).map(|k| self.mult_int[(a * n + b) * n + k] as f64 * self.emb[j][k]).sum();
                    let scale: f64 = 1.0
                        + (0..n).map(|k| (self.mult_int[(a * n + b) * n + k] as f64 * self.emb[j][k]).abs()).sum::<f64>();
                    if (lhs - rhs).abs() > 1e-9 * scale {
                        return Err(invalid(format!("embedding {j} is not multiplicative on e_{a} e_{b}")));
                    }
                }
            }
        }
        if !self.discriminant.is_positive() {
            return Err(invalid("discriminant must be positive"));
        }
        let det = f64_det(&self.emb);
        let disc = self.discriminant.to_f64().unwrap_or(f64::INFINITY);
        if ((det * det - disc) / disc).abs() > 1e-10 {
            return Err(invalid(format!("det(embeddings)^2 = {} does not match discriminant {}", det * det, disc)));
        }
        Ok(())
    }

    fn install_units(&mut self, raw: Vec<Vec<BigRational>>) -> Result<()> {
        let n = self.n;
        if raw.len() != n - 1 {
            return Err(invalid(format!("expected {} fundamental units, got {}", n - 1, raw.len())));
        }
        if self.index_plus_sq == 0 || !(1u64 << n).is_multiple_of(u64::from(self.index_plus_sq)) {
            return Err(invalid(format!("index_plus_sq {} does not divide 2^{n}", self.index_plus_sq)));
        }
        if !(self.regulator.is_finite() && self.regulator > 0.0) {
            return Err(invalid("regulator must be positive"));
        }
        if n == 1 && (self.regulator != 1.0 || self.index_plus_sq != 1) {
            return Err(invalid("degree 1 requires regulator 1 and index_plus_sq 1"));
        }
        let mut units = Vec::new();
        let mut inverses = Vec::new();
        for coords in raw {
            if coords.len() != n {
                return Err(invalid("unit coordinate vector has wrong length"));
            }
            let u = FieldElement::new(coords);
            if !u.is_integral() {
                return Err(invalid(format!("unit {u} is not integral")));
            }
            if self.norm(&u).abs() != BigRational::one() {
                return Err(invalid(format!("unit {u} does not have norm ±1")));
            }
            if !self.is_totally_positive(&u) {
                return Err(invalid(format!("unit {u} is not totally positive")));
            }
            inverses.push(self.inverse(&u)?);
            units.push(u);
        }
        let logs: Vec<Vec<f64>> =
            units.iter().map(|u| self.embed(u).iter().map(|s| s.abs().ln()).collect()).collect();
        let lattice = UnitLattice::new(logs).ok_or_else(|| invalid("fundamental units are multiplicatively dependent"))?;
        // The totally positive units have covolume [O^× : O^{×,+}]·R/2 = 2^{n-1}R/index.
        let expected = 2f64.powi(n as i32 - 1) * self.regulator / f64::from(self.index_plus_sq);
        if ((lattice.covolume() - expected) / expected).abs() > 1e-10 {
            return Err(invalid(format!(
                "unit lattice covolume {} != 2^(n-1) R / index_plus_sq = {}",
                lattice.covolume(),
                expected
            )));
        }
        self.units = units;
        self.unit_inverses = inverses;
        self.lattice = lattice;
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.labels
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    pub fn discriminant_f64(&self) -> f64 {
        self.discriminant.to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn regulator(&self) -> f64 {
        self.regulator
    }

    pub fn index_plus_sq(&self) -> u32 {
        self.index_plus_sq
    }

    pub fn precision_bits(&self) -> u32 {
        self.bits
    }

    /// Totally positive units generating O^{×,+}.
    pub fn fundamental_units(&self) -> &[FieldElement] {
        &self.units
    }

    pub fn unit_lattice(&self) -> &UnitLattice {
        &self.lattice
    }

    pub fn zeta_kind(&self) -> &ZetaKind {
        &self.zeta
    }

    pub fn mult_table(&self) -> &[Vec<Vec<BigRational>>] {
        &self.mult
    }

    /// `σ_j(e_i)` as f64, indexed `[j][i]`.
    pub fn embedding_matrix(&self) -> &[Vec<f64>] {
        &self.emb
    }

    /// Inverse of [`Self::embedding_matrix`]: maps embedding vectors back to basis coordinates.
    pub fn embedding_inverse(&self) -> &[Vec<f64>] {
        &self.emb_inv
    }

    /// The remark's ceiling √2·Δ^{1/2n} on the Hermite-type constant.
    pub fn hermite_upper_bound(&self) -> f64 {
        2f64.sqrt() * self.discriminant_f64().powf(1.0 / (2.0 * self.n as f64))
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::zero(self.n)
    }

    pub fn one(&self) -> FieldElement {
        self.one.clone()
    }

    pub fn one_coords(&self) -> &[i64] {
        &self.one_int
    }

    pub fn from_int(&self, k: i64) -> FieldElement {
        self.one.scale(&big(k))
    }

    pub fn from_rational(&self, q: &BigRational) -> FieldElement {
        self.one.scale(q)
    }

    pub fn element(&self, coords: &[i64]) -> Result<FieldElement> {
        if coords.len() != self.n {
            return Err(Error::InvalidInput(format!("expected {} coordinates, got {}", self.n, coords.len())));
        }
        Ok(FieldElement::from_ints(coords))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let n = self.n;
        let mut out = vec![BigRational::zero(); n];
        for (i, ai) in a.coords.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coords.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let p = ai * bj;
                for (k, o) in out.iter_mut().enumerate() {
                    let t = self.mult_int[(i * n + j) * n + k];
                    if t != 0 {
                        *o += &p * big(t);
                    }
                }
            }
        }
        FieldElement::new(out)
    }

    /// Product of integral elements in i128 coordinates.
    pub fn mul_small(&self, a: &[i64], b: &[i64]) -> Vec<i128> {
        let n = self.n;
        let mut out = vec![0i128; n];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj == 0 {
                    continue;
                }
                let p = i128::from(ai) * i128::from(bj);
                for (k, o) in out.iter_mut().enumerate() {
                    *o += p * i128::from(self.mult_int[(i * n + j) * n + k]);
                }
            }
        }
        out
    }

    /// Matrix of multiplication by `x`: column `j` holds the coordinates of `x e_j`.
    fn mult_matrix(&self, x: &FieldElement) -> Vec<Vec<BigRational>> {
        let n = self.n;
        let mut m = vec![vec![BigRational::zero(); n]; n];
        for (i, xi) in x.coords.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..n {
                for (k, row) in m.iter_mut().enumerate() {
                    let t = self.mult_int[(i * n + j) * n + k];
                    if t != 0 {
                        row[j] += xi * big(t);
                    }
                }
            }
        }
        m
    }

    /// Exact norm N(x) = det of multiplication by `x`.
    pub fn norm(&self, x: &FieldElement) -> BigRational {
        rational_det(self.mult_matrix(x))
    }

    pub fn trace(&self, x: &FieldElement) -> BigRational {
        let m = self.mult_matrix(x);
        (0..self.n).map(|i| m[i][i].clone()).fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn inverse(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::InvalidInput("zero has no inverse".into()));
        }
        rational_solve(self.mult_matrix(x), self.one.coords.clone())
            .map(FieldElement::new)
            .ok_or_else(|| Error::InvalidInput("singular multiplication matrix".into()))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inverse(b)?))
    }

    /// `x^k` for any integer `k` (negative powers need `x ≠ 0`).
    pub fn pow(&self, x: &FieldElement, k: i64) -> Result<FieldElement> {
        let base = if k < 0 { self.inverse(x)? } else { x.clone() };
        Ok(self.pow_nonneg(&base, k.unsigned_abs()))
    }

    fn pow_nonneg(&self, x: &FieldElement, mut k: u64) -> FieldElement {
        let mut acc = self.one();
        let mut b = x.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            k >>= 1;
            if k > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }

    /// `∏ η_k^{e_k}` over the totally positive fundamental units.
    pub fn unit_power(&self, exps: &[i64]) -> FieldElement {
        let mut acc = self.one();
        for (k, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let b = if e > 0 { &self.units[k] } else { &self.unit_inverses[k] };
            acc = self.mul(&acc, &self.pow_nonneg(b, e.unsigned_abs()));
        }
        acc
    }

    /// Real embeddings of an exact element, evaluated in fixed point first.
    pub fn embed(&self, x: &FieldElement) -> Vec<f64> {
        let den = x.denominator();
        let nums: Vec<BigInt> = x.coords.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        let scale = den << self.bits as usize;
        self.emb_fixed
            .iter()
            .map(|row| {
                let acc: BigInt = row.iter().zip(&nums).map(|(e, c)| e * c).sum();
                crate::linalg::ratio_to_f64(&acc, &scale)
            })
            .collect()
    }

    /// Real embeddings of an integral element given by small coordinates.
    pub fn embed_small(&self, coords: &[i64]) -> Vec<f64> {
        self.emb.iter().map(|row| row.iter().zip(coords).map(|(e, &c)| e * c as f64).sum()).collect()
    }

    pub fn is_totally_positive(&self, x: &FieldElement) -> bool {
        !x.is_zero() && self.embed(x).iter().all(|&s| s > 0.0)
    }

    pub fn is_unit(&self, x: &FieldElement) -> bool {
        x.is_integral() && !x.is_zero() && self.norm(x).abs().is_one()
    }

    /// `∏|σ_i(x)| · |N(x)|^{-1} = 1`, the finite places entering through the norm.
    pub fn product_formula_check(&self, x: &FieldElement) -> Result<bool> {
        if x.is_zero() {
            return Err(Error::InvalidInput("product formula needs x ≠ 0".into()));
        }
        if !x.is_integral() {
            return Err(Error::InvalidInput("product formula check expects an integral element".into()));
        }
        let arch: f64 = self.embed(x).iter().map(|s| s.abs().ln()).sum();
        let fin = -rational_to_f64(&self.norm(x).abs()).ln();
        Ok((arch + fin).exp_m1().abs() <= 1e-10)
    }

    /// Mean-adjusted log vector of `x` in the balanced (n-1)-dimensional coordinates.
    fn balanced_log(&self, x: &FieldElement) -> Vec<f64> {
        let logs: Vec<f64> = self.embed(x).iter().map(|s| s.abs().ln()).collect();
        units::balanced(&logs)
    }

    /// Moves `x` by a totally positive unit so its balanced log vector lies in the
    /// fundamental cell of the unit lattice; returns `(η·x, η)`.
    pub fn unit_reduce(&self, x: &FieldElement) -> Result<(FieldElement, FieldElement)> {
        if x.is_zero() {
            return Err(Error::InvalidInput("unit_reduce needs x ≠ 0".into()));
        }
        if self.n == 1 {
            return Ok((x.clone(), self.one()));
        }
        let exps = self.lattice.reducing_exponents(&self.balanced_log(x));
        let eta = self.unit_power(&exps);
        Ok((self.mul(&eta, x), eta))
    }

    /// Embeds an i128 coordinate vector.
    pub fn embed_wide(&self, coords: &[i128]) -> Vec<f64> {
        self.emb.iter().map(|row| row.iter().zip(coords).map(|(e, &c)| e * c as f64).sum()).collect()
    }

    pub fn zeta_k_2(&self, prime_bound: u64) -> Result<ZetaValue> {
        zeta::zeta_k_2(self, prime_bound)
    }
}
