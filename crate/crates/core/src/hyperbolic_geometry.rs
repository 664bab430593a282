//! Points of ℍⁿ, the extended Hilbert modular group acting on them, and the
//! correspondence between ℍ × ℝ_{>0} and positive-definite 2×2 matrices.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::number_field::{FieldElement, TotallyRealField};

pub type Mat2 = [[f64; 2]; 2];

/// τ = (x_1 + i y_1, …, x_n + i y_n) with every y_j > 0.
#[derive(Clone, Debug, PartialEq)]
pub struct UpperHalfPoint {
    coords: Vec<Complex64>,
}

impl UpperHalfPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("τ needs at least one coordinate".into()));
        }
        for z in &coords {
            if !(z.re.is_finite() && z.im.is_finite() && z.im > 0.0) {
                return Err(Error::InvalidInput(format!("{z} is not in the upper half plane")));
            }
        }
        Ok(Self { coords })
    }

    pub fn from_parts(xs: &[f64], ys: &[f64]) -> Result<Self> {
        Self::new(xs.iter().zip(ys).map(|(&x, &y)| Complex64::new(x, y)).collect())
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn degree(&self) -> usize {
        self.coords.len()
    }

    pub fn re(&self) -> Vec<f64> {
        self.coords.iter().map(|z| z.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.coords.iter().map(|z| z.im).collect()
    }

    /// N(Im τ) = y_1 ⋯ y_n.
    pub fn norm_im(&self) -> f64 {
        self.coords.iter().map(|z| z.im).product()
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Serialize for UpperHalfPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coords.len()))?;
        for z in &self.coords {
            seq.serialize_element(&[z.re, z.im])?;
        }
        seq.end()
    }
}

/// Density of the invariant measure against dx dy: ∏ y_j^{-2}.
pub fn poincare_density(tau: &UpperHalfPoint) -> f64 {
    tau.coords.iter().map(|z| z.im.powi(-2)).product()
}

/// φ(τ, λ) = (√λ / y) [[x² + y², x], [x, 1]].
pub fn phi(tau: Complex64, lambda: f64) -> Mat2 {
    let (x, y) = (tau.re, tau.im);
    let k = lambda.sqrt() / y;
    [[k * (x * x + y * y), k * x], [k * x, k]]
}

/// Inverse of [`phi`]: S = [[u, v], [v, w]] ↦ ((v + i√det S) / w, det S).
pub fn psi_matrix(s: &Mat2) -> Result<(Complex64, f64)> {
    let [[u, v], [v2, w]] = *s;
    let det = u * w - v * v2;
    if !(u > 0.0 && w > 0.0 && det > 0.0) || (v - v2).abs() > 1e-12 * (1.0 + v.abs()) {
        return Err(Error::NonPositiveDefinite);
    }
    Ok((Complex64::new(v / w, det.sqrt() / w), det))
}

/// T(τ) = y^{-1/2} [[y, 0], [x, 1]], with Tᵀ T = φ(τ, 1).
pub fn t_of_tau(tau: Complex64) -> Mat2 {
    let k = tau.im.sqrt().recip();
    [[k * tau.im, 0.0], [k * tau.re, k]]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Möbius action of a real matrix with positive determinant.
pub fn mobius(m: &Mat2, z: Complex64) -> Complex64 {
    let den = m[1][0] * z + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let w = (m[0][0] * z + m[0][1]) / den;
    // the imaginary part from det·y/|cz+d|² is free of cancellation
    Complex64::new(w.re, det * z.im / den.norm_sqr())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Identity,
    Parabolic,
    Hyperbolic,
    Elliptic,
    Mixed,
}

/// Element of Γ̂_K: integral entries with totally positive unit determinant,
/// taken modulo scalar units.
#[derive(Clone, Debug)]
pub struct GroupElement {
    a: FieldElement,
    b: FieldElement,
    c: FieldElement,
    d: FieldElement,
    special: bool,
}

impl GroupElement {
    pub fn new(
        field: &TotallyRealField,
        a: FieldElement,
        b: FieldElement,
        c: FieldElement,
        d: FieldElement,
    ) -> Result<Self> {
        if ![&a, &b, &c, &d].iter().all(|x| x.is_integral() && x.degree() == field.degree()) {
            return Err(Error::InvalidInput("group elements need integral entries".into()));
        }
        let det = &field.mul(&a, &d) - &field.mul(&b, &c);
        if !field.is_unit(&det) || !field.is_totally_positive(&det) {
            return Err(Error::InvalidInput(format!("determinant {det} is not a totally positive unit")));
        }
        let special = det == field.one();
        Ok(Self { a, b, c, d, special })
    }

    pub fn identity(field: &TotallyRealField) -> Self {
        Self { a: field.one(), b: field.zero(), c: field.zero(), d: field.one(), special: true }
    }

    /// z ↦ z + μ.
    pub fn translation(field: &TotallyRealField, mu: &FieldElement) -> Result<Self> {
        Self::new(field, field.one(), mu.clone(), field.zero(), field.one())
    }

    /// z ↦ ε z for a totally positive unit ε.
    pub fn scaling(field: &TotallyRealField, eps: &FieldElement) -> Result<Self> {
        Self::new(field, eps.clone(), field.zero(), field.zero(), field.one())
    }

    /// z ↦ -1/z.
    pub fn inversion(field: &TotallyRealField) -> Self {
        Self { a: field.zero(), b: -&field.one(), c: field.one(), d: field.zero(), special: true }
    }

    pub fn entries(&self) -> [&FieldElement; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn is_special(&self) -> bool {
        self.special
    }

    pub fn det(&self, field: &TotallyRealField) -> FieldElement {
        &field.mul(&self.a, &self.d) - &field.mul(&self.b, &self.c)
    }

    pub fn compose(&self, field: &TotallyRealField, other: &Self) -> Self {
        let m = |x: &FieldElement, y: &FieldElement| field.mul(x, y);
        Self {
            a: &m(&self.a, &other.a) + &m(&self.b, &other.c),
            b: &m(&self.a, &other.b) + &m(&self.b, &other.d),
            c: &m(&self.c, &other.a) + &m(&self.d, &other.c),
            d: &m(&self.c, &other.b) + &m(&self.d, &other.d),
            special: self.special && other.special,
        }
    }

    /// Inverse in the quotient by scalars: the adjugate.
    pub fn inverse(&self) -> Self {
        Self { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone(), special: self.special }
    }

    /// Real matrices σ_j(γ), one per embedding.
    pub fn embedded(&self, field: &TotallyRealField) -> Vec<Mat2> {
        let [a, b, c, d] = [&self.a, &self.b, &self.c, &self.d].map(|x| field.embed(x));
        (0..field.degree()).map(|j| [[a[j], b[j]], [c[j], d[j]]]).collect()
    }

    pub fn act(&self, field: &TotallyRealField, tau: &UpperHalfPoint) -> UpperHalfPoint {
        let coords = self.embedded(field).iter().zip(&tau.coords).map(|(m, &z)| mobius(m, z)).collect();
        UpperHalfPoint { coords }
    }

    pub fn classify(&self, field: &TotallyRealField) -> Classification {
        if self.b.is_zero() && self.c.is_zero() && self.a == self.d {
            return Classification::Identity;
        }
        let tr = &self.a + &self.d;
        let disc = &field.mul(&tr, &tr) - &self.det(field).scale(&BigRational::from_integer(4.into()));
        if disc.is_zero() {
            return Classification::Parabolic;
        }
        let signs: Vec<bool> = field.embed(&disc).iter().map(|&s| s > 0.0).collect();
        if signs.iter().all(|&s| s) {
            Classification::Hyperbolic
        } else if signs.iter().all(|&s| !s) {
            Classification::Elliptic
        } else {
            Classification::Mixed
        }
    }

    /// Representative scaled by `unit_reduce` of the first nonzero entry,
    /// then sign-normalized so that entry is positive at σ_1.
    pub fn canonical(&self, field: &TotallyRealField) -> Result<Self> {
        let lead = self.entries().into_iter().find(|x| !x.is_zero()).expect("group element with all entries zero");
        let (reduced, eta) = field.unit_reduce(lead)?;
        let sign = if field.embed(&reduced)[0] < 0.0 { -BigRational::one() } else { BigRational::one() };
        let s = |x: &FieldElement| field.mul(&eta, x).scale(&sign);
        Ok(Self { a: s(&self.a), b: s(&self.b), c: s(&self.c), d: s(&self.d), special: self.special })
    }

    /// Equality in the quotient by scalar units, decided exactly.
    pub fn equivalent(&self, field: &TotallyRealField, other: &Self) -> bool {
        let mine = self.entries();
        let theirs = other.entries();
        if mine.iter().zip(&theirs).any(|(x, y)| x.is_zero() != y.is_zero()) {
            return false;
        }
        let k = mine.iter().position(|x| !x.is_zero()).expect("nonzero entry");
        let Ok(r) = field.div(mine[k], theirs[k]) else { return false };
        field.is_unit(&r) && mine.iter().zip(&theirs).all(|(x, y)| **x == field.mul(&r, y))
    }
}
