//! Cusps [α:β] ∈ ℙ¹(K), the distance function μ(τ, c) and the involution ι.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hyperbolic_geometry::{GroupElement, UpperHalfPoint};
use crate::number_field::{FieldElement, TotallyRealField};

/// A cusp stored as a coprime, unit-reduced, sign-normalized pair.
///
/// The representative depends only on the ratio α/β, so two cusps are equal
/// as points of ℙ¹(K) exactly when their stored pairs are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cusp {
    alpha: FieldElement,
    beta: FieldElement,
}

impl Cusp {
    pub fn infinity(field: &TotallyRealField) -> Self {
        Self { alpha: field.one(), beta: field.zero() }
    }

    /// Canonical cusp through the (possibly non-coprime, non-integral) pair.
    pub fn new(field: &TotallyRealField, alpha: &FieldElement, beta: &FieldElement) -> Result<Self> {
        if alpha.is_zero() && beta.is_zero() {
            return Err(Error::InvalidInput("[0:0] is not a point of P^1".into()));
        }
        if beta.is_zero() {
            return Ok(Self::infinity(field));
        }
        let ratio = field.div(alpha, beta)?;
        let b = field.denominator_generator(&ratio)?;
        // β is already unit-reduced with σ₁(β) > 0
        Ok(Self { alpha: field.mul(&ratio, &b), beta: b })
    }

    /// Cusp from small integral coordinates.
    pub fn from_coords(field: &TotallyRealField, alpha: &[i64], beta: &[i64]) -> Result<Self> {
        Self::new(field, &field.element(alpha)?, &field.element(beta)?)
    }

    pub fn alpha(&self) -> &FieldElement {
        &self.alpha
    }

    pub fn beta(&self) -> &FieldElement {
        &self.beta
    }

    pub fn is_infinity(&self) -> bool {
        self.beta.is_zero()
    }

    /// Canonicalizing an already canonical cusp is the identity.
    pub fn canonicalize(&self, field: &TotallyRealField) -> Result<Self> {
        Self::new(field, &self.alpha, &self.beta)
    }
}

impl Ord for Cusp {
    /// ∞ first, then lexicographic in the β coordinates, then α.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .is_infinity()
            .cmp(&self.is_infinity())
            .then_with(|| self.beta.cmp(&other.beta))
            .then_with(|| self.alpha.cmp(&other.alpha))
    }
}

impl PartialOrd for Cusp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.alpha, self.beta)
    }
}

impl Serialize for Cusp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            alpha: Vec<String>,
            beta: Vec<String>,
        }
        let str = |x: &FieldElement| x.coords().iter().map(|c| c.to_string()).collect();
        Repr { alpha: str(&self.alpha), beta: str(&self.beta) }.serialize(s)
    }
}

/// μ(τ, c) = N(Im τ) / |N(α - β τ)|² for a coprime representative.
pub fn mu(field: &TotallyRealField, tau: &UpperHalfPoint, c: &Cusp) -> f64 {
    let ny = tau.norm_im();
    if c.is_infinity() {
        return ny;
    }
    let sa = field.embed(&c.alpha);
    let sb = field.embed(&c.beta);
    let den: f64 = tau.coords().iter().enumerate().map(|(j, z)| (sa[j] - sb[j] * z).norm_sqr()).product();
    ny / den
}

/// ι[α:β] = [β:-α].
pub fn iota(field: &TotallyRealField, c: &Cusp) -> Result<Cusp> {
    Cusp::new(field, &c.beta, &-&c.alpha)
}

/// Whether μ(τ, c)^{-1/2} < r.
pub fn in_ball(field: &TotallyRealField, tau: &UpperHalfPoint, c: &Cusp, r: f64) -> Result<bool> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput("ball radius must be positive".into()));
    }
    Ok(mu(field, tau, c).powf(-0.5) < r)
}

/// γ·[α:β] = [aα + bβ : cα + dβ].
pub fn act_on_cusp(field: &TotallyRealField, g: &GroupElement, c: &Cusp) -> Result<Cusp> {
    let [a, b, cc, d] = g.entries();
    let top = &field.mul(a, &c.alpha) + &field.mul(b, &c.beta);
    let bottom = &field.mul(cc, &c.alpha) + &field.mul(d, &c.beta);
    Cusp::new(field, &top, &bottom)
}

/// μ(γτ, γc) = μ(τ, c) to relative 1e-9.
pub fn mu_invariance_check(field: &TotallyRealField, g: &GroupElement, tau: &UpperHalfPoint, c: &Cusp) -> Result<bool> {
    let before = mu(field, tau, c);
    let after = mu(field, &g.act(field, tau), &act_on_cusp(field, g, c)?);
    Ok(((after - before) / before).abs() <= 1e-9)
}
