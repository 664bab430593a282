//! Heights on the rigid adelic spaces E_τ and their Roy–Thunder minima.
//!
//! E_τ is K² with the standard norm at every finite place and the twisted
//! Euclidean norm ‖T(τ_j) v‖ at the j-th real place. The finite places only
//! ever enter through |N(αO + βO)|, so they are not materialized.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::cusp_metric::{iota, mu, Cusp};
use crate::cusp_search::CuspSearch;
use crate::enumerate::for_each_in_box;
use crate::error::{Error, Result};
use crate::hyperbolic_geometry::{t_of_tau, Mat2, UpperHalfPoint};
use crate::number_field::{FieldElement, TotallyRealField};

#[derive(Clone, Debug)]
pub struct RigidAdelicSpace<'a> {
    field: &'a TotallyRealField,
    tau: UpperHalfPoint,
    twists: Vec<Mat2>,
}

fn log_arch_norm(t: &Mat2, a: f64, b: f64) -> f64 {
    let u = t[0][0] * a + t[0][1] * b;
    let v = t[1][0] * a + t[1][1] * b;
    0.5 * (u * u + v * v).ln()
}

impl<'a> RigidAdelicSpace<'a> {
    pub fn new(field: &'a TotallyRealField, tau: UpperHalfPoint) -> Result<Self> {
        if tau.degree() != field.degree() {
            return Err(Error::InvalidInput("τ and field degree disagree".into()));
        }
        let twists: Vec<Mat2> = tau.coords().iter().map(|&z| t_of_tau(z)).collect();
        for t in &twists {
            let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
            if (det - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!("twist determinant {det} is not 1")));
            }
        }
        Ok(Self { field, tau, twists })
    }

    pub fn tau(&self) -> &UpperHalfPoint {
        &self.tau
    }

    pub fn twists(&self) -> &[Mat2] {
        &self.twists
    }

    /// H(E_τ) = ∏_j |det T(τ_j)|^{1/n}; the finite part is trivial.
    pub fn height_of_space(&self) -> f64 {
        let n = self.field.degree() as f64;
        self.twists.iter().map(|t| (t[0][0] * t[1][1] - t[0][1] * t[1][0]).abs().powf(1.0 / n)).product()
    }

    /// H([α:β]) = |N(d)|^{-1/n} ∏_j ‖T(τ_j)(σ_j α, σ_j β)‖^{1/n}, d = gcd(α, β).
    pub fn height_of_point(&self, alpha: &FieldElement, beta: &FieldElement) -> Result<f64> {
        if alpha.is_zero() && beta.is_zero() {
            return Err(Error::InvalidInput("the zero vector has no height".into()));
        }
        let den = BigRational::from_integer(alpha.denominator().lcm_with(&beta.denominator()));
        let (a, b) = (alpha.scale(&den), beta.scale(&den));
        let norm = self.field.ideal_norm(&a, &b)?;
        let (sa, sb) = (self.field.embed(&a), self.field.embed(&b));
        Ok(self.height_from_embeddings(&sa, &sb, &norm))
    }

    fn height_from_embeddings(&self, sa: &[f64], sb: &[f64], ideal_norm: &BigInt) -> f64 {
        let n = self.field.degree() as f64;
        let arch: f64 = self.twists.iter().enumerate().map(|(j, t)| log_arch_norm(t, sa[j], sb[j])).sum();
        let fin = ideal_norm.to_f64().unwrap_or(f64::INFINITY).ln();
        ((arch - fin) / n).exp()
    }

    /// H(ι(c)) = μ(τ, c)^{-1/2n} to relative 1e-9.
    pub fn height_mu_bridge_check(&self, c: &Cusp) -> Result<bool> {
        let n = self.field.degree() as f64;
        let image = iota(self.field, c)?;
        let h = self.height_of_point(image.alpha(), image.beta())?;
        let want = mu(self.field, &self.tau, c).powf(-0.5 / n);
        Ok(((h - want) / want).abs() <= 1e-9)
    }

    /// (Λ₁, Λ₂) = (μ₁^{-1/2n}, μ₂^{-1/2n}) through the cusp search.
    pub fn roy_thunder_minima(&self, search: &CuspSearch<'_>) -> Result<(f64, f64)> {
        let n = self.field.degree() as f64;
        let (m1, m2) = search.mu1_mu2(&self.tau)?;
        Ok((m1.powf(-0.5 / n), m2.powf(-0.5 / n)))
    }

    /// Λ₁, Λ₂ straight from the definition: smallest height of a nonzero pair
    /// with integral coordinates in `[-bound, bound]`, and smallest height of
    /// a pair not proportional to that minimizer.
    pub fn direct_minima(&self, bound: i64) -> Result<(f64, f64)> {
        const KEEP: usize = 256;
        let field = self.field;
        let n = field.degree();
        let e = field.embedding_matrix();
        let lo = vec![-bound; 2 * n];
        let hi = vec![bound; 2 * n];
        let one = BigInt::from(1);
        // Without the gcd factor the value can only be too large, and coprime
        // representatives are exact, so the smallest of these are the candidates.
        let mut best: Vec<(f64, Vec<i64>)> = Vec::new();
        let mut cutoff = f64::INFINITY;
        for_each_in_box(&lo, &hi, |v| {
            if v.iter().all(|&c| c == 0) {
                return true;
            }
            let (a, b) = v.split_at(n);
            let sa: Vec<f64> = e.iter().map(|r| r.iter().zip(a).map(|(x, &c)| x * c as f64).sum()).collect();
            let sb: Vec<f64> = e.iter().map(|r| r.iter().zip(b).map(|(x, &c)| x * c as f64).sum()).collect();
            let h = self.height_from_embeddings(&sa, &sb, &one);
            if h < cutoff || best.len() < KEEP {
                best.push((h, v.to_vec()));
                if best.len() >= 2 * KEEP {
                    best.sort_by(|p, q| p.0.total_cmp(&q.0));
                    best.truncate(KEEP);
                    cutoff = best[KEEP - 1].0;
                }
            }
            true
        });
        let mut exact: Vec<(f64, Vec<i64>)> = best
            .into_iter()
            .map(|(_, v)| {
                let (a, b) = v.split_at(n);
                let h = self.height_of_point(&FieldElement::from_ints(a), &FieldElement::from_ints(b))?;
                Ok((h, v))
            })
            .collect::<Result<_>>()?;
        exact.sort_by(|p, q| p.0.total_cmp(&q.0));
        let (h1, v1) = exact.first().cloned().ok_or_else(|| Error::InvalidInput("empty box".into()))?;
        let (a1, b1) = v1.split_at(n);
        let second = exact.iter().find(|(_, v)| {
            let (a, b) = v.split_at(n);
            field.mul_small(a1, b) != field.mul_small(a, b1)
        });
        let h2 = second.map(|s| s.0).ok_or_else(|| Error::InvalidInput("box too small for a second minimum".into()))?;
        Ok((h1, h2))
    }
}

trait LcmWith {
    fn lcm_with(&self, other: &Self) -> Self;
}

impl LcmWith for BigInt {
    fn lcm_with(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return BigInt::from(1);
        }
        num_integer::Integer::lcm(self, other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cusp_search::tau_from_pairs;
    use crate::field_factory::make_rationals;

    #[test]
    fn heights_at_i() {
        let k = make_rationals(80).unwrap();
        let e = RigidAdelicSpace::new(&k, tau_from_pairs(&[(0.0, 1.0)]).unwrap()).unwrap();
        assert!((e.height_of_space() - 1.0).abs() < 1e-12);
        assert!((e.height_of_point(&k.one(), &k.zero()).unwrap() - 1.0).abs() < 1e-15);
        assert!((e.height_of_point(&k.one(), &k.one()).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        // projective: (6, 6) ~ (1, 1) and (1/2, 1/2) ~ (1, 1)
        assert!((e.height_of_point(&k.from_int(6), &k.from_int(6)).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        let half = k.from_rational(&BigRational::new(1.into(), 2.into()));
        assert!((e.height_of_point(&half, &half).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        let s = CuspSearch::new(&k);
        let (l1, l2) = e.roy_thunder_minima(&s).unwrap();
        assert!((l1 - 1.0).abs() < 1e-12 && (l2 - 1.0).abs() < 1e-12);
        let (d1, d2) = e.direct_minima(5).unwrap();
        assert!((d1 - 1.0).abs() < 1e-12 && (d2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn minima_at_rho() {
        let k = make_rationals(80).unwrap();
        let e = RigidAdelicSpace::new(&k, tau_from_pairs(&[(-0.5, 3f64.sqrt() / 2.0)]).unwrap()).unwrap();
        let s = CuspSearch::new(&k);
        let (l1, l2) = e.roy_thunder_minima(&s).unwrap();
        let want = (3f64.sqrt() / 2.0).powf(-0.5);
        assert!((l1 - want).abs() < 1e-12 && (l2 - want).abs() < 1e-12);
        assert!(e.height_mu_bridge_check(&Cusp::from_coords(&k, &[0], &[1]).unwrap()).unwrap());
    }
}
