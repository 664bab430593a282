//! Oracles shared by the integration tests. Nothing here calls into the
//! library's arithmetic: embeddings of ℚ(√m) are written out from the
//! definition and μ is evaluated from the raw formula.

#![allow(dead_code)]

use hilbert_cusps::field_factory::{make_rationals, make_real_quadratic, QuadraticFieldRequest};
use hilbert_cusps::hyperbolic_geometry::UpperHalfPoint;
use hilbert_cusps::TotallyRealField;
use num_complex::Complex64;
use rand::Rng;

/// ℚ (m = 1) or ℚ(√m) with basis 1, w where w = (1+√m)/2 for m ≡ 1 mod 4 and √m otherwise.
#[derive(Clone, Copy, Debug)]
pub struct Oracle {
    pub m: i64,
}

impl Oracle {
    pub fn degree(&self) -> usize {
        if self.m == 1 { 1 } else { 2 }
    }

    pub fn field(&self) -> TotallyRealField {
        if self.m == 1 {
            make_rationals(80).unwrap()
        } else {
            make_real_quadratic(&QuadraticFieldRequest::new(self.m)).unwrap()
        }
    }

    pub fn discriminant(&self) -> f64 {
        match self.m {
            1 => 1.0,
            m if m % 4 == 1 => m as f64,
            m => 4.0 * m as f64,
        }
    }

    /// The two images of w, larger first.
    pub fn w(&self) -> [f64; 2] {
        let r = (self.m as f64).sqrt();
        if self.m % 4 == 1 { [(1.0 + r) / 2.0, (1.0 - r) / 2.0] } else { [r, -r] }
    }

    pub fn embed(&self, c: &[i64]) -> Vec<f64> {
        if self.m == 1 {
            return vec![c[0] as f64];
        }
        self.w().iter().map(|w| c[0] as f64 + c[1] as f64 * w).collect()
    }

    /// N(y)/|N(α − βτ)|² for any pair; equals μ on coprime pairs and is smaller otherwise.
    pub fn mu_naive(&self, tau: &[Complex64], a: &[i64], b: &[i64]) -> f64 {
        let (sa, sb) = (self.embed(a), self.embed(b));
        let mut v = 1.0;
        for j in 0..tau.len() {
            v *= tau[j].im / (sa[j] - sb[j] * tau[j]).norm_sqr();
        }
        v
    }

    /// Whether [a:b] and [c:d] are the same point of ℙ¹(K).
    pub fn same_point(&self, a: &[i64], b: &[i64], c: &[i64], d: &[i64]) -> bool {
        let (sa, sb, sc, sd) = (self.embed(a), self.embed(b), self.embed(c), self.embed(d));
        (0..sa.len()).all(|j| (sa[j] * sd[j] - sb[j] * sc[j]).abs() < 1e-7)
    }
}

#[derive(Clone, Debug)]
pub struct BruteForce {
    pub mu1: f64,
    pub best: (Vec<i64>, Vec<i64>),
    pub mu2: f64,
    pub second: (Vec<i64>, Vec<i64>),
}

fn boxes(n: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| (-bound..=bound).map(move |k| [v.clone(), vec![k]].concat()))
            .collect();
    }
    out
}

/// Top two distinct cusps by μ over all pairs with coordinates in [−bound, bound].
pub fn brute_force(o: &Oracle, tau: &[Complex64], bound: i64) -> BruteForce {
    let all = boxes(o.degree(), bound);
    let mut scored: Vec<(f64, Vec<i64>, Vec<i64>)> = Vec::new();
    for b in &all {
        for a in &all {
            if a.iter().chain(b).all(|&x| x == 0) {
                continue;
            }
            scored.push((o.mu_naive(tau, a, b), a.clone(), b.clone()));
        }
    }
    scored.sort_by(|x, y| y.0.total_cmp(&x.0));
    let (mu1, a1, b1) = scored[0].clone();
    let second = scored[1..].iter().find(|(_, a, b)| !o.same_point(&a1, &b1, a, b)).unwrap().clone();
    BruteForce { mu1, best: (a1, b1), mu2: second.0, second: (second.1, second.2) }
}

pub fn random_tau<R: Rng>(n: usize, rng: &mut R, x: f64, y: (f64, f64)) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.random_range(-x..x), rng.random_range(y.0..y.1))).collect()
}

pub fn point(tau: &[Complex64]) -> UpperHalfPoint {
    UpperHalfPoint::new(tau.to_vec()).unwrap()
}

/// Legendre-type character of ℚ(√5): χ(n) = (n/5).
pub fn chi5(n: u64) -> f64 {
    match n % 5 {
        1 | 4 => 1.0,
        2 | 3 => -1.0,
        _ => 0.0,
    }
}

/// ζ_{ℚ(√5)}(2) = ζ(2)·L(2, χ₅), both series summed directly.
pub fn zeta_sqrt5_oracle(terms: u64) -> f64 {
    let l: f64 = (1..=terms).rev().map(|n| chi5(n) / (n as f64 * n as f64)).sum();
    std::f64::consts::PI.powi(2) / 6.0 * l
}
