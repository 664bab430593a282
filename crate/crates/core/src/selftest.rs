//! Cross-module invariant suites run by `hcusp selftest`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytics::{integral_mu1_t, sample_cusp_neighborhood, sphere_volume_estimate, McConfig};
use crate::cusp_metric::{iota, mu, mu_invariance_check, Cusp};
use crate::cusp_search::CuspSearch;
use crate::error::Result;
use crate::hyperbolic_geometry::{mat_mul, phi, psi_matrix, transpose, GroupElement, UpperHalfPoint};
use crate::number_field::{FieldElement, TotallyRealField};

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub field: String,
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

/// Per-suite sizes. The defaults finish in seconds per field.
#[derive(Clone, Copy, Debug)]
pub struct SelftestConfig {
    pub seed: u64,
    pub cases: usize,
    pub mc_samples: u64,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self { seed: 0, cases: 200, mc_samples: 4096 }
    }
}

struct Tally {
    name: &'static str,
    checks: usize,
    failures: usize,
    first_failure: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self { name, checks: 0, failures: 0, first_failure: None }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            passed: self.failures == 0 && self.checks > 0,
            checks: self.checks,
            failures: self.failures,
            first_failure: self.first_failure,
        }
    }
}

pub fn random_tau<R: Rng>(field: &TotallyRealField, rng: &mut R) -> UpperHalfPoint {
    let coords = (0..field.degree())
        .map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-1.0f64..1.0).exp()))
        .collect();
    UpperHalfPoint::new(coords).expect("positive imaginary parts")
}

fn random_element<R: Rng>(field: &TotallyRealField, rng: &mut R, bound: i64) -> FieldElement {
    let c: Vec<i64> = (0..field.degree()).map(|_| rng.random_range(-bound..=bound)).collect();
    FieldElement::from_ints(&c)
}

fn random_nonzero<R: Rng>(field: &TotallyRealField, rng: &mut R, bound: i64) -> FieldElement {
    loop {
        let x = random_element(field, rng, bound);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Word of length 1..=4 in translations, unit scalings and the inversion.
pub fn random_group_element<R: Rng>(field: &TotallyRealField, rng: &mut R) -> Result<GroupElement> {
    let mut g = GroupElement::identity(field);
    for _ in 0..rng.random_range(1..=4) {
        let step = match rng.random_range(0..3) {
            0 => GroupElement::translation(field, &random_element(field, rng, 2))?,
            1 if !field.fundamental_units().is_empty() => {
                let k = rng.random_range(0..field.fundamental_units().len());
                let mut exps = vec![0; field.fundamental_units().len()];
                exps[k] = if rng.random::<bool>() { 1 } else { -1 };
                GroupElement::scaling(field, &field.unit_power(&exps))?
            }
            _ => GroupElement::inversion(field),
        };
        g = step.compose(field, &g);
    }
    Ok(g)
}

pub fn random_cusp<R: Rng>(field: &TotallyRealField, rng: &mut R) -> Result<Cusp> {
    if rng.random_range(0..10) == 0 {
        return Ok(Cusp::infinity(field));
    }
    let a = random_element(field, rng, 5);
    let b = random_nonzero(field, rng, 5);
    Cusp::new(field, &a, &b)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn product_formula(field: &TotallyRealField, rng: &mut ChaCha8Rng, cfg: &SelftestConfig) -> Result<SuiteResult> {
    let mut t = Tally::new("product_formula");
    for _ in 0..cfg.cases {
        let x = random_nonzero(field, rng, 50);
        let ok = field.product_formula_check(&x)?;
        t.check(ok, || format!("x = {x}"));
    }
    Ok(t.finish())
}

fn action_associativity(field: &TotallyRealField, rng: &mut ChaCha8Rng, cfg: &SelftestConfig) -> Result<SuiteResult> {
    let mut t = Tally::new("group_action_associativity");
    for _ in 0..cfg.cases {
        let g = random_group_element(field, rng)?;
        let h = random_group_element(field, rng)?;
        let tau = random_tau(field, rng);
        let lhs = g.compose(field, &h).act(field, &tau);
        let rhs = g.act(field, &h.act(field, &tau));
        let scale = lhs.coords().iter().map(|z| z.norm()).fold(1.0, f64::max);
        let dev = lhs.max_deviation(&rhs);
        t.check(dev <= 1e-9 * scale, || format!("deviation {dev}"));
        let back = g.inverse().act(field, &g.act(field, &tau));
        let dev = back.max_deviation(&tau);
        t.check(dev <= 1e-9 * scale.max(1.0), || format!("inverse deviation {dev}"));
    }
    Ok(t.finish())
}

fn phi_psi(field: &TotallyRealField, rng: &mut ChaCha8Rng, cfg: &SelftestConfig) -> Result<SuiteResult> {
    let mut t = Tally::new("phi_psi_inversion_equivariance");
    for _ in 0..cfg.cases {
        let tau = random_tau(field, rng);
        let lambda = rng.random_range(0.1..10.0);
        let g = random_group_element(field, rng)?;
        let moved = g.act(field, &tau);
        for ((z, w), m) in tau.coords().iter().zip(moved.coords()).zip(g.embedded(field)) {
            let s = phi(*z, lambda);
            let (z2, l2) = psi_matrix(&s)?;
            t.check((z2 - z).norm() <= 1e-10 * (1.0 + z.norm()) && close(l2, lambda, 1e-10), || format!("psi(phi({z}, {lambda}))"));
            // g φ(τ, λ) gᵀ = φ(gτ, λ det²)
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            let (z3, l3) = psi_matrix(&mat_mul(&mat_mul(&m, &s), &transpose(&m)))?;
            t.check(
                (z3 - w).norm() <= 1e-8 * (1.0 + w.norm()) && close(l3, lambda * det * det, 1e-8),
                || format!("equivariance at {z}: {z3} vs {w}"),
            );
        }
        let c = random_cusp(field, rng)?;
        let ok = mu_invariance_check(field, &g, &tau, &c)?;
        t.check(ok, || format!("mu invariance at cusp {c}"));
    }
    Ok(t.finish())
}

fn iota_involution(field: &TotallyRealField, rng: &mut ChaCha8Rng, cfg: &SelftestConfig) -> Result<SuiteResult> {
    let mut t = Tally::new("iota_involution");
    for _ in 0..cfg.cases {
        let c = random_cusp(field, rng)?;
        let twice = iota(field, &iota(field, &c)?)?;
        t.check(twice == c, || format!("iota(iota({c})) = {twice}"));
    }
    Ok(t.finish())
}

fn reduction_idempotence(field: &TotallyRealField, rng: &mut ChaCha8Rng, cfg: &SelftestConfig) -> Result<SuiteResult> {
    let mut t = Tally::new("reduction_idempotence");
    let search = CuspSearch::new(field);
    for _ in 0..cfg.cases.div_ceil(4) {
        let tau = random_tau(field, rng);
        let (r1, g) = search.reduce_to_fundamental_domain(&tau)?;
        let (r2, _) = search.reduce_to_fundamental_domain(&r1)?;
        let dev = r1.max_deviation(&r2);
        t.check(dev <= 1e-8, || format!("reduce twice moved by {dev}"));
        let mu_inf = mu(field, &r1, &Cusp::infinity(field));
        let mu1 = search.mu1(&r1)?;
        t.check(close(mu_inf, mu1, 1e-9), || format!("reduced point outside S_inf: {mu_inf} < {mu1}"));
        let dev = g.act(field, &tau).max_deviation(&r1);
        t.check(dev <= 1e-8, || format!("returned element disagrees with point by {dev}"));
    }
    Ok(t.finish())
}

fn mc_reproducibility(field: &TotallyRealField, cfg: &SelftestConfig) -> Result<SuiteResult> {
    let mut t = Tally::new("mc_seed_reproducibility");
    let base = McConfig { samples: cfg.mc_samples, seed: cfg.seed, workers: 1 };
    let a = sample_cusp_neighborhood(field, 1.5, 256, cfg.seed)?;
    let b = sample_cusp_neighborhood(field, 1.5, 256, cfg.seed)?;
    t.check(a.iter().zip(&b).all(|(p, q)| p.coords() == q.coords()), || "sample stream differs".into());
    for workers in [1, 2, 4] {
        let run = McConfig { workers, ..base };
        let v1 = sphere_volume_estimate(field, &base)?;
        let v2 = sphere_volume_estimate(field, &run)?;
        t.check(v1.value.to_bits() == v2.value.to_bits(), || format!("volume differs with {workers} workers"));
        let i1 = integral_mu1_t(field, 0.5, &base)?;
        let i2 = integral_mu1_t(field, 0.5, &run)?;
        t.check(
            i1.value.to_bits() == i2.value.to_bits() && i1.std_error.to_bits() == i2.std_error.to_bits(),
            || format!("integral differs with {workers} workers"),
        );
    }
    Ok(t.finish())
}

pub fn run_selftest(field: &TotallyRealField, cfg: &SelftestConfig) -> Result<SelftestReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let suites = vec![
        product_formula(field, &mut rng, cfg)?,
        action_associativity(field, &mut rng, cfg)?,
        phi_psi(field, &mut rng, cfg)?,
        iota_involution(field, &mut rng, cfg)?,
        reduction_idempotence(field, &mut rng, cfg)?,
        mc_reproducibility(field, cfg)?,
    ];
    let passed = suites.iter().all(|s| s.passed);
    Ok(SelftestReport { field: field.name().to_string(), seed: cfg.seed, suites, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_factory::{make_rationals, make_real_quadratic, QuadraticFieldRequest};

    #[test]
    fn selftest_passes_on_small_fields() {
        let cfg = SelftestConfig { cases: 40, mc_samples: 1024, ..Default::default() };
        for k in [make_rationals(80).unwrap(), make_real_quadratic(&QuadraticFieldRequest::new(5)).unwrap()] {
            let r = run_selftest(&k, &cfg).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }
}
