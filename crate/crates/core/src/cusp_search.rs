//! Closest cusps by bounded enumeration, the sphere of influence of ∞ and
//! reduction into the cusp-normalized fundamental domain.
//!
//! A cusp [α:β] with β ≠ 0 has μ(τ, c) ≥ t only if |N(β)| ≤ (t·N(y))^{-1/2}
//! and every |σ_j(α) - σ_j(β) x_j| stays under an explicit radius, because
//! each factor |σ_k(α) - σ_k(β)τ_k|² is at least σ_k(β)² y_k². Choosing β
//! unit-reduced turns both conditions into finite boxes in integral-basis
//! coordinates.

use num_complex::Complex64;
use serde::Serialize;

use crate::cusp_metric::Cusp;
use crate::enumerate::{box_size, for_each_in_box};
use crate::error::{Error, Result};
use crate::hyperbolic_geometry::{GroupElement, UpperHalfPoint};
use crate::number_field::{units::balanced, FieldElement, TotallyRealField};

pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_BUDGET: u64 = 10_000_000;
/// Guard on floating-point box edges; widening only adds candidates.
const EDGE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig {
    /// Relative tolerance under which two μ values count as tied.
    pub tie_tolerance: f64,
    /// Cap on enumerated lattice points per query.
    pub budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { tie_tolerance: DEFAULT_TIE_TOLERANCE, budget: DEFAULT_BUDGET }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EnumerationStats {
    /// Threshold actually used for the enumeration.
    pub threshold: f64,
    pub beta_box: u64,
    pub beta_admitted: u64,
    pub alpha_box: u64,
    pub above_threshold: u64,
    pub distinct_cusps: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CuspRanking {
    pub best_cusp: Cusp,
    pub mu1: f64,
    pub second_cusp: Cusp,
    pub mu2: f64,
    pub tie_flag: bool,
    pub enumeration_stats: EnumerationStats,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinkowskiReport {
    pub mu1: f64,
    pub mu2: f64,
    pub product: f64,
    pub lower: f64,
    pub upper: f64,
    pub tie_flag: bool,
    pub ok: bool,
}

/// A representative pair in small integral coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct RawCusp {
    pub alpha: Vec<i64>,
    pub beta: Vec<i64>,
    pub mu: f64,
}

/// Enumeration engine bound to one field.
#[derive(Clone, Debug)]
pub struct CuspSearch<'a> {
    field: &'a TotallyRealField,
    config: SearchConfig,
    /// exp of the largest balanced log coordinate of a unit-reduced element.
    spread: Vec<f64>,
}

fn dot(row: &[f64], v: &[i64]) -> f64 {
    row.iter().zip(v).map(|(a, &b)| a * b as f64).sum()
}

impl<'a> CuspSearch<'a> {
    pub fn new(field: &'a TotallyRealField) -> Self {
        Self::with_config(field, SearchConfig::default())
    }

    pub fn with_config(field: &'a TotallyRealField, config: SearchConfig) -> Self {
        let spread = field.unit_lattice().cell_log_span(field.degree()).iter().map(|s| s.exp()).collect();
        Self { field, config, spread }
    }

    pub fn field(&self) -> &'a TotallyRealField {
        self.field
    }

    pub fn config(&self) -> SearchConfig {
        self.config
    }

    /// 1/(2ⁿΔ_K), a level every τ is guaranteed to reach.
    pub fn default_threshold(&self) -> f64 {
        1.0 / (2f64.powi(self.field.degree() as i32) * self.field.discriminant_f64())
    }

    fn check_tau(&self, tau: &UpperHalfPoint) -> Result<()> {
        if tau.degree() != self.field.degree() {
            return Err(Error::InvalidInput(format!(
                "τ has {} coordinates but the field has degree {}",
                tau.degree(),
                self.field.degree()
            )));
        }
        Ok(())
    }

    /// Calls `visit(α, β, μ)` on every pair with β unit-reduced, β's first
    /// nonzero coordinate positive, and μ(τ, [α:β]) ≥ `threshold` computed
    /// without the N(α,β) factor. The coprime representative of every cusp
    /// above the threshold is among them. `visit` returns `false` to stop.
    pub fn enumerate(
        &self,
        tau: &UpperHalfPoint,
        threshold: f64,
        mut visit: impl FnMut(&[i64], &[i64], f64) -> bool,
    ) -> Result<EnumerationStats> {
        self.check_tau(tau)?;
        let field = self.field;
        let n = field.degree();
        let e = field.embedding_matrix();
        let einv = field.embedding_inverse();
        let xs = tau.re();
        let ys = tau.im();
        let ny = tau.norm_im();
        let mut stats = EnumerationStats { threshold, ..Default::default() };
        let bnorm = (threshold * ny).powf(-0.5);
        if !(bnorm >= 1.0 - EDGE) {
            return Ok(stats);
        }
        let root = bnorm.powf(1.0 / n as f64);
        let bound: Vec<f64> = self.spread.iter().map(|s| root * s * (1.0 + EDGE)).collect();
        let reach: Vec<i64> = einv
            .iter()
            .map(|row| row.iter().zip(&bound).map(|(a, b)| a.abs() * b).sum::<f64>().floor() as i64)
            .collect();
        let lo: Vec<i64> = reach.iter().map(|r| -r).collect();
        let size = box_size(&lo, &reach);
        if size > self.config.budget as f64 {
            return Err(Error::BudgetExceeded { needed: size, cap: self.config.budget });
        }
        stats.beta_box = size as u64;
        let c_total = ny / threshold;
        let mut spent = size;
        let mut failure = None;
        let mut sb = vec![0.0; n];
        let mut sa = vec![0.0; n];
        let mut f = vec![0.0; n];
        let mut center = vec![0.0; n];
        let mut radius = vec![0.0; n];
        for_each_in_box(&lo, &reach, |b| {
            match b.iter().find(|&&c| c != 0) {
                Some(&c) if c > 0 => {}
                _ => return true,
            }
            for j in 0..n {
                sb[j] = dot(&e[j], b);
            }
            if sb.iter().zip(&bound).any(|(s, bd)| s.abs() > *bd) {
                return true;
            }
            let nb: f64 = sb.iter().product::<f64>().abs();
            if nb > bnorm * (1.0 + EDGE) {
                return true;
            }
            stats.beta_admitted += 1;
            for j in 0..n {
                f[j] = (sb[j] * ys[j]).powi(2);
                center[j] = sb[j] * xs[j];
            }
            let prod_f: f64 = f.iter().product();
            for j in 0..n {
                radius[j] = (c_total * f[j] / prod_f).sqrt() * (1.0 + EDGE);
            }
            let alo: Vec<i64> = einv
                .iter()
                .map(|row| {
                    let mid: f64 = row.iter().zip(&center).map(|(a, c)| a * c).sum();
                    let w: f64 = row.iter().zip(&radius).map(|(a, r)| a.abs() * r).sum();
                    (mid - w).ceil() as i64
                })
                .collect();
            let ahi: Vec<i64> = einv
                .iter()
                .map(|row| {
                    let mid: f64 = row.iter().zip(&center).map(|(a, c)| a * c).sum();
                    let w: f64 = row.iter().zip(&radius).map(|(a, r)| a.abs() * r).sum();
                    (mid + w).floor() as i64
                })
                .collect();
            let asize = box_size(&alo, &ahi);
            spent += asize;
            if spent > self.config.budget as f64 {
                failure = Some(spent);
                return false;
            }
            stats.alpha_box += asize as u64;
            for_each_in_box(&alo, &ahi, |a| {
                let mut den = 1.0;
                for j in 0..n {
                    sa[j] = dot(&e[j], a) - center[j];
                    if sa[j].abs() > radius[j] {
                        return true;
                    }
                    den *= sa[j] * sa[j] + f[j];
                }
                let m = ny / den;
                if m >= threshold {
                    stats.above_threshold += 1;
                    return visit(a, b, m);
                }
                true
            })
        });
        if let Some(needed) = failure {
            return Err(Error::BudgetExceeded { needed, cap: self.config.budget });
        }
        Ok(stats)
    }

    fn same_cusp(&self, p: &RawCusp, q: &RawCusp) -> bool {
        self.field.mul_small(&p.alpha, &q.beta) == self.field.mul_small(&q.alpha, &p.beta)
    }

    /// μ at ∞ and at the nearest integral translate [a:1]: two distinct cusps.
    fn seeds(&self, tau: &UpperHalfPoint) -> (RawCusp, RawCusp) {
        let field = self.field;
        let n = field.degree();
        let x = tau.re();
        let a: Vec<i64> = field.embedding_inverse().iter().map(|row| row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>().round() as i64).collect();
        let sa = field.embed_small(&a);
        let den: f64 = tau.coords().iter().zip(&sa).map(|(z, s)| (s - z).norm_sqr()).product();
        let inf = RawCusp { alpha: field.one_coords().to_vec(), beta: vec![0; n], mu: tau.norm_im() };
        let near = RawCusp { alpha: a, beta: field.one_coords().to_vec(), mu: tau.norm_im() / den };
        (inf, near)
    }

    /// Distinct cusps in decreasing μ, covering at least the top two and
    /// everything tied with the second.
    ///
    /// The enumeration runs at min(threshold, seed level) where the seed level
    /// is the smaller μ of two distinct known cusps, a lower bound for μ₂. An
    /// infinite threshold therefore means "just the top two".
    pub fn rank_raw(&self, tau: &UpperHalfPoint, threshold: f64) -> Result<(Vec<RawCusp>, EnumerationStats)> {
        let (inf, near) = self.seeds(tau);
        // μ₂ ≥ min over two distinct cusps, so this level cannot miss the top two.
        let mut level = threshold.min(inf.mu.min(near.mu)) * (1.0 - 1e-12);
        loop {
            let mut cands = vec![inf.clone()];
            let mut stats = self.enumerate(tau, level, |a, b, m| {
                cands.push(RawCusp { alpha: a.to_vec(), beta: b.to_vec(), mu: m });
                true
            })?;
            cands.sort_by(|p, q| {
                q.mu.total_cmp(&p.mu).then_with(|| p.beta.cmp(&q.beta)).then_with(|| p.alpha.cmp(&q.alpha))
            });
            let tol = self.config.tie_tolerance;
            let mut distinct: Vec<RawCusp> = Vec::new();
            for c in cands {
                if distinct.len() >= 2 && c.mu < distinct[1].mu * (1.0 - tol) {
                    break;
                }
                if !distinct.iter().any(|d| self.same_cusp(d, &c)) {
                    distinct.push(c);
                }
            }
            if distinct.len() >= 2 {
                stats.distinct_cusps = distinct.len() as u64;
                return Ok((distinct, stats));
            }
            level *= 0.5;
        }
    }

    fn to_cusp(&self, r: &RawCusp) -> Result<Cusp> {
        Cusp::from_coords(self.field, &r.alpha, &r.beta)
    }

    /// The two largest μ(τ, ·) over distinct cusps, with canonical maximizers.
    pub fn closest_cusps(&self, tau: &UpperHalfPoint, threshold: f64) -> Result<CuspRanking> {
        let limit = self.default_threshold();
        if !(threshold > 0.0 && threshold <= limit * (1.0 + 1e-12)) {
            return Err(Error::InvalidInput(format!("threshold must lie in (0, {limit}]")));
        }
        // Enumerating below the seed level cannot change the top two.
        let (raw, stats) = self.rank_raw(tau, f64::INFINITY)?;
        let tol = self.config.tie_tolerance;
        let mu1 = raw[0].mu;
        let top: Vec<&RawCusp> = raw.iter().take_while(|r| r.mu >= mu1 * (1.0 - tol)).collect();
        let (best, best_mu, second, second_mu) = if top.len() >= 2 {
            let mut group: Vec<(Cusp, f64)> = top.iter().map(|r| Ok((self.to_cusp(r)?, r.mu))).collect::<Result<_>>()?;
            group.sort_by(|p, q| p.0.cmp(&q.0));
            let (b, bm) = group[0].clone();
            let (s, sm) = group[1].clone();
            (b, bm, s, sm)
        } else {
            let best = self.to_cusp(&raw[0])?;
            let mu2 = raw[1].mu;
            let mut group: Vec<(Cusp, f64)> = raw[1..]
                .iter()
                .take_while(|r| r.mu >= mu2 * (1.0 - tol))
                .map(|r| Ok((self.to_cusp(r)?, r.mu)))
                .collect::<Result<_>>()?;
            group.sort_by(|p, q| p.0.cmp(&q.0));
            let (s, sm) = group[0].clone();
            (best, mu1, s, sm)
        };
        let (mu1, mu2) = (best_mu.max(second_mu), best_mu.min(second_mu));
        Ok(CuspRanking {
            tie_flag: mu1 - mu2 <= tol * mu1,
            best_cusp: best,
            mu1,
            second_cusp: second,
            mu2,
            enumeration_stats: stats,
        })
    }

    pub fn closest_cusps_default(&self, tau: &UpperHalfPoint) -> Result<CuspRanking> {
        self.closest_cusps(tau, self.default_threshold())
    }

    /// μ₁(τ) without identifying the maximizing cusp.
    pub fn mu1(&self, tau: &UpperHalfPoint) -> Result<f64> {
        let (inf, near) = self.seeds(tau);
        let mut best = inf.mu.max(near.mu);
        self.enumerate(tau, best * (1.0 - 1e-12), |_, _, m| {
            best = best.max(m);
            true
        })?;
        Ok(best)
    }

    /// (μ₁, μ₂) without canonicalizing the maximizers.
    pub fn mu1_mu2(&self, tau: &UpperHalfPoint) -> Result<(f64, f64)> {
        let (raw, _) = self.rank_raw(tau, f64::INFINITY)?;
        Ok((raw[0].mu, raw[1].mu))
    }

    /// Whether ∞ attains μ₁(τ) up to the tie tolerance.
    pub fn in_sphere_of_influence(&self, tau: &UpperHalfPoint) -> Result<bool> {
        let ny = tau.norm_im();
        let level = ny * (1.0 + self.config.tie_tolerance);
        let (_, near) = self.seeds(tau);
        if near.mu > level {
            return Ok(false);
        }
        let mut inside = true;
        self.enumerate(tau, level, |_, _, m| {
            if m > level {
                inside = false;
                return false;
            }
            true
        })?;
        Ok(inside)
    }

    /// Moves τ into S_∞ with Im in the unit cell F and Re in the centred cell T.
    pub fn reduce_to_fundamental_domain(&self, tau: &UpperHalfPoint) -> Result<(UpperHalfPoint, GroupElement)> {
        let field = self.field;
        let ranking = self.closest_cusps_default(tau)?;
        let to_infinity = if ranking.best_cusp.is_infinity() {
            GroupElement::identity(field)
        } else {
            let (p, q) = (ranking.best_cusp.alpha(), ranking.best_cusp.beta());
            let bez = field.gcd(p, q)?;
            debug_assert_eq!(bez.d, field.one());
            GroupElement::new(field, bez.u, bez.w, -q, p.clone())?
        };
        let tau1 = to_infinity.act(field, tau);
        let normalize = self.stabilizer_normalization(&tau1)?;
        let gamma = normalize.compose(field, &to_infinity);
        Ok((gamma.act(field, tau), gamma))
    }

    /// [[ε, μ], [0, 1]] putting Im τ into F and then Re τ into T.
    fn stabilizer_normalization(&self, tau: &UpperHalfPoint) -> Result<GroupElement> {
        let field = self.field;
        let logs: Vec<f64> = tau.im().iter().map(|y| y.ln()).collect();
        let eps = if field.degree() > 1 {
            field.unit_power(&field.unit_lattice().reducing_exponents(&balanced(&logs)))
        } else {
            field.one()
        };
        let s = field.embed(&eps);
        let x: Vec<f64> = tau.re().iter().zip(&s).map(|(x, e)| x * e).collect();
        let shift: Vec<i64> = field
            .embedding_inverse()
            .iter()
            .map(|row| -(row.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() + 0.5).floor() as i64)
            .collect();
        GroupElement::new(field, eps, FieldElement::from_ints(&shift), field.zero(), field.one())
    }

    /// Checks upper^{-4n} ≤ μ₁μ₂ ≤ 1 at τ.
    pub fn verify_minkowski(&self, tau: &UpperHalfPoint, hermite_upper: f64) -> Result<MinkowskiReport> {
        let r = self.closest_cusps_default(tau)?;
        let n = self.field.degree() as i32;
        let product = r.mu1 * r.mu2;
        let lower = hermite_upper.powi(-4 * n);
        let report = MinkowskiReport {
            mu1: r.mu1,
            mu2: r.mu2,
            product,
            lower,
            upper: 1.0,
            tie_flag: r.tie_flag,
            ok: product >= lower - 1e-9 && product <= 1.0 + 1e-9,
        };
        if !report.ok {
            let coords: Vec<String> = tau.coords().iter().map(|z| format!("{}+{}i", z.re, z.im)).collect();
            return Err(Error::ViolationFound(format!(
                "mu1*mu2 = {product} outside [{lower}, 1] at tau = {}",
                coords.join(",")
            )));
        }
        Ok(report)
    }
}

/// Builds τ from (x_j, y_j) pairs; convenience for tests and callers.
pub fn tau_from_pairs(pairs: &[(f64, f64)]) -> Result<UpperHalfPoint> {
    UpperHalfPoint::new(pairs.iter().map(|&(x, y)| Complex64::new(x, y)).collect())
}
