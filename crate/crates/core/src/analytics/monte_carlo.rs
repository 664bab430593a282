use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::sampling::NeighborhoodSampler;
use super::volume::ball_volume;
use crate::cusp_search::CuspSearch;
use crate::error::{Error, Result};
use crate::number_field::TotallyRealField;

/// Samples per RNG stream. Fixed so results do not depend on the worker count.
pub const DEFAULT_CHUNK: u64 = 1024;

#[derive(Clone, Copy, Debug)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { samples: 100_000, seed: 0, workers: 1 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    /// Samples that landed in S_∞.
    pub accepted: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub workers: usize,
}

#[derive(Clone, Copy, Default)]
struct Sums {
    n: u64,
    hits: u64,
    a: f64,
    aa: f64,
}

impl Sums {
    fn merge(mut self, o: Sums) -> Sums {
        self.n += o.n;
        self.hits += o.hits;
        self.a += o.a;
        self.aa += o.aa;
        self
    }
}

/// Runs `weight` on every sample of the shell; `weight` returns `None` for
/// points outside S_∞. Chunk k uses stream k of the seeded ChaCha8 generator
/// and partial sums are reduced in chunk order.
fn shell_sums<F>(sampler: &NeighborhoodSampler<'_>, search: &CuspSearch<'_>, cfg: &McConfig, weight: F) -> Result<Sums>
where
    F: Fn(f64) -> f64 + Sync,
{
    if cfg.samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    let chunks = cfg.samples.div_ceil(DEFAULT_CHUNK);
    let run_chunk = |k: u64| -> Result<Sums> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(k);
        let len = DEFAULT_CHUNK.min(cfg.samples - k * DEFAULT_CHUNK);
        let mut s = Sums::default();
        for _ in 0..len {
            let tau = sampler.sample(&mut rng);
            s.n += 1;
            if search.in_sphere_of_influence(&tau)? {
                let w = weight(tau.norm_im());
                s.hits += 1;
                s.a += w;
                s.aa += w * w;
            }
        }
        Ok(s)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let parts: Vec<Sums> = pool.install(|| (0..chunks).into_par_iter().map(run_chunk).collect::<Result<_>>())?;
    Ok(parts.into_iter().fold(Sums::default(), Sums::merge))
}

/// g(x) = vol(Γ̂_∞\(S_∞ ∩ B(∞, x))).
///
/// Exact for x ≤ 1, where the ball lies inside S_∞. For x > 1 the unit ball is
/// added exactly and only the shell B(∞, x) \ B(∞, 1) is sampled.
pub fn partial_volume_g(field: &TotallyRealField, x: f64, cfg: &McConfig) -> Result<McEstimate> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidInput(format!("x must be positive and finite, got {x}")));
    }
    if x <= 1.0 {
        return Ok(McEstimate {
            value: ball_volume(field, x),
            std_error: 0.0,
            samples: 0,
            accepted: 0,
            seed: cfg.seed,
            t: None,
            workers: cfg.workers,
        });
    }
    let sampler = NeighborhoodSampler::shell(field, 1.0, x)?;
    let search = CuspSearch::new(field);
    let s = shell_sums(&sampler, &search, cfg, |_| 1.0)?;
    let v = sampler.cell_volume();
    let p = s.hits as f64 / s.n as f64;
    Ok(McEstimate {
        value: ball_volume(field, 1.0) + v * p,
        std_error: v * (p * (1.0 - p) / s.n as f64).sqrt(),
        samples: s.n,
        accepted: s.hits,
        seed: cfg.seed,
        t: None,
        workers: cfg.workers,
    })
}

/// Estimate of vol(Γ̂\ℍⁿ) = g(x) for any x ≥ the Hermite upper bound to the n.
pub fn sphere_volume_estimate(field: &TotallyRealField, cfg: &McConfig) -> Result<McEstimate> {
    let r = field.hermite_upper_bound().powi(field.degree() as i32);
    partial_volume_g(field, r.max(1.0 + 1e-9), cfg)
}

/// (1/vol) ∫_{Γ̂\ℍⁿ} μ₁^t dμ for 0 ≤ t < 1, via S_∞ where μ₁ = N(y).
///
/// Ratio estimator: numerator and denominator each combine the exact unit-ball
/// part with a Monte Carlo estimate over the shell up to radius upperⁿ; the
/// standard error comes from the delta method.
pub fn integral_mu1_t(field: &TotallyRealField, t: f64, cfg: &McConfig) -> Result<McEstimate> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::InvalidInput(format!("t must lie in [0, 1), got {t}")));
    }
    if t == 0.0 {
        return Ok(McEstimate {
            value: 1.0,
            std_error: 0.0,
            samples: 0,
            accepted: 0,
            seed: cfg.seed,
            t: Some(t),
            workers: cfg.workers,
        });
    }
    let r = field.hermite_upper_bound().powi(field.degree() as i32).max(1.0 + 1e-9);
    let sampler = NeighborhoodSampler::shell(field, 1.0, r)?;
    let search = CuspSearch::new(field);
    let s = shell_sums(&sampler, &search, cfg, |ny| ny.powf(t))?;
    let n = s.n as f64;
    let v = sampler.cell_volume();
    let b1 = ball_volume(field, 1.0);
    // per-sample variables: A = v·w·1_S, B = v·1_S
    let (ma, mb) = (s.a / n, s.hits as f64 / n);
    let num = b1 / (1.0 - t) + v * ma;
    let den = b1 + v * mb;
    let value = num / den;
    let var_a = (s.aa / n - ma * ma).max(0.0);
    let var_b = (mb - mb * mb).max(0.0);
    let cov = s.a / n - ma * mb;
    let var = v * v * (var_a - 2.0 * value * cov + value * value * var_b).max(0.0) / (den * den * n);
    Ok(McEstimate {
        value,
        std_error: var.sqrt(),
        samples: s.n,
        accepted: s.hits,
        seed: cfg.seed,
        t: Some(t),
        workers: cfg.workers,
    })
}
