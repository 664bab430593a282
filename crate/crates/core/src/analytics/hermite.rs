use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cusp_search::CuspSearch;
use crate::error::Result;
use crate::hyperbolic_geometry::UpperHalfPoint;
use crate::number_field::{TotallyRealField, UNIT_CELL_LOWER};

/// Grid points are capped at this many; the per-axis resolution shrinks to fit.
const MAX_GRID_POINTS: usize = 200_000;
const STARTS: usize = 5;

#[derive(Clone, Debug, Serialize)]
pub struct HermiteEstimate {
    pub tau_max: UpperHalfPoint,
    /// max over the search of μ₁(τ)^{-1/2}.
    pub distance: f64,
    /// distance^{1/n}, a lower estimate for the Hermite-type constant.
    pub c_estimate: f64,
    pub upper_bound: f64,
    pub evaluations: u64,
    pub grid_resolution: usize,
    pub refine_iters: usize,
    pub seed: u64,
}

/// Coordinates p = (t, c, L): x = E·t, balanced log(y) = point(c), log N(y) = L.
struct Chart<'a> {
    field: &'a TotallyRealField,
    search: CuspSearch<'a>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl<'a> Chart<'a> {
    fn new(field: &'a TotallyRealField) -> Self {
        let n = field.degree();
        let mut lo = vec![-0.5; n];
        let mut hi = vec![0.5; n];
        lo.extend(std::iter::repeat_n(UNIT_CELL_LOWER, n - 1));
        hi.extend(std::iter::repeat_n(UNIT_CELL_LOWER + 1.0, n - 1));
        lo.push(-2.0 * n as f64 * field.hermite_upper_bound().ln());
        hi.push(0.0);
        Self { field, search: CuspSearch::new(field), lo, hi }
    }

    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn clamp(&self, p: &mut [f64]) {
        for ((v, l), h) in p.iter_mut().zip(&self.lo).zip(&self.hi) {
            *v = v.clamp(*l, *h);
        }
    }

    fn tau(&self, p: &[f64]) -> UpperHalfPoint {
        let n = self.field.degree();
        let x: Vec<f64> = self.field.embedding_matrix().iter().map(|row| row.iter().zip(&p[..n]).map(|(a, b)| a * b).sum()).collect();
        let u = self.field.unit_lattice().point(&p[n..2 * n - 1]);
        let mean = p[2 * n - 1] / n as f64;
        let mut ys: Vec<f64> = u.iter().map(|v| (v + mean).exp()).collect();
        ys.push((mean - u.iter().sum::<f64>()).exp());
        UpperHalfPoint::from_parts(&x, &ys).expect("chart point lies in the upper half space")
    }

    fn distance(&self, p: &[f64]) -> Result<f64> {
        let mut q = p.to_vec();
        self.clamp(&mut q);
        Ok(self.search.mu1(&self.tau(&q))?.powf(-0.5))
    }
}

/// Maximizes f by Nelder-Mead from `start` with initial step `step`.
fn nelder_mead<F>(f: F, start: &[f64], step: &[f64], iters: usize, evals: &mut u64) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let d = start.len();
    let mut eval = |p: &[f64]| -> Result<f64> {
        *evals += 1;
        f(p).map(|v| -v)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((start.to_vec(), eval(start)?));
    for k in 0..d {
        let mut p = start.to_vec();
        p[k] += step[k];
        let v = eval(&p)?;
        simplex.push((p, v));
    }
    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let centroid: Vec<f64> = (0..d).map(|k| simplex[..d].iter().map(|s| s.0[k]).sum::<f64>() / d as f64).collect();
        let along = |lambda: f64, worst: &[f64]| -> Vec<f64> {
            centroid.iter().zip(worst).map(|(c, w)| c + lambda * (c - w)).collect()
        };
        let worst = simplex[d].clone();
        let xr = along(1.0, &worst.0);
        let fr = eval(&xr)?;
        if fr < simplex[0].1 {
            let xe = along(2.0, &worst.0);
            let fe = eval(&xe)?;
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
        } else {
            let xc = if fr < worst.1 { along(0.5, &worst.0) } else { along(-0.5, &worst.0) };
            let fc = eval(&xc)?;
            if fc < worst.1.min(fr) {
                simplex[d] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for s in simplex.iter_mut().skip(1) {
                    s.0 = best.iter().zip(&s.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                    s.1 = eval(&s.0)?;
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (p, v) = simplex.swap_remove(0);
    Ok((p, -v))
}

/// Grid search over the reduced domain followed by Nelder-Mead refinement of
/// max μ₁(τ)^{-1/2}. The grid offset is drawn from `seed`.
pub fn estimate_hermite(
    field: &TotallyRealField,
    grid_resolution: usize,
    refine_iters: usize,
    seed: u64,
) -> Result<HermiteEstimate> {
    let chart = Chart::new(field);
    let d = chart.dim();
    let cap = (MAX_GRID_POINTS as f64).powf(1.0 / d as f64).floor() as usize;
    let g = grid_resolution.clamp(2, cap.max(2));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    let point = |mut idx: usize| -> Vec<f64> {
        (0..d)
            .map(|k| {
                let i = idx % g;
                idx /= g;
                chart.lo[k] + (chart.hi[k] - chart.lo[k]) * (i as f64 + offset[k]) / g as f64
            })
            .collect()
    };
    let total = g.pow(d as u32);
    let values: Vec<f64> = (0..total).into_par_iter().map(|i| chart.distance(&point(i))).collect::<Result<_>>()?;
    let mut evaluations = total as u64;

    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let step: Vec<f64> = (0..d).map(|k| (chart.hi[k] - chart.lo[k]) / g as f64).collect();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for &i in order.iter().take(STARTS) {
        let (mut p, mut v) = nelder_mead(|q| chart.distance(q), &point(i), &step, refine_iters, &mut evaluations)?;
        // restart with a small simplex to escape a collapsed one
        let small: Vec<f64> = step.iter().map(|s| s * 0.05).collect();
        let (p2, v2) = nelder_mead(|q| chart.distance(q), &p, &small, refine_iters, &mut evaluations)?;
        if v2 >= v {
            p = p2;
            v = v2;
        }
        chart.clamp(&mut p);
        if best.as_ref().is_none_or(|b| v > b.1) {
            best = Some((p, v));
        }
    }
    let (p, distance) = best.expect("at least one start");
    let n = field.degree();
    Ok(HermiteEstimate {
        tau_max: chart.tau(&p),
        distance,
        c_estimate: distance.powf(1.0 / n as f64),
        upper_bound: field.hermite_upper_bound(),
        evaluations,
        grid_resolution: g,
        refine_iters,
        seed,
    })
}
