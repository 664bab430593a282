use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hyperbolic_geometry::UpperHalfPoint;
use crate::number_field::{TotallyRealField, UNIT_CELL_LOWER};

/// Draws from the invariant measure on T × {u ∈ G, s_lo < N(y) < s_hi},
/// normalized to a probability.
///
/// The measure factors as dx · du · ds/s² with s = N(y) and u the balanced
/// log coordinates of y, so x and u are uniform and s is drawn by inverting
/// the CDF of s^{-2} on the interval.
#[derive(Clone, Debug)]
pub struct NeighborhoodSampler<'a> {
    field: &'a TotallyRealField,
    inv_lo: f64,
    inv_hi: f64,
}

impl<'a> NeighborhoodSampler<'a> {
    /// The cell of the ball B(∞, r): N(y) > 1/r².
    pub fn ball(field: &'a TotallyRealField, r: f64) -> Result<Self> {
        Self::shell(field, 0.0, r)
    }

    /// The cell of B(∞, r_outer) minus B(∞, r_inner).
    pub fn shell(field: &'a TotallyRealField, r_inner: f64, r_outer: f64) -> Result<Self> {
        if !(r_inner >= 0.0 && r_outer > r_inner && r_outer.is_finite()) {
            return Err(Error::InvalidInput(format!("need 0 <= r_inner < r_outer, got {r_inner}, {r_outer}")));
        }
        // 1/s ranges over (r_inner², r_outer²]
        Ok(Self { field, inv_lo: r_inner * r_inner, inv_hi: r_outer * r_outer })
    }

    /// Invariant measure of the sampled cell.
    pub fn cell_volume(&self) -> f64 {
        super::volume::ball_volume(self.field, 1.0) * (self.inv_hi - self.inv_lo)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> UpperHalfPoint {
        let field = self.field;
        let n = field.degree();
        let t: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let x: Vec<f64> = field.embedding_matrix().iter().map(|row| row.iter().zip(&t).map(|(a, b)| a * b).sum()).collect();
        let c: Vec<f64> = (0..n - 1).map(|_| UNIT_CELL_LOWER + rng.random::<f64>()).collect();
        let u = field.unit_lattice().point(&c);
        let inv_s = self.inv_hi - rng.random::<f64>() * (self.inv_hi - self.inv_lo);
        let log_s = -inv_s.ln();
        let mean = log_s / n as f64;
        let mut ys: Vec<f64> = u.iter().map(|v| (v + mean).exp()).collect();
        ys.push((mean - u.iter().sum::<f64>()).exp());
        UpperHalfPoint::from_parts(&x, &ys).expect("sampled point lies in the upper half space")
    }
}

/// `count` i.i.d. points from the cell of B(∞, r), reproducible from `seed`.
pub fn sample_cusp_neighborhood(field: &TotallyRealField, r: f64, count: usize, seed: u64) -> Result<Vec<UpperHalfPoint>> {
    let sampler = NeighborhoodSampler::ball(field, r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| sampler.sample(&mut rng)).collect())
}
