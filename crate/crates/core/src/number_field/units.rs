//! The lattice of totally positive units under the logarithmic embedding.

use crate::linalg::{f64_det, f64_inverse};

/// Lower edge of the half-open unit cell `[lo, lo + 1)` in lattice coordinates.
///
/// Offset from -1/2 so that elements with rational lattice coordinates of small
/// denominator (φ in Q(√5) sits at exactly 1/2) never land on a cell wall.
pub const UNIT_CELL_LOWER: f64 = -0.5 + 0.0917;

/// Balanced coordinates `u_j = log y_j - (1/n) Σ log y_k`, `j < n`.
pub fn balanced(logs: &[f64]) -> Vec<f64> {
    let n = logs.len();
    let mean = logs.iter().sum::<f64>() / n as f64;
    logs[..n - 1].iter().map(|l| l - mean).collect()
}

/// Log vectors of a basis of O^{×,+} plus the inverse of its (n-1)-minor.
#[derive(Clone, Debug)]
pub struct UnitLattice {
    /// `logs[k][j] = log σ_j(η_k)`, full length n.
    logs: Vec<Vec<f64>>,
    /// Inverse of `L[j][k] = logs[k][j]`, `j, k < n-1`.
    inv: Vec<Vec<f64>>,
    covolume: f64,
}

impl UnitLattice {
    pub(crate) fn trivial() -> Self {
        Self { logs: Vec::new(), inv: Vec::new(), covolume: 1.0 }
    }

    pub(crate) fn new(logs: Vec<Vec<f64>>) -> Option<Self> {
        let r = logs.len();
        if r == 0 {
            return Some(Self::trivial());
        }
        let l: Vec<Vec<f64>> = (0..r).map(|j| (0..r).map(|k| logs[k][j]).collect()).collect();
        let covolume = f64_det(&l).abs();
        if covolume < 1e-12 {
            return None;
        }
        let inv = f64_inverse(&l)?;
        Some(Self { logs, inv, covolume })
    }

    pub fn rank(&self) -> usize {
        self.logs.len()
    }

    /// Volume of the fundamental cell `G` in the first n-1 log coordinates.
    pub fn covolume(&self) -> f64 {
        self.covolume
    }

    /// Full-length log vector of the k-th generator.
    pub fn generator_log(&self, k: usize) -> &[f64] {
        &self.logs[k]
    }

    /// Lattice coordinates of a balanced log vector.
    pub fn coordinates(&self, v: &[f64]) -> Vec<f64> {
        self.inv.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Balanced log vector (length n-1) with the given lattice coordinates.
    pub fn point(&self, c: &[f64]) -> Vec<f64> {
        let r = self.rank();
        (0..r).map(|j| (0..r).map(|k| c[k] * self.logs[k][j]).sum()).collect()
    }

    /// Exponents `e` with `v + Σ e_k l_k` in the cell `[lo, lo+1)^{n-1}`.
    pub fn reducing_exponents(&self, v: &[f64]) -> Vec<i64> {
        self.coordinates(v).iter().map(|c| -((c - UNIT_CELL_LOWER).floor() as i64)).collect()
    }

    /// Largest value of `log|σ_j(x)| - (1/n) log|N(x)|` over reduced `x`, per embedding.
    pub fn cell_log_span(&self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|j| {
                self.logs
                    .iter()
                    .map(|l| (UNIT_CELL_LOWER * l[j]).max((UNIT_CELL_LOWER + 1.0) * l[j]))
                    .sum::<f64>()
            })
            .collect()
    }
}
