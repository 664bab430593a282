use std::f64::consts::PI;

use serde::Serialize;

use crate::error::Result;
use crate::number_field::{TotallyRealField, ZetaValue};

#[derive(Clone, Debug, Serialize)]
pub struct VolumeReport {
    /// vol(Γ_K\ℍⁿ) = (2/πⁿ) Δ^{3/2} ζ_K(2).
    pub vol_gamma: f64,
    /// vol(Γ̂_K\ℍⁿ) = vol_gamma / index_plus_sq.
    pub vol_gamma_hat: f64,
    /// vol(Γ̂_{K,∞}\B(∞, 1)).
    pub vol_ball_unit: f64,
    /// Error bar on vol_gamma inherited from the Euler-product tail.
    pub vol_gamma_error: f64,
    pub zeta2: ZetaValue,
}

/// Volume of the cell G of totally positive units in balanced log coordinates:
/// 2^{n-1} R_K / [O^{×,+} : O^{×,2}].
pub fn unit_cell_volume(field: &TotallyRealField) -> f64 {
    let n = field.degree() as i32;
    2f64.powi(n - 1) * field.regulator() / f64::from(field.index_plus_sq())
}

/// vol(Γ̂_{K,∞}\B(∞, r)) = √Δ · 2^{n-1}/index · R_K · r².
pub fn ball_volume(field: &TotallyRealField, r: f64) -> f64 {
    field.discriminant_f64().sqrt() * unit_cell_volume(field) * r * r
}

pub fn siegel_volume(field: &TotallyRealField, prime_bound: u64) -> Result<VolumeReport> {
    let zeta2 = field.zeta_k_2(prime_bound)?;
    let n = field.degree() as i32;
    let pre = 2.0 / PI.powi(n) * field.discriminant_f64().powf(1.5);
    let vol_gamma = pre * zeta2.value;
    Ok(VolumeReport {
        vol_gamma,
        vol_gamma_hat: vol_gamma / f64::from(field.index_plus_sq()),
        vol_ball_unit: ball_volume(field, 1.0),
        vol_gamma_error: pre * zeta2.tail_bound,
        zeta2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_factory::{make_rationals, make_real_quadratic, QuadraticFieldRequest};

    #[test]
    fn rational_volumes() {
        let k = make_rationals(80).unwrap();
        let v = siegel_volume(&k, 1_000_000).unwrap();
        assert!((v.vol_gamma - PI / 3.0).abs() < 1e-6);
        assert_eq!(v.vol_ball_unit, 1.0);
        assert_eq!(ball_volume(&k, 0.5), 0.25);
    }

    #[test]
    fn index_relation() {
        let k = make_real_quadratic(&QuadraticFieldRequest::new(3)).unwrap();
        let v = siegel_volume(&k, 10_000).unwrap();
        assert!((v.vol_gamma - 2.0 * v.vol_gamma_hat).abs() < 1e-12);
    }
}
