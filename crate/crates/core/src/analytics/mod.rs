//! Volumes, the partial volume function g, Monte Carlo integrals of μ₁^t and
//! the farthest-point estimate of the Hermite-type constant.

mod hermite;
mod monte_carlo;
mod sampling;
mod volume;

pub use hermite::{estimate_hermite, HermiteEstimate};
pub use monte_carlo::{
    integral_mu1_t, partial_volume_g, sphere_volume_estimate, McConfig, McEstimate, DEFAULT_CHUNK,
};
pub use sampling::{sample_cusp_neighborhood, NeighborhoodSampler};
pub use volume::{ball_volume, siegel_volume, unit_cell_volume, VolumeReport};
