//! Cusp distances on Hilbert modular varieties of class-number-one totally
//! real fields.
//!
//! The crate covers exact field arithmetic ([`number_field`]), built-in fields
//! ([`field_factory`]), the action of the extended Hilbert modular group on
//! ℍⁿ ([`hyperbolic_geometry`]), the function μ(τ, c) ([`cusp_metric`]),
//! closest-cusp enumeration and reduction ([`cusp_search`]), heights on the
//! rigid adelic spaces E_τ ([`adelic_heights`]) and volume / Monte Carlo
//! analytics ([`analytics`]).

pub mod adelic_heights;
pub mod analytics;
pub mod cusp_metric;
pub mod cusp_search;
pub mod enumerate;
pub mod error;
pub mod field_factory;
pub mod hyperbolic_geometry;
mod linalg;
pub mod number_field;
pub mod selftest;

pub use cusp_metric::Cusp;
pub use cusp_search::{CuspRanking, CuspSearch, MinkowskiReport};
pub use error::{Error, Result};
pub use hyperbolic_geometry::{GroupElement, UpperHalfPoint};
pub use number_field::{FieldElement, TotallyRealField};
