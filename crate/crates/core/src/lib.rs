//! Grid-based numerical laboratory for quantitative geometric inequalities.
//!
//! The crate discretizes bounded sets as occupancy masks on a uniform lattice
//! and evaluates the functionals that appear in the stability theory of the
//! Brunn-Minkowski, Gaussian concentration and Riesz rearrangement
//! inequalities: asymmetries, deficits, anisotropic and Gaussian perimeters,
//! symmetric decreasing rearrangements, finite-range interaction energies and
//! the droplet free energies built from them. Every inequality check carries
//! an explicit discretization slack so that proved inequalities can be
//! asserted, not just eyeballed.
//!
//! All numeric code is generic over the scalar type through [`scalar::Scalar`]
//! (`f64` by default; `f32` works for everything that does not need tight
//! tolerances). The type aliases below fix the default precision used by the
//! command line driver and the verification suites.

pub mod bm;
pub mod convolve;
pub mod dist;
pub mod error;
pub mod field;
pub mod gauge;
pub mod gauss;
pub mod gpl;
pub mod grid;
pub mod kernel;
pub mod rearrange;
pub mod report;
pub mod riesz;
pub mod scalar;
pub mod setlib;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default-precision lattice set.
pub type GridSet = grid::GridSet<f64>;
/// Default-precision lattice function.
pub type ScalarField = field::ScalarField<f64>;
/// Default-precision gauge body.
pub type GaugeBody = gauge::GaugeBody<f64>;
/// Default-precision interaction kernel.
pub type Kernel = kernel::Kernel<f64>;
/// Default-precision periodic phase field.
pub type TorusField = gpl::TorusField<f64>;
