//! Shared numerical building blocks: the Bessel kernel of the Hankel
//! transform, composite quadrature on uniform grids, and the seeded random
//! streams used by the simulators.

pub(crate) mod bessel;
mod grid;
mod quadrature;
mod rng;

pub use bessel::bessel_j0;
pub use grid::Grid1D;
pub use quadrature::{integrate_1d, integrate_2d, integrate_samples, quadrature_weights};
pub use rng::{RngSeed, RngStream};
