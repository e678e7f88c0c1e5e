//! Special functions used by the spectral oracle.

pub mod bessel;
pub mod zeros;

pub use bessel::{bessel_j, bessel_j_pair, spherical_j_pair};
pub use zeros::{bessel_zero, zero_table, ZeroTable};
