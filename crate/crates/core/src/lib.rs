//! Dirichlet heat kernel of the unit ball near the boundary.
//!
//! * [`geometry`]: boundary distances, tangent and chord half-spaces.
//! * [`kernels`]: closed-form kernels, the boundary approximants and bounds,
//!   and a regime dispatcher.
//! * [`oracles`]: independent reference values (eigenfunction series,
//!   killed Brownian motion, quadrature).
//! * [`experiments`]: rate sweeps, bound suites, regime calibration, reports.
//!
//! The free kernel is `k(t,x,y) = (4πt)^{-n/2} exp(-|x-y|²/4t)`, i.e. the
//! generator is the full Laplacian.

// NaN has to fail the `!(a <= b)` checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod experiments;
pub mod geometry;
pub mod kernels;
pub mod oracles;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
pub use geometry::{HalfSpace, Point};
pub use kernels::{KernelEstimate, Regime, RegimeConfig};
pub use oracles::{OracleResult, SeriesConfig, McConfig};
