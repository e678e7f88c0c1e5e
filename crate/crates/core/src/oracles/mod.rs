//! Reference values for the Dirichlet heat kernel and for the auxiliary
//! integrals, computed independently of the closed-form approximants.

pub mod chapman;
pub mod hitting;
pub mod integrals;
pub mod monte_carlo;
pub mod series;

use serde::{Deserialize, Serialize};

pub use chapman::{ck_tail_check, CkVariant};
pub use hitting::{hitting_density_oracle, HittingOracle};
pub use integrals::{estints_shape, inverse_gamma_conv_integral};
pub use monte_carlo::{mc_kernel, McConfig};
pub use series::{series_kernel, SeriesConfig};

/// Work done by an oracle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Work {
    /// Series terms evaluated.
    pub terms: u64,
    /// Sample paths simulated.
    pub paths: u64,
}

/// Oracle value with an absolute error bar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: f64,
    /// Truncation bound (series) or standard error (Monte Carlo).
    pub err: f64,
    pub work: Work,
}

impl OracleResult {
    /// `err / |value|`, infinite for a zero value.
    pub fn rel_err(&self) -> f64 {
        if self.value == 0.0 {
            f64::INFINITY
        } else {
            self.err / self.value.abs()
        }
    }
}
