//! Exit-place density as the inward normal derivative of `k_B` at the sphere,
//! `q(t,x,z) = lim_{h↓0} k_B(t, x, (1-h)z) / h`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

use super::series::{series_kernel, SeriesConfig};

/// Difference-quotient estimate with its error budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HittingOracle {
    pub value: f64,
    /// Difference between the two Richardson levels.
    pub extrapolation_err: f64,
    /// Series truncation bounds carried through the quotients.
    pub series_err: f64,
}

impl HittingOracle {
    pub fn err(&self) -> f64 {
        self.extrapolation_err + self.series_err
    }
}

/// Richardson-extrapolated one-sided difference over `h, h/2, h/4`.
pub fn hitting_density_oracle(
    t: f64,
    x: &Point,
    z: &Point,
    h: f64,
    cfg: &SeriesConfig,
) -> Result<HittingOracle> {
    if !(h > 0.0 && h <= 0.01) {
        return Err(Error::domain(format!("step must lie in (0, 0.01], got {h}")));
    }
    let r = z.norm();
    if (r - 1.0).abs() > 1e-10 {
        return Err(Error::domain(format!("boundary point required, got |z| = {r}")));
    }
    let zu = z.unit()?;
    let mut f = [0.0; 3];
    let mut e = [0.0; 3];
    for (i, hh) in [h, 0.5 * h, 0.25 * h].into_iter().enumerate() {
        let inner = zu.scaled(1.0 - hh);
        let o = series_kernel(t, x, &inner, cfg)?;
        f[i] = o.value / hh;
        e[i] = o.err / hh;
    }
    // f(h) = q + c h + O(h²)
    let r1 = 2.0 * f[1] - f[0];
    let r2 = 2.0 * f[2] - f[1];
    Ok(HittingOracle {
        value: r2,
        extrapolation_err: (r2 - r1).abs(),
        series_err: 2.0 * e[2] + e[1],
    })
}
