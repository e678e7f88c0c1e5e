//! Closed-form kernels, boundary approximants and bounds for the Dirichlet
//! heat kernel `k_B` of the unit ball, plus a regime dispatcher.
//!
//! All densities are with respect to Lebesgue measure and use the
//! normalisation `k(t,x,y) = (4πt)^{-n/2} exp(-|x-y|²/4t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, delta_ball, tangent_halfspace, HalfSpace, Point};
use crate::oracles::series::{series_kernel, SeriesConfig};

/// `1 - e^{-w}` without cancellation for small `w`.
#[inline]
pub fn one_minus_exp(w: f64) -> f64 {
    -(-w).exp_m1()
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("time must be positive and finite, got {t}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Interior,
    Thm1Boundary,
    Thm2Boundary,
    OracleFallback,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Interior => "interior",
            Regime::Thm1Boundary => "thm1-boundary",
            Regime::Thm2Boundary => "thm2-boundary",
            Regime::OracleFallback => "oracle-fallback",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Approximate kernel value with the rate expression that bounds its relative
/// error (up to an unknown constant).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelEstimate {
    pub value: f64,
    pub regime: Regime,
    pub error_indicator: f64,
}

/// Thresholds separating the regimes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeConfig {
    /// Boundary approximation with half-space products when `δ(mid)/√t` exceeds this.
    pub m_thm1: f64,
    /// Product-of-distances approximation when `δ(mid)/√t` is below this ...
    pub m2_thm2: f64,
    /// ... and `t` below this.
    pub m1_time: f64,
    /// Free kernel when `ρ²/t` exceeds this (`ρ` = segment-to-sphere distance).
    pub rho_interior: f64,
}

impl Default for RegimeConfig {
    fn default() -> Self {
        Self {
            m_thm1: 5.0,
            m2_thm2: 0.2,
            m1_time: 0.05,
            rho_interior: 10.0,
        }
    }
}

impl RegimeConfig {
    pub fn new(m_thm1: f64, m2_thm2: f64, m1_time: f64, rho_interior: f64) -> Result<Self> {
        let cfg = Self { m_thm1, m2_thm2, m1_time, rho_interior };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.m_thm1, self.m2_thm2, self.m1_time, self.rho_interior];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::usage(format!("regime thresholds must be positive: {self:?}")));
        }
        if self.m_thm1 <= self.m2_thm2 {
            return Err(Error::usage(format!(
                "m_thm1 ({}) must exceed m2_thm2 ({})",
                self.m_thm1, self.m2_thm2
            )));
        }
        Ok(())
    }
}

/// Free heat kernel.
pub fn gauss_kernel(t: f64, x: &Point, y: &Point) -> Result<f64> {
    check_time(t)?;
    x.check_same_dim(y)?;
    Ok(gauss_raw(t, x.dim(), x.dist_sq(y)))
}

/// `(4πt)^{-n/2} e^{-r²/4t}`.
#[inline]
pub(crate) fn gauss_raw(t: f64, n: usize, r2: f64) -> f64 {
    let four_t = 4.0 * t;
    (std::f64::consts::PI * four_t).powf(-0.5 * n as f64) * (-r2 / four_t).exp()
}

/// Dirichlet heat kernel of a half-space (method of images).
pub fn halfspace_kernel(t: f64, x: &Point, y: &Point, h: &HalfSpace) -> Result<f64> {
    check_time(t)?;
    x.check_same_dim(y)?;
    if h.dim() != x.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: h.dim() });
    }
    let (dx, dy) = (h.delta(x)?, h.delta(y)?);
    Ok(one_minus_exp(dx * dy / t) * gauss_raw(t, x.dim(), x.dist_sq(y)))
}

/// `√(√t / δ(mid))`.
pub fn thm1_rate(t: f64, delta_mid: f64) -> f64 {
    (t.sqrt() / delta_mid).sqrt()
}

/// `√t + √(δ(mid)/√t)`.
pub fn thm2_rate(t: f64, delta_mid: f64) -> f64 {
    t.sqrt() + (delta_mid / t.sqrt()).sqrt()
}

/// Product of tangent half-space factors evaluated at the midpoint.
pub fn thm1_approx(t: f64, x: &Point, y: &Point) -> Result<KernelEstimate> {
    check_time(t)?;
    x.check_same_dim(y)?;
    let (hx, hy) = (tangent_halfspace(x)?, tangent_halfspace(y)?);
    let mid = x.midpoint(y);
    let dmid = delta_ball(&mid)?;
    let fx = one_minus_exp(2.0 * hx.delta(x)? * hx.delta(&mid)? / t);
    let fy = one_minus_exp(2.0 * hy.delta(y)? * hy.delta(&mid)? / t);
    Ok(KernelEstimate {
        value: fx * fy * gauss_kernel(t, x, y)?,
        regime: Regime::Thm1Boundary,
        error_indicator: thm1_rate(t, dmid),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Thm2Variant {
    /// `(1 - e^{-δ(x)δ(y)/t}) k`
    #[default]
    Exponential,
    /// `(δ(x)δ(y)/t) k`
    Linear,
}

/// Product-of-distances approximation for points close to the sphere and to
/// each other.
pub fn thm2_approx(t: f64, x: &Point, y: &Point, variant: Thm2Variant) -> Result<KernelEstimate> {
    check_time(t)?;
    x.check_same_dim(y)?;
    let w = delta_ball(x)? * delta_ball(y)? / t;
    let factor = match variant {
        Thm2Variant::Exponential => one_minus_exp(w),
        Thm2Variant::Linear => w,
    };
    let dmid = delta_ball(&x.midpoint(y))?;
    Ok(KernelEstimate {
        value: factor * gauss_kernel(t, x, y)?,
        regime: Regime::Thm2Boundary,
        error_indicator: thm2_rate(t, dmid),
    })
}

/// Relative deficit `e^{-ρ²/t} Σ_{k=1..n} 2^k/(k-1)! (ρ²/t)^{k-1}` of the
/// lower bound below the free kernel, `ρ = min(δ(x), δ(y))`.
pub fn vdb_correction(t: f64, x: &Point, y: &Point) -> Result<f64> {
    check_time(t)?;
    let rho = geometry::segment_boundary_distance(x, y)?;
    let s = rho * rho / t;
    let mut term = 2.0; // k = 1
    let mut sum = term;
    for k in 2..=x.dim() {
        term *= 2.0 * s / (k - 1) as f64;
        sum += term;
    }
    Ok((-s).exp() * sum)
}

/// Lower bound `k (1 - correction)`, clamped at zero.
pub fn vdb_lower_bound(t: f64, x: &Point, y: &Point) -> Result<f64> {
    let c = vdb_correction(t, x, y)?;
    Ok(gauss_kernel(t, x, y)? * (1.0 - c).max(0.0))
}

/// `h(t,x,y) = (1 ∧ δxδy/t) + (1 ∧ δx|x-y|²/t)(1 ∧ δy|x-y|²/t)`.
pub fn ms_estimate_h(t: f64, x: &Point, y: &Point) -> Result<f64> {
    check_time(t)?;
    x.check_same_dim(y)?;
    let (dx, dy) = (delta_ball(x)?, delta_ball(y)?);
    let r2 = x.dist_sq(y);
    Ok((dx * dy / t).min(1.0) + (dx * r2 / t).min(1.0) * (dy * r2 / t).min(1.0))
}

/// Product of the two half-space factors in their `1 ∧ ·` form; dominates the
/// half-space product approximant.
pub fn halfspace_product_bound(t: f64, x: &Point, y: &Point) -> Result<f64> {
    check_time(t)?;
    let (hx, hy) = (tangent_halfspace(x)?, tangent_halfspace(y)?);
    let mid = x.midpoint(y);
    let fx = (2.0 * hx.delta(x)? * hx.delta(&mid)? / t).min(1.0);
    let fy = (2.0 * hy.delta(y)? * hy.delta(&mid)? / t).min(1.0);
    Ok(fx * fy * gauss_kernel(t, x, y)?)
}

fn check_boundary_point(z: &Point) -> Result<()> {
    let r = z.norm();
    if (r - 1.0).abs() > 1e-10 {
        return Err(Error::domain(format!("boundary point required, got |z| = {r}")));
    }
    Ok(())
}

/// Density of the first exit (time, place) of Brownian motion from the ball,
/// started at `x`, at time `t` and boundary point `z`.
///
/// Far from the boundary relative to `√t` (`δ(mid)/√t >= M`) the half-space
/// form is used; close to it (`δ(mid)/√t <= m2`) the `δ(x)/t · k` form. In
/// between, whichever has the smaller rate expression is returned.
pub fn hitting_density_approx(
    t: f64,
    x: &Point,
    z: &Point,
    cfg: &RegimeConfig,
) -> Result<KernelEstimate> {
    check_time(t)?;
    x.check_same_dim(z)?;
    check_boundary_point(z)?;
    let dx = delta_ball(x)?;
    let mid = x.midpoint(z);
    let dmid = delta_ball(&mid)?;
    let ratio = dmid / t.sqrt();
    let k = gauss_kernel(t, x, z)?;
    let (r1, r2) = (thm1_rate(t, dmid), thm2_rate(t, dmid));
    let use_first = if ratio >= cfg.m_thm1 {
        true
    } else if ratio <= cfg.m2_thm2 {
        false
    } else {
        r1 <= r2
    };
    if use_first {
        let hx = tangent_halfspace(x)?;
        let hz = tangent_halfspace(z)?;
        let value =
            one_minus_exp(2.0 * dx * hx.delta(&mid)? / t) * (2.0 * hz.delta(&mid)? / t) * k;
        Ok(KernelEstimate { value, regime: Regime::Thm1Boundary, error_indicator: r1 })
    } else {
        Ok(KernelEstimate {
            value: dx / t * k,
            regime: Regime::Thm2Boundary,
            error_indicator: r2,
        })
    }
}

/// `|(1-e^{-u})/(1-e^{-v}) - 1|` and the scale `|u-v|/v` that bounds it up to
/// a constant depending only on `c1`, for `u/v > c1`.
pub fn one_minus_exp_ratio_bound(u: f64, v: f64, c1: f64) -> Result<(f64, f64)> {
    if !(u > 0.0 && v > 0.0 && c1 > 0.0) || !(u.is_finite() && v.is_finite()) {
        return Err(Error::domain(format!("need u, v, c1 > 0 (u={u}, v={v}, c1={c1})")));
    }
    if u / v <= c1 {
        return Err(Error::domain(format!("need u/v > c1 (u/v={}, c1={c1})", u / v)));
    }
    // (e^{-v} - e^{-u}) / (1 - e^{-v}) = e^{-v} (1 - e^{-(u-v)}) / (1 - e^{-v})
    let lhs = ((-v).exp() * (-(u - v)).exp_m1() / (-v).exp_m1()).abs();
    Ok((lhs, (u - v).abs() / v))
}

/// Regime label for `(t, x, y)`.
///
/// Checked in order: half-space products (both points nonzero and
/// `δ(mid)/√t > M`), free kernel (`ρ²/t` above its threshold), product of
/// distances (`t < m1` and `δ(mid)/√t < m2`), otherwise the series oracle.
pub fn regime_select(t: f64, x: &Point, y: &Point, cfg: &RegimeConfig) -> Result<Regime> {
    check_time(t)?;
    x.check_same_dim(y)?;
    let dmid = geometry::midpoint_delta(x, y)?;
    let ratio = dmid / t.sqrt();
    let rho = geometry::segment_boundary_distance(x, y)?;
    if ratio > cfg.m_thm1 && x.norm() > 0.0 && y.norm() > 0.0 {
        return Ok(Regime::Thm1Boundary);
    }
    if rho * rho / t > cfg.rho_interior {
        return Ok(Regime::Interior);
    }
    if t < cfg.m1_time && ratio < cfg.m2_thm2 {
        return Ok(Regime::Thm2Boundary);
    }
    Ok(Regime::OracleFallback)
}

/// Dispatches to the approximant of the selected regime. The fallback
/// evaluates the eigenfunction series (dimensions 2 and 3 only) and reports
/// its relative truncation bound as the indicator.
pub fn kernel_eval(t: f64, x: &Point, y: &Point, cfg: &RegimeConfig) -> Result<KernelEstimate> {
    match regime_select(t, x, y, cfg)? {
        Regime::Thm1Boundary => thm1_approx(t, x, y),
        Regime::Thm2Boundary => thm2_approx(t, x, y, Thm2Variant::Exponential),
        Regime::Interior => Ok(KernelEstimate {
            value: gauss_kernel(t, x, y)?,
            regime: Regime::Interior,
            error_indicator: vdb_correction(t, x, y)?,
        }),
        Regime::OracleFallback => {
            let r = series_kernel(t, x, y, &SeriesConfig::new(x.dim())?)?;
            let value = r.value.max(0.0);
            let error_indicator = if value > 0.0 { r.err / value } else { f64::INFINITY };
            Ok(KernelEstimate { value, regime: Regime::OracleFallback, error_indicator })
        }
    }
}
