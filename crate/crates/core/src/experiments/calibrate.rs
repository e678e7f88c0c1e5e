//! Regime thresholds from measured approximation errors.
//!
//! The half-space product threshold `M` is the smallest grid ratio
//! `δ(mid)/√t` from which on every measured error is within the target. The
//! product-of-distances thresholds are the largest time `m1` (and then the
//! largest ratio `m2`) such that every grid point with `t <= m1` and
//! `δ(mid)/√t <= m2` is within the target. Grid points the series cannot
//! resolve are left out and counted.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exec::map_slice;
use crate::geometry::midpoint_delta;
use crate::kernels::{thm1_approx, thm2_approx, RegimeConfig, Thm2Variant};
use crate::oracles::{series_kernel, SeriesConfig};

use super::sampling::{angle_for_midpoint_depth, angle_for_separation, log_grid, pair};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationGrid {
    /// `δ(mid)/√t` values probed for the half-space products.
    pub thm1_ratios: Vec<f64>,
    /// `(δ(x) = δ(y), |x-y|)` configurations for the half-space products.
    pub thm1_pairs: Vec<(f64, f64)>,
    pub thm2_times: Vec<f64>,
    pub thm2_ratios: Vec<f64>,
    /// `δ(x) = δ(y) = w · δ(mid)` for each `w`.
    pub thm2_depth_fractions: Vec<f64>,
    pub series: SeriesConfig,
    /// Source of the thresholds that are not calibrated.
    pub base: RegimeConfig,
}

impl Default for CalibrationGrid {
    fn default() -> Self {
        Self {
            thm1_ratios: log_grid(0.5, 10.0, 12),
            thm1_pairs: vec![(0.2, 0.0), (0.1, 0.0), (0.1, 0.05)],
            thm2_times: log_grid(1e-4, 0.05, 8),
            thm2_ratios: log_grid(0.02, 1.0, 8),
            thm2_depth_fractions: vec![1.0, 0.5],
            series: SeriesConfig::new(2).expect("dimension 2").with_caps(2000, 4000),
            base: RegimeConfig::default(),
        }
    }
}

impl CalibrationGrid {
    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("grid serialises");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }

    fn validate(&self) -> Result<()> {
        let sorted = |v: &[f64]| !v.is_empty() && v.windows(2).all(|w| w[0] < w[1]) && v[0] > 0.0;
        if !(sorted(&self.thm1_ratios) && sorted(&self.thm2_times) && sorted(&self.thm2_ratios)) {
            return Err(Error::usage("calibration grids must be non-empty, positive and increasing"));
        }
        if self.thm1_pairs.is_empty() || self.thm2_depth_fractions.is_empty() {
            return Err(Error::usage("calibration needs at least one configuration per approximant"));
        }
        self.series.validate()?;
        self.base.validate()
    }
}

/// One measured grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationPoint {
    pub approximant: &'static str,
    pub t: f64,
    pub ratio: f64,
    pub delta: f64,
    pub separation: f64,
    /// `None` when the series could not resolve the point.
    pub rel_err: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub target_rel_err: f64,
    pub config: RegimeConfig,
    pub grid_hash: String,
    pub grid: CalibrationGrid,
    pub points: Vec<CalibrationPoint>,
}

fn measure_thm1(grid: &CalibrationGrid) -> Vec<CalibrationPoint> {
    let n = grid.series.dim;
    let mut jobs = Vec::new();
    for &r in &grid.thm1_ratios {
        for &(d, sep) in &grid.thm1_pairs {
            jobs.push((r, d, sep));
        }
    }
    map_slice(&jobs, |&(ratio, d, sep)| {
        let mut p = CalibrationPoint {
            approximant: "thm1",
            t: f64::NAN,
            ratio,
            delta: d,
            separation: sep,
            rel_err: None,
        };
        let Some(th) = angle_for_separation(d, d, sep) else { return p };
        let Ok((x, y)) = pair(n, d, d, th, 0.0) else { return p };
        let Ok(dmid) = midpoint_delta(&x, &y) else { return p };
        let t = (dmid / ratio).powi(2);
        p.t = t;
        p.rel_err = relative_error(t, &x, &y, &grid.series, |t, x, y| thm1_approx(t, x, y).map(|e| e.value));
        p
    })
}

fn measure_thm2(grid: &CalibrationGrid) -> Vec<CalibrationPoint> {
    let n = grid.series.dim;
    let mut jobs = Vec::new();
    for &t in &grid.thm2_times {
        for &s in &grid.thm2_ratios {
            for &w in &grid.thm2_depth_fractions {
                jobs.push((t, s, w));
            }
        }
    }
    map_slice(&jobs, |&(t, ratio, w)| {
        let dmid = ratio * t.sqrt();
        let d = w * dmid;
        let mut p = CalibrationPoint {
            approximant: "thm2",
            t,
            ratio,
            delta: d,
            separation: f64::NAN,
            rel_err: None,
        };
        if dmid >= 1.0 {
            return p;
        }
        let Some(th) = angle_for_midpoint_depth(d, d, dmid) else { return p };
        let Ok((x, y)) = pair(n, d, d, th, 0.0) else { return p };
        p.separation = x.dist(&y);
        p.rel_err = relative_error(t, &x, &y, &grid.series, |t, x, y| {
            thm2_approx(t, x, y, Thm2Variant::Exponential).map(|e| e.value)
        });
        p
    })
}

fn relative_error(
    t: f64,
    x: &crate::Point,
    y: &crate::Point,
    cfg: &SeriesConfig,
    approx: impl Fn(f64, &crate::Point, &crate::Point) -> Result<f64>,
) -> Option<f64> {
    let o = series_kernel(t, x, y, cfg).ok()?;
    let a = approx(t, x, y).ok()?;
    Some((a - o.value).abs() / o.value)
}

/// Calibrates `M`, `m1`, `m2` on the default grid.
pub fn calibrate_regimes(target_rel_err: f64) -> Result<Calibration> {
    calibrate_regimes_on(target_rel_err, &CalibrationGrid::default())
}

/// Measured errors of a grid, for reuse across targets.
pub fn measure(grid: &CalibrationGrid) -> Result<Vec<CalibrationPoint>> {
    grid.validate()?;
    let mut pts = measure_thm1(grid);
    pts.extend(measure_thm2(grid));
    Ok(pts)
}

pub fn calibrate_regimes_on(target_rel_err: f64, grid: &CalibrationGrid) -> Result<Calibration> {
    let points = measure(grid)?;
    select(target_rel_err, grid, points)
}

/// Thresholds for `target_rel_err` from already measured points.
pub fn select(target_rel_err: f64, grid: &CalibrationGrid, points: Vec<CalibrationPoint>) -> Result<Calibration> {
    if !(target_rel_err > 0.0 && target_rel_err < 1.0) {
        return Err(Error::usage(format!("target must lie in (0, 1), got {target_rel_err}")));
    }
    let ok = |p: &CalibrationPoint| p.rel_err.is_none_or(|e| e <= target_rel_err);

    // M: smallest ratio from which on every resolved point meets the target
    let mut m_thm1 = None;
    for &r in grid.thm1_ratios.iter().rev() {
        let fine = points.iter().filter(|p| p.approximant == "thm1" && p.ratio == r).all(ok);
        if !fine {
            break;
        }
        m_thm1 = Some(r);
    }
    let resolved_thm1 = points.iter().any(|p| p.approximant == "thm1" && p.rel_err.is_some());
    let m_thm1 = match m_thm1 {
        Some(m) if resolved_thm1 => m,
        _ => {
            return Err(Error::Calibration(format!(
                "half-space products miss the target {target_rel_err:e} at every probed δ(mid)/√t up to {}",
                grid.thm1_ratios[grid.thm1_ratios.len() - 1]
            )))
        }
    };

    // m1, m2: largest time, then largest ratio below M, with every point inside meeting the target
    let thm2: Vec<&CalibrationPoint> = points.iter().filter(|p| p.approximant == "thm2").collect();
    let mut chosen = None;
    for &m1 in grid.thm2_times.iter().rev() {
        let mut m2 = None;
        for &s in grid.thm2_ratios.iter().filter(|&&s| s < m_thm1) {
            let inside: Vec<_> = thm2.iter().filter(|p| p.t <= m1 && p.ratio <= s).collect();
            if inside.iter().all(|p| ok(p)) && inside.iter().any(|p| p.rel_err.is_some()) {
                m2 = Some(s);
            } else {
                break;
            }
        }
        if let Some(m2) = m2 {
            chosen = Some((m1, m2));
            break;
        }
    }
    let Some((m1_time, m2_thm2)) = chosen else {
        return Err(Error::Calibration(format!(
            "the product-of-distances form misses the target {target_rel_err:e} on the whole grid"
        )));
    };
    let config = RegimeConfig::new(m_thm1, m2_thm2, m1_time, grid.base.rho_interior)?;
    Ok(Calibration {
        target_rel_err,
        config,
        grid_hash: grid.hash(),
        grid: grid.clone(),
        points,
    })
}
