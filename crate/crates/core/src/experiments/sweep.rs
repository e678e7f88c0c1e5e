//! Convergence-rate sweeps: walk a one-parameter path into a boundary regime,
//! compare an approximant with an oracle at every point and fit the error
//! against the approximant's rate expression.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::map_slice;
use crate::geometry::{delta_ball, midpoint_delta, Point};
use crate::kernels::{thm1_approx, thm2_approx, KernelEstimate, RegimeConfig, Thm2Variant};
use crate::oracles::{mc_kernel, series_kernel, McConfig, OracleResult, SeriesConfig};

use super::sampling::{angle_for_separation, pair};

/// Fewest grid points a sweep may have.
pub const MIN_POINTS: usize = 8;
/// Smallest span of the swept parameter, in decades.
pub const MIN_DECADES: f64 = 1.5;
/// A point is excluded when the oracle's relative error exceeds this fraction
/// of the rate expression.
pub const ORACLE_MARGIN: f64 = 0.1;

/// One-parameter families of point pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "family")]
pub enum PathFamily {
    /// `x = y = (1-depth) ê₁`; the grid holds `t`.
    Diagonal { depth: f64 },
    /// `δ(x) = δ(y) = depth` with `|x-y| = separation`; the grid holds `t`.
    Chord { depth: f64, separation: f64 },
    /// `δ(x) = δ(y) = depth` at fixed `t`; the grid holds `|x-y|`.
    ChordSeparation { depth: f64, t: f64 },
    /// `x = y`, `δ(x) = scale · t^power`; the grid holds `t`.
    MidpointScaling { scale: f64, power: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Approximant {
    Thm1,
    Thm2Exponential,
    Thm2Linear,
}

impl Approximant {
    pub fn eval(self, t: f64, x: &Point, y: &Point) -> Result<KernelEstimate> {
        match self {
            Approximant::Thm1 => thm1_approx(t, x, y),
            Approximant::Thm2Exponential => thm2_approx(t, x, y, Thm2Variant::Exponential),
            Approximant::Thm2Linear => thm2_approx(t, x, y, Thm2Variant::Linear),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "oracle")]
pub enum OracleChoice {
    Series(SeriesConfig),
    MonteCarlo(McConfig),
}

impl OracleChoice {
    pub fn eval(&self, t: f64, x: &Point, y: &Point) -> Result<OracleResult> {
        match self {
            OracleChoice::Series(c) => series_kernel(t, x, y, c),
            OracleChoice::MonteCarlo(c) => mc_kernel(t, x, y, c),
        }
    }
}

/// Declared regime of a sweep, as bounds on `δ(mid)/√t` and `t`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeBounds {
    pub min_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    pub max_t: Option<f64>,
}

impl RegimeBounds {
    /// The half-space product regime of `cfg`.
    pub fn thm1(cfg: &RegimeConfig) -> Self {
        Self { min_ratio: Some(cfg.m_thm1), ..Self::default() }
    }

    /// The product-of-distances regime of `cfg`.
    pub fn thm2(cfg: &RegimeConfig) -> Self {
        Self { min_ratio: None, max_ratio: Some(cfg.m2_thm2), max_t: Some(cfg.m1_time) }
    }

    pub fn contains(&self, t: f64, ratio: f64) -> bool {
        self.min_ratio.is_none_or(|m| ratio >= m)
            && self.max_ratio.is_none_or(|m| ratio <= m)
            && self.max_t.is_none_or(|m| t < m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub family: PathFamily,
    pub dim: usize,
    /// Values of the swept parameter, strictly increasing.
    pub grid: Vec<f64>,
    pub approximant: Approximant,
    pub oracle: OracleChoice,
    pub regime: RegimeBounds,
}

/// Series settings for sweeps reaching `t ~ 1e-5`.
pub fn sweep_series(dim: usize) -> Result<SeriesConfig> {
    Ok(SeriesConfig::new(dim)?.with_caps(2000, 4000))
}

impl SweepSpec {
    /// `x = y = (0.8, 0)`, twelve times in `[1e-5, 1e-2]`.
    pub fn thm1_diagonal() -> Result<Self> {
        Ok(Self {
            family: PathFamily::Diagonal { depth: 0.2 },
            dim: 2,
            grid: super::sampling::log_grid(1e-5, 1e-2, 12),
            approximant: Approximant::Thm1,
            oracle: OracleChoice::Series(sweep_series(2)?),
            regime: RegimeBounds { min_ratio: Some(1.9), ..Default::default() },
        })
    }

    /// `δ(x) = δ(y) = 0.1`, `|x-y| = 0.1`, twelve times in `[1.5e-4, 6e-3]`.
    ///
    /// Smaller times put `|x-y|²/4t` beyond what the series resolves.
    pub fn thm1_chord() -> Result<Self> {
        Ok(Self {
            family: PathFamily::Chord { depth: 0.1, separation: 0.1 },
            dim: 2,
            grid: super::sampling::log_grid(1.5e-4, 6e-3, 12),
            approximant: Approximant::Thm1,
            oracle: OracleChoice::Series(sweep_series(2)?),
            regime: RegimeBounds { min_ratio: Some(1.25), ..Default::default() },
        })
    }

    /// `x = y`, `δ = t^0.6`, twelve times in `[1e-5, 1e-3]`.
    pub fn thm2_scaling(variant: Thm2Variant) -> Result<Self> {
        Ok(Self {
            family: PathFamily::MidpointScaling { scale: 1.0, power: 0.6 },
            dim: 2,
            grid: super::sampling::log_grid(1e-5, 1e-3, 12),
            approximant: match variant {
                Thm2Variant::Exponential => Approximant::Thm2Exponential,
                Thm2Variant::Linear => Approximant::Thm2Linear,
            },
            oracle: OracleChoice::Series(sweep_series(2)?),
            regime: RegimeBounds { min_ratio: None, max_ratio: Some(0.6), max_t: Some(0.05) },
        })
    }

    /// The same sweep with its grid multiplied by `10^decades`.
    pub fn shifted(&self, decades: f64) -> Self {
        let f = 10f64.powf(decades);
        Self { grid: self.grid.iter().map(|g| g * f).collect(), ..self.clone() }
    }

    /// `(t, x, y)` of grid point `i`.
    pub fn point(&self, i: usize) -> Result<(f64, Point, Point)> {
        let g = self.grid[i];
        let n = self.dim;
        let on_axis = |d: f64| -> Result<(Point, Point)> {
            let x = Point::in_ball({
                let mut c = vec![0.0; n];
                c[0] = 1.0 - d;
                c
            })?;
            Ok((x.clone(), x))
        };
        let chord = |d: f64, sep: f64| -> Result<(Point, Point)> {
            let th = angle_for_separation(d, d, sep)
                .ok_or_else(|| Error::usage(format!("separation {sep} impossible at depth {d}")))?;
            pair(n, d, d, th, 0.0)
        };
        let (t, (x, y)) = match self.family {
            PathFamily::Diagonal { depth } => (g, on_axis(depth)?),
            PathFamily::Chord { depth, separation } => (g, chord(depth, separation)?),
            PathFamily::ChordSeparation { depth, t } => (t, chord(depth, g)?),
            PathFamily::MidpointScaling { scale, power } => (g, on_axis(scale * g.powf(power))?),
        };
        Ok((t, x, y))
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.dim, 2 | 3) {
            return Err(Error::usage(format!("sweeps run in dimension 2 or 3, got {}", self.dim)));
        }
        if self.grid.len() < MIN_POINTS {
            return Err(Error::usage(format!(
                "a sweep needs at least {MIN_POINTS} grid points, got {}",
                self.grid.len()
            )));
        }
        if self.grid.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::usage("grid values must be positive and finite"));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::usage("grid must be strictly increasing"));
        }
        let span = (self.grid[self.grid.len() - 1] / self.grid[0]).log10();
        if span < MIN_DECADES {
            return Err(Error::usage(format!(
                "grid spans {span:.2} decades, need at least {MIN_DECADES}"
            )));
        }
        match self.oracle {
            OracleChoice::Series(c) => {
                c.validate()?;
                if c.dim != self.dim {
                    return Err(Error::DimensionMismatch { expected: self.dim, got: c.dim });
                }
            }
            OracleChoice::MonteCarlo(c) => {
                if c.n_paths == 0 {
                    return Err(Error::usage("n_paths must be at least 1"));
                }
            }
        }
        for i in 0..self.grid.len() {
            let (t, x, y) = self.point(i)?;
            let ratio = midpoint_delta(&x, &y)? / t.sqrt();
            if !self.regime.contains(t, ratio) {
                return Err(Error::usage(format!(
                    "grid point {i} (t={t:e}, δ(mid)/√t={ratio:.4}) lies outside the declared regime {:?}",
                    self.regime
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub index: usize,
    /// Grid value.
    pub param: f64,
    pub t: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub delta_x: f64,
    pub delta_y: f64,
    pub delta_mid: f64,
    /// Rate expression of the approximant.
    pub u: f64,
    pub approx: f64,
    pub oracle: f64,
    pub oracle_err: f64,
    /// `|approx - oracle| / oracle`.
    pub rel_err: f64,
    /// Excluded from the fit (oracle failed or not accurate enough).
    pub flagged: bool,
    pub note: String,
}

impl SweepRecord {
    pub fn oracle_rel_err(&self) -> f64 {
        if self.oracle > 0.0 {
            self.oracle_err / self.oracle
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub spec: SweepSpec,
    pub records: Vec<SweepRecord>,
    /// Exponent of `u` the rate expression predicts (the rate expression itself).
    pub predicted_exponent: f64,
    /// Least-squares `d ln e / d ln u` over unflagged points whose error is
    /// resolved by the oracle, two extreme points trimmed; `None` with fewer
    /// than three such points.
    pub slope: Option<f64>,
    /// `max e / u^p` over unflagged points.
    pub envelope_c: f64,
    /// Same with the oracle error added to `e`.
    pub envelope_c_upper: f64,
    /// Adjacent pairs (ordered by `u`) where the error drops by more than
    /// the combined oracle tolerance as `u` grows.
    pub monotone_violations: usize,
    pub n_flagged: usize,
}

impl RateFit {
    pub fn unflagged(&self) -> impl Iterator<Item = &SweepRecord> {
        self.records.iter().filter(|r| !r.flagged)
    }
}

fn evaluate(spec: &SweepSpec, i: usize) -> Result<SweepRecord> {
    let (t, x, y) = spec.point(i)?;
    let est = spec.approximant.eval(t, &x, &y)?;
    let mut rec = SweepRecord {
        index: i,
        param: spec.grid[i],
        t,
        delta_x: delta_ball(&x)?,
        delta_y: delta_ball(&y)?,
        delta_mid: midpoint_delta(&x, &y)?,
        x: x.coords().to_vec(),
        y: y.coords().to_vec(),
        u: est.error_indicator,
        approx: est.value,
        oracle: f64::NAN,
        oracle_err: f64::NAN,
        rel_err: f64::NAN,
        flagged: false,
        note: String::new(),
    };
    match spec.oracle.eval(t, &x, &y) {
        Ok(o) => {
            rec.oracle = o.value;
            rec.oracle_err = o.err;
            rec.rel_err = (est.value - o.value).abs() / o.value;
            let eps = rec.oracle_rel_err();
            if !(eps <= ORACLE_MARGIN * rec.u) {
                rec.flagged = true;
                rec.note = format!("oracle relative error {eps:.3e} above {ORACLE_MARGIN}·u");
            }
        }
        Err(e @ (Error::Accuracy(_) | Error::Numeric(_))) => {
            rec.flagged = true;
            rec.note = e.to_string();
        }
        Err(e) => return Err(e),
    }
    Ok(rec)
}

fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + (p.0 - mx) * (p.1 - my), a.1 + (p.0 - mx).powi(2)));
    sxy / sxx
}

/// Fits records already evaluated for `spec`.
pub fn fit_records(spec: SweepSpec, records: Vec<SweepRecord>) -> Result<RateFit> {
    let p = 1.0;
    let mut good: Vec<&SweepRecord> = records.iter().filter(|r| !r.flagged).collect();
    if good.len() < 2 {
        return Err(Error::Accuracy(format!(
            "only {} of {} sweep points resolved by the oracle",
            good.len(),
            records.len()
        )));
    }
    good.sort_by(|a, b| a.u.total_cmp(&b.u));
    let envelope_c = good.iter().map(|r| r.rel_err / r.u.powf(p)).fold(0.0, f64::max);
    let envelope_c_upper = good
        .iter()
        .map(|r| (r.rel_err + r.oracle_rel_err()) / r.u.powf(p))
        .fold(0.0, f64::max);
    let monotone_violations = good
        .windows(2)
        .filter(|w| {
            let tol = (w[0].oracle_rel_err() + w[1].oracle_rel_err()) * (1.0 + w[0].rel_err);
            w[1].rel_err < w[0].rel_err - tol
        })
        .count();
    let resolved: Vec<(f64, f64)> = good
        .iter()
        .filter(|r| r.rel_err > 2.0 * r.oracle_rel_err())
        .map(|r| (r.u.ln(), r.rel_err.ln()))
        .collect();
    let slope = (resolved.len() >= 5).then(|| ls_slope(&resolved[1..resolved.len() - 1]));
    let n_flagged = records.len() - good.len();
    Ok(RateFit {
        spec,
        records,
        predicted_exponent: p,
        slope,
        envelope_c,
        envelope_c_upper,
        monotone_violations,
        n_flagged,
    })
}

/// Runs the sweep; grid points are evaluated independently (in parallel with
/// the `parallel` feature) and collected in grid order.
pub fn run_rate_sweep(spec: &SweepSpec) -> Result<RateFit> {
    spec.validate()?;
    let idx: Vec<usize> = (0..spec.grid.len()).collect();
    let records = map_slice(&idx, |&i| evaluate(spec, i)).into_iter().collect::<Result<Vec<_>>>()?;
    fit_records(spec.clone(), records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_specs() {
        let mut s = SweepSpec::thm1_diagonal().unwrap();
        s.grid = vec![1e-3];
        assert!(matches!(run_rate_sweep(&s), Err(Error::Usage(_))));
        let mut s = SweepSpec::thm1_diagonal().unwrap();
        s.grid.swap(2, 3);
        assert!(s.validate().is_err());
        let s = SweepSpec::thm1_diagonal().unwrap().shifted(1.0);
        assert!(s.validate().is_err(), "t = 0.1 leaves the declared regime");
        let mut s = SweepSpec::thm1_diagonal().unwrap();
        s.grid = crate::experiments::sampling::log_grid(1e-4, 1e-3, 10);
        assert!(s.validate().is_err(), "one decade is too short");
    }

    #[test]
    fn presets_validate() {
        SweepSpec::thm1_diagonal().unwrap().validate().unwrap();
        SweepSpec::thm1_chord().unwrap().validate().unwrap();
        SweepSpec::thm2_scaling(Thm2Variant::Exponential).unwrap().validate().unwrap();
    }

    #[test]
    fn chord_points_have_requested_geometry() {
        let s = SweepSpec::thm1_chord().unwrap();
        let (_, x, y) = s.point(3).unwrap();
        assert!((x.dist(&y) - 0.1).abs() < 1e-12);
        assert!((delta_ball(&x).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn slope_of_exact_power_law() {
        let pts: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, 2.0 * i as f64 + 1.0)).collect();
        assert!((ls_slope(&pts) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn fit_flags_and_envelopes() {
        let spec = SweepSpec::thm1_diagonal().unwrap();
        let records: Vec<SweepRecord> = (0..8)
            .map(|i| {
                let u = 0.1 * (i + 1) as f64;
                SweepRecord {
                    index: i,
                    param: u,
                    t: u,
                    x: vec![],
                    y: vec![],
                    delta_x: 0.1,
                    delta_y: 0.1,
                    delta_mid: 0.1,
                    u,
                    approx: 1.0,
                    oracle: 1.0,
                    oracle_err: 1e-12,
                    rel_err: 0.5 * u * u,
                    flagged: i == 7,
                    note: String::new(),
                }
            })
            .collect();
        let fit = fit_records(spec, records).unwrap();
        assert_eq!(fit.n_flagged, 1);
        assert!((fit.envelope_c - 0.35).abs() < 1e-12);
        assert!((fit.slope.unwrap() - 2.0).abs() < 1e-10);
        assert_eq!(fit.monotone_violations, 0);
    }
}
