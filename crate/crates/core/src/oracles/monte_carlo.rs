//! Killed Brownian motion through the Hunt formula
//!
//! ```text
//! k_B(t,x,y) = k(t,x,y) - E^x[ τ < t ; k(t-τ, W_τ, y) ]
//!            = k(t,x,y) · (1 - P(bridge x → y over [0,t] leaves B))
//! ```
//!
//! The second form conditions the exit term on `W_t = y` (strong Markov
//! property). Sampling the exit term directly is heavy tailed when `y` is
//! near the sphere: paths leaving `B` next to `y` shortly before `t`
//! contribute `k(t-τ, W_τ, y) ~ δ(y)^{-n}`. The bridge form is a bounded
//! Bernoulli estimator with an honest standard error.
//!
//! `W` is generated by the Laplacian (variance `2h` per coordinate over a
//! step `h`). Steps are short (`dt`) near the sphere and grow with the
//! squared distance to it elsewhere. After each step that stays inside, a
//! crossing of the tangent plane between the step ends is sampled with
//! probability `exp(-δ(a) δ_{H_a}(b) / h)`, the exact crossing probability of
//! a plane by a bridge over the step.
//!
//! Paths are split into fixed-size chunks, each with its own ChaCha stream,
//! and chunk sums are combined in chunk order: the result for a given seed is
//! the same whether chunks run in parallel or not.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::{delta_ball, Point};
use crate::kernels::gauss_raw;

use super::{OracleResult, Work};

const CHUNK: usize = 2048;
/// Bridges whose exit would need a deviation with `ρ²/(t-s)` above this are
/// not followed further (probability < e^{-40}).
const NO_EXIT: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub n_paths: usize,
    /// Step size near the boundary; `None` means `t/2048`.
    pub dt: Option<f64>,
    pub seed: u64,
    pub bridge_correction: bool,
}

impl McConfig {
    pub fn new(n_paths: usize, seed: u64) -> Self {
        Self { n_paths, dt: None, seed, bridge_correction: true }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    fn step(&self, t: f64) -> Result<f64> {
        if self.n_paths == 0 {
            return Err(Error::usage("n_paths must be at least 1"));
        }
        let dt = self.dt.unwrap_or(t / 2048.0);
        if !(dt > 0.0 && dt <= t) {
            return Err(Error::usage(format!("dt must lie in (0, t], got {dt}")));
        }
        Ok(dt)
    }
}

struct ChunkStats {
    exits: u64,
}

/// Monte Carlo value of `k_B(t,x,y)`; `err` is the standard error.
pub fn mc_kernel(t: f64, x: &Point, y: &Point, cfg: &McConfig) -> Result<OracleResult> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("time must be positive, got {t}")));
    }
    x.check_same_dim(y)?;
    if delta_ball(x)? <= 0.0 || delta_ball(y)? <= 0.0 {
        return Err(Error::domain("Monte Carlo oracle needs points of the open ball"));
    }
    let dt = cfg.step(t)?;
    let n = x.dim();
    let k = gauss_raw(t, n, x.dist_sq(y));
    let chunks = cfg.n_paths.div_ceil(CHUNK);
    let stats: Vec<ChunkStats> = exec::map_indexed(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(c as u64);
        let count = CHUNK.min(cfg.n_paths - c * CHUNK);
        let mut st = ChunkStats { exits: 0 };
        let mut w = vec![0.0; n];
        let mut nw = vec![0.0; n];
        for _ in 0..count {
            w.copy_from_slice(x.coords());
            if bridge_exits(&mut rng, &mut w, &mut nw, y.coords(), t, dt, cfg.bridge_correction) {
                st.exits += 1;
            }
        }
        st
    });
    let exits: u64 = stats.iter().map(|s| s.exits).sum();
    let m = cfg.n_paths as f64;
    let p = exits as f64 / m;
    // sample variance of the Bernoulli exit indicator
    let var = if cfg.n_paths > 1 { p * (1.0 - p) * m / (m - 1.0) } else { 0.0 };
    Ok(OracleResult {
        value: k * (1.0 - p),
        err: k * (var / m).sqrt(),
        work: Work { terms: 0, paths: cfg.n_paths as u64 },
    })
}

/// Repeats the estimate with `dt` halved until two successive values differ by
/// less than one combined standard error, or `max_halvings` is reached.
pub fn mc_kernel_refined(
    t: f64,
    x: &Point,
    y: &Point,
    cfg: &McConfig,
    max_halvings: usize,
) -> Result<OracleResult> {
    let mut dt = cfg.step(t)?;
    let mut prev = mc_kernel(t, x, y, cfg)?;
    let mut paths = prev.work.paths;
    for _ in 0..max_halvings {
        dt *= 0.5;
        let next = mc_kernel(t, x, y, &cfg.with_dt(dt))?;
        paths += next.work.paths;
        let moved = (next.value - prev.value).abs();
        let sigma = (next.err * next.err + prev.err * prev.err).sqrt();
        prev = next;
        if moved < sigma {
            break;
        }
    }
    prev.work.paths = paths;
    Ok(prev)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Runs one bridge from `w` (time 0) to `y` (time `t`); true if it leaves
/// the ball.
fn bridge_exits(
    rng: &mut ChaCha8Rng,
    w: &mut [f64],
    nw: &mut [f64],
    y: &[f64],
    t: f64,
    dt: f64,
    bridge: bool,
) -> bool {
    let n = w.len();
    let dy = 1.0 - norm(y);
    let mut s = 0.0;
    while s < t {
        let remaining = t - s;
        let r = norm(w);
        let d = 1.0 - r;
        // the segment to y stays ρ = min(δ(w), δ(y)) inside; a bridge over
        // `remaining` strays that far with probability below e^{-ρ²/remaining}
        let rho = d.min(dy);
        if rho * rho / remaining > NO_EXIT {
            return false;
        }
        let h = remaining.min(dt.max(d * d / (4.0 * n as f64 * NO_EXIT)));
        let last = h >= remaining;
        if last {
            nw.copy_from_slice(y);
        } else {
            let f = h / remaining;
            let sd = (2.0 * h * (1.0 - f)).sqrt();
            for i in 0..n {
                let z: f64 = rng.sample(StandardNormal);
                nw[i] = w[i] + f * (y[i] - w[i]) + sd * z;
            }
            if norm(nw) >= 1.0 {
                return true;
            }
        }
        if bridge && r > 0.0 {
            // tangent plane at w/|w|: δ(w) = d, δ_H(new) = 1 - new·ŵ
            let proj: f64 = w.iter().zip(nw.iter()).map(|(a, b)| a * b).sum::<f64>() / r;
            let db = (1.0 - proj).max(0.0);
            if rng.random::<f64>() < (-d * db / h).exp() {
                return true;
            }
        }
        if last {
            return false;
        }
        w.copy_from_slice(nw);
        s += h;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::gauss_kernel;

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn deterministic_for_seed() {
        let x = p(&[0.9, 0.0]);
        let y = p(&[0.9, 0.05]);
        let cfg = McConfig::new(5000, 42);
        let a = mc_kernel(0.005, &x, &y, &cfg).unwrap();
        let b = mc_kernel(0.005, &x, &y, &cfg).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.err.to_bits(), b.err.to_bits());
        let c = mc_kernel(0.005, &x, &y, &McConfig::new(5000, 43)).unwrap();
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn centre_small_time_is_free_kernel() {
        let o = p(&[0.0, 0.0]);
        let r = mc_kernel(1e-4, &o, &o, &McConfig::new(2000, 1)).unwrap();
        let k = gauss_kernel(1e-4, &o, &o).unwrap();
        assert!((r.value - k).abs() <= 3.0 * r.err + 1e-12 * k);
    }

    #[test]
    fn rejects_bad_config() {
        let o = p(&[0.0, 0.0]);
        assert!(mc_kernel(0.1, &o, &o, &McConfig::new(0, 1)).is_err());
        assert!(mc_kernel(0.1, &o, &o, &McConfig::new(10, 1).with_dt(0.2)).is_err());
        assert!(mc_kernel(0.1, &p(&[1.0, 0.0]), &o, &McConfig::new(10, 1)).is_err());
    }
}
