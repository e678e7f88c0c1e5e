//! Low-discrepancy case generation.
//!
//! Cases come from a Halton sequence with a Cranley–Patterson shift drawn from
//! the seed. The `i`-th case depends only on `(seed, i)`, so growing the case
//! count extends a run without changing its prefix; fitted suprema are then
//! non-decreasing in the number of cases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Point;

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Shifted Halton sequence in `[0, 1)^dim`.
#[derive(Debug, Clone)]
pub struct Halton {
    shift: Vec<f64>,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 || dim > PRIMES.len() {
            return Err(Error::usage(format!("Halton dimension must lie in 1..={}", PRIMES.len())));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self { shift: (0..dim).map(|_| rng.random::<f64>()).collect() })
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    /// Point `i` (index 0 is skipped internally: it is the origin).
    pub fn point(&self, i: usize) -> Vec<f64> {
        let idx = i as u64 + 1;
        self.shift
            .iter()
            .zip(PRIMES)
            .map(|(s, b)| {
                let v = radical_inverse(idx, b) + s;
                v - v.floor()
            })
            .collect()
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// `lo (hi/lo)^u`.
pub fn log_uniform(u: f64, lo: f64, hi: f64) -> f64 {
    lo * (hi / lo).powf(u)
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect(),
    }
}

/// Points at depths `δx, δy` whose directions make the angle `theta`; the
/// pair spans the first two coordinates, tilted out of that plane by `tilt`
/// when `dim >= 3` (all quantities are rotation invariant, the tilt only
/// exercises the general-dimension code paths).
pub fn pair(dim: usize, dx: f64, dy: f64, theta: f64, tilt: f64) -> Result<(Point, Point)> {
    let mut a = vec![0.0; dim];
    let mut b = vec![0.0; dim];
    let (rx, ry) = (1.0 - dx, 1.0 - dy);
    a[0] = rx;
    b[0] = ry * theta.cos();
    if dim >= 3 {
        b[1] = ry * theta.sin() * tilt.cos();
        b[2] = ry * theta.sin() * tilt.sin();
    } else {
        b[1] = ry * theta.sin();
    }
    Ok((Point::in_ball(a)?, Point::in_ball(b)?))
}

/// Angle between directions at depths `dx, dy` that puts the midpoint at
/// depth `dmid`; `None` when no angle does (needs `dmid >= (dx+dy)/2`).
pub fn angle_for_midpoint_depth(dx: f64, dy: f64, dmid: f64) -> Option<f64> {
    let (r1, r2) = (1.0 - dx, 1.0 - dy);
    let m = 1.0 - dmid;
    let c = (4.0 * m * m - r1 * r1 - r2 * r2) / (2.0 * r1 * r2);
    if (-1.0..=1.0 + 1e-15).contains(&c) {
        Some(c.min(1.0).acos())
    } else {
        None
    }
}

/// Angle that separates points at depths `dx, dy` by `sep`.
pub fn angle_for_separation(dx: f64, dy: f64, sep: f64) -> Option<f64> {
    let (r1, r2) = (1.0 - dx, 1.0 - dy);
    let c = (r1 * r1 + r2 * r2 - sep * sep) / (2.0 * r1 * r2);
    if (-1.0..=1.0 + 1e-15).contains(&c) {
        Some(c.min(1.0).acos())
    } else {
        None
    }
}
