//! Positive zeros `j_{ν,k}` of `J_ν`.
//!
//! Zeros are generated order by order. For the base order `μ ∈ [0, 1)`
//! McMahon's expansion seeds Newton's method; every higher order uses the
//! interlacing `j_{ν,k} < j_{ν+1,k} < j_{ν,k+1}`, which brackets each zero of
//! `J_{ν+1}` between consecutive zeros of `J_ν`. Inside a bracket the values
//! and slopes of `J_{ν+1}` at both ends are already known from the previous
//! order, so a cubic Hermite fit supplies a starting point that safeguarded
//! Newton polishes in two or three steps.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::exec;
use crate::special::bessel::bessel_j_pair;

/// Zeros of one order, with `J_{ν+1}` evaluated at each zero.
#[derive(Debug, Clone)]
pub struct OrderZeros {
    pub nu: f64,
    pub zeros: Vec<f64>,
    /// `J_{ν+1}(j_{ν,k})`; equals `-J_ν'(j_{ν,k})`.
    pub next_at_zero: Vec<f64>,
}

/// All zeros below `jmax` (plus the first one at or above it) for the
/// orders `μ, μ+1, μ+2, ...`.
#[derive(Debug, Clone)]
pub struct ZeroTable {
    mu: f64,
    jmax: f64,
    max_order: usize,
    orders: Vec<OrderZeros>,
}

impl ZeroTable {
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn jmax(&self) -> f64 {
        self.jmax
    }

    /// Orders `μ + i` for `i = 0..len`. The last stored order may have its
    /// first zero beyond `jmax`.
    pub fn orders(&self) -> &[OrderZeros] {
        &self.orders
    }

    /// Total number of stored zeros.
    pub fn len(&self) -> usize {
        self.orders.iter().map(|o| o.zeros.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    fn covers(&self, jmax: f64, max_order: usize) -> bool {
        if jmax > self.jmax {
            return false;
        }
        // stopped early because orders ran out of zeros below jmax
        let exhausted = self
            .orders
            .last()
            .is_some_and(|o| o.zeros.first().is_some_and(|&z| z >= self.jmax));
        max_order <= self.max_order || exhausted
    }

    /// Builds the table. `max_order` bounds the integer offset of the highest
    /// order computed (use `usize::MAX` to continue until orders have no zero
    /// below `jmax`).
    pub fn build(mu: f64, jmax: f64, max_order: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&mu) {
            return Err(Error::domain(format!("base order must lie in [0, 1), got {mu}")));
        }
        if !(jmax > 0.0 && jmax.is_finite()) {
            return Err(Error::domain(format!("jmax must be positive, got {jmax}")));
        }
        let mut orders = vec![base_order(mu, jmax)?];
        let mut i = 0usize;
        loop {
            let cur = &orders[i];
            if i >= max_order || cur.zeros[0] >= jmax {
                break;
            }
            let next = next_order(cur, jmax)?;
            orders.push(next);
            i += 1;
        }
        Ok(Self {
            mu,
            jmax,
            max_order,
            orders,
        })
    }
}

type TableCache = Mutex<HashMap<u64, Arc<ZeroTable>>>;

fn cache() -> &'static TableCache {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared table for base order `mu` covering at least `jmax` and orders up to
/// `μ + max_order`. Tables only ever grow.
pub fn zero_table(mu: f64, jmax: f64, max_order: usize) -> Result<Arc<ZeroTable>> {
    let key = mu.to_bits();
    let mut guard = cache().lock().unwrap_or_else(|e| e.into_inner());
    if let Some(t) = guard.get(&key) {
        if t.covers(jmax, max_order) {
            return Ok(Arc::clone(t));
        }
    }
    let (jmax, max_order) = match guard.get(&key) {
        Some(t) => (
            if jmax > t.jmax { jmax.max(1.25 * t.jmax) } else { t.jmax },
            max_order.max(t.max_order),
        ),
        None => (jmax, max_order),
    };
    let table = Arc::new(ZeroTable::build(mu, jmax, max_order)?);
    guard.insert(key, Arc::clone(&table));
    Ok(table)
}

/// The `k`-th positive zero of `J_ν`, `k >= 1`.
pub fn bessel_zero(nu: f64, k: usize) -> Result<f64> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::domain(format!("order must be >= 0, got {nu}")));
    }
    if k == 0 {
        return Err(Error::domain("zeros are numbered from k = 1"));
    }
    let m = nu.floor() as usize;
    let mu = nu - m as f64;
    // j_{ν,k} < ν + kπ + 2ν^{1/3} + 2 comfortably; grow if not.
    let mut jmax = nu + k as f64 * PI + 2.0 * nu.cbrt() + 2.0;
    for _ in 0..8 {
        let table = zero_table(mu, jmax, m)?;
        if let Some(order) = table.orders().get(m) {
            if let Some(&z) = order.zeros.get(k - 1) {
                if k < order.zeros.len() || z >= table.jmax() {
                    return Ok(z);
                }
            }
        }
        jmax *= 1.5;
    }
    Err(Error::Numeric(format!(
        "could not bracket zero k={k} of J_{nu} below {jmax}"
    )))
}

const MAX_NEWTON: usize = 100;
/// Relative step below which Newton stops once steps no longer halve:
/// the iteration is then moving on rounding noise of `J`.
const STALL: f64 = 1e-13;

fn base_order(mu: f64, jmax: f64) -> Result<OrderZeros> {
    let mut zeros = Vec::new();
    let mut next_at_zero = Vec::new();
    let mut k = 1usize;
    loop {
        let guess = mcmahon(mu, k);
        let lo = zeros.last().copied().unwrap_or(0.0);
        let z = polish_own_order(mu, guess, lo)?;
        if let Some(&prev) = zeros.last() {
            if z <= prev + 1.0 {
                return Err(Error::Numeric(format!(
                    "base order {mu}: zero {k} at {z} does not follow {prev}"
                )));
            }
        }
        let (_, jn1) = bessel_j_pair(mu, z);
        zeros.push(z);
        next_at_zero.push(jn1);
        if z >= jmax {
            break;
        }
        k += 1;
    }
    Ok(OrderZeros {
        nu: mu,
        zeros,
        next_at_zero,
    })
}

fn mcmahon(mu: f64, k: usize) -> f64 {
    let m = 4.0 * mu * mu;
    let beta = (k as f64 + 0.5 * mu - 0.25) * PI;
    let b8 = 8.0 * beta;
    beta - (m - 1.0) / b8 - 4.0 * (m - 1.0) * (7.0 * m - 31.0) / (3.0 * b8.powi(3))
}

/// Newton on `J_μ` itself, for the base order.
fn polish_own_order(mu: f64, mut x: f64, lower: f64) -> Result<f64> {
    let mut prev_dx = f64::INFINITY;
    for _ in 0..MAX_NEWTON {
        let (j, j1) = bessel_j_pair(mu, x);
        let dj = mu / x * j - j1;
        let step = j / dj;
        let dx = step.abs();
        if dx <= 4.0 * f64::EPSILON * x || (dx < STALL * x && dx >= 0.5 * prev_dx) {
            return Ok(x - step);
        }
        prev_dx = dx;
        let nx = x - step;
        x = if nx <= lower { 0.5 * (x + lower) } else { nx };
    }
    Err(Error::Numeric(format!(
        "Newton iteration for a zero of J_{mu} near {x} did not converge"
    )))
}

/// Zeros of `J_{ν+1}` from those of `J_ν`.
fn next_order(cur: &OrderZeros, jmax: f64) -> Result<OrderZeros> {
    let nu = cur.nu;
    let z = &cur.zeros;
    let intervals = z.len().saturating_sub(1);
    let solved: Vec<Result<(f64, f64)>> = exec::map_indexed(intervals, |i| {
        let (a, b) = (z[i], z[i + 1]);
        let (fa, fb) = (cur.next_at_zero[i], cur.next_at_zero[i + 1]);
        // J'_{ν+1} = J_ν - (ν+1)/x J_{ν+1}, and J_ν vanishes at a and b
        let (da, db) = (-(nu + 1.0) / a * fa, -(nu + 1.0) / b * fb);
        let guess = hermite_root(a, b, fa, fb, da, db);
        solve_next_in_bracket(nu, a, b, fa, guess)
    });
    let mut zeros = Vec::with_capacity(intervals + 1);
    let mut next_at_zero = Vec::with_capacity(intervals + 1);
    for r in solved {
        let (w, val) = r?;
        zeros.push(w);
        next_at_zero.push(val);
        if w >= jmax {
            break;
        }
    }
    if zeros.last().is_none_or(|&w| w < jmax) {
        // one more zero beyond the last zero of J_ν: scan for a sign change
        let a = *z.last().expect("orders always hold at least one zero");
        let fa = *cur.next_at_zero.last().expect("paired with zeros");
        let mut lo = a;
        let mut hi = a + 1.0;
        let mut scanned = 0;
        loop {
            let (_, f) = bessel_j_pair(nu, hi);
            if f.signum() != fa.signum() && f != 0.0 {
                break;
            }
            lo = hi;
            hi += 1.0;
            scanned += 1;
            if scanned > 10_000 {
                return Err(Error::Numeric(format!(
                    "no sign change of J_{} found beyond {a}",
                    nu + 1.0
                )));
            }
        }
        let (w, val) = solve_next_in_bracket(nu, lo, hi, fa, 0.5 * (lo + hi))?;
        zeros.push(w);
        next_at_zero.push(val);
    }
    Ok(OrderZeros {
        nu: nu + 1.0,
        zeros,
        next_at_zero,
    })
}

/// Root of the cubic Hermite interpolant on `[a, b]`, found by bisection on
/// the polynomial (no Bessel evaluations).
fn hermite_root(a: f64, b: f64, fa: f64, fb: f64, da: f64, db: f64) -> f64 {
    let h = b - a;
    let p = |s: f64| {
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * fa
            + (s3 - 2.0 * s2 + s) * h * da
            + (-2.0 * s3 + 3.0 * s2) * fb
            + (s3 - s2) * h * db
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let plo = p(lo).signum();
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if p(mid).signum() == plo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    a + 0.5 * (lo + hi) * h
}

/// Safeguarded Newton for the zero of `J_{ν+1}` in `(a, b)`. Returns the zero
/// and `J_{ν+2}` there (which equals `-J_ν` at a zero of `J_{ν+1}`).
fn solve_next_in_bracket(nu: f64, a: f64, b: f64, fa: f64, guess: f64) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (a, b);
    let sign_lo = fa.signum();
    let mut x = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
    let mut prev_dx = f64::INFINITY;
    for _ in 0..MAX_NEWTON {
        let (jn, f) = bessel_j_pair(nu, x);
        if f == 0.0 {
            return Ok((x, -jn));
        }
        if f.signum() == sign_lo {
            lo = x;
        } else {
            hi = x;
        }
        let df = jn - (nu + 1.0) / x * f;
        let step = f / df;
        let dx = step.abs();
        // converged: test before the bracket guard, since x itself is now
        // a bracket end
        if dx <= 4.0 * f64::EPSILON * x
            || hi - lo <= 4.0 * f64::EPSILON * hi
            || (dx < STALL * x && dx >= 0.5 * prev_dx)
        {
            return Ok((x - step, -jn));
        }
        prev_dx = dx;
        let nx = x - step;
        x = if nx > lo && nx < hi { nx } else { 0.5 * (lo + hi) };
    }
    Err(Error::Numeric(format!(
        "Newton iteration for a zero of J_{} in ({a}, {b}) did not converge",
        nu + 1.0
    )))
}
