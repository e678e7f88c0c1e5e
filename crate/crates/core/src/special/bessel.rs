//! Bessel functions of the first kind for real order `ν >= 0` and real
//! argument `x >= 0`.
//!
//! Values come from Miller's backward recurrence started well above
//! `max(ν, x)` and normalised with the Neumann addition identity
//!
//! ```text
//! (x/2)^μ = Σ_{k>=0} c_k J_{μ+2k}(x),   c_0 = Γ(μ+1),  c_k = (μ+2k) Γ(μ+k) / k!
//! ```
//!
//! where `μ` is the fractional part of `ν`. For integer orders this is the
//! familiar `J_0 + 2 Σ J_{2k} = 1`. The recurrence runs in the direction in
//! which `J` is dominant, so orders below `x` are obtained to a few ulps and
//! orders above `x` keep full relative accuracy even when tiny.

use statrs::function::gamma::ln_gamma;

const RESCALE_ABOVE: f64 = 1e200;
const RESCALE_BY: f64 = 1e-200;

/// Number of recurrence steps above the target order.
fn start_offset(big: f64) -> f64 {
    20.0 + 12.0 * big.cbrt()
}

/// `(J_ν(x), J_{ν+1}(x))`.
///
/// Panics in debug builds for negative or non-finite input; callers in this
/// crate validate first.
pub fn bessel_j_pair(nu: f64, x: f64) -> (f64, f64) {
    debug_assert!(nu >= 0.0 && nu.is_finite(), "order must be >= 0");
    debug_assert!(x >= 0.0 && x.is_finite(), "argument must be >= 0");
    if x == 0.0 {
        return (if nu == 0.0 { 1.0 } else { 0.0 }, 0.0);
    }
    if x < 1e-8 {
        return (small_x(nu, x), small_x(nu + 1.0, x));
    }
    let m = nu.floor() as usize;
    let mu = nu - m as f64;
    let big = nu.max(x);
    let top = ((big + start_offset(big)).ceil() as usize).max(m + 2);

    // Coefficients of the normalising sum for even offsets, generated
    // downward from k = top/2.
    let integer_order = mu == 0.0;
    let mut kk = top / 2;
    let mut g = if integer_order {
        1.0 / kk.max(1) as f64
    } else {
        (ln_gamma(mu + kk as f64) - ln_gamma(kk as f64 + 1.0)).exp()
    };

    let mut f_up = 0.0; // f_{i+1}
    let mut f = 1e-30; // f_i
    let mut sum = 0.0;
    let mut at_nu = 0.0;
    let mut at_nu1 = 0.0;
    let mut i = top;
    loop {
        if i == m {
            at_nu = f;
        } else if i == m + 1 {
            at_nu1 = f;
        }
        if i.is_multiple_of(2) {
            let k = i / 2;
            while kk > k && kk > 1 {
                // g_{k-1} = g_k k / (μ + k - 1)
                g *= kk as f64 / (mu + kk as f64 - 1.0);
                kk -= 1;
            }
            let c = if k == 0 {
                if integer_order {
                    1.0
                } else {
                    ln_gamma(mu + 1.0).exp()
                }
            } else if integer_order {
                2.0
            } else {
                (mu + 2.0 * k as f64) * g
            };
            sum += c * f;
        }
        if i == 0 {
            break;
        }
        let order = mu + i as f64;
        let f_down = (2.0 * order / x) * f - f_up;
        f_up = f;
        f = f_down;
        i -= 1;
        if f.abs() > RESCALE_ABOVE {
            f *= RESCALE_BY;
            f_up *= RESCALE_BY;
            sum *= RESCALE_BY;
            at_nu *= RESCALE_BY;
            at_nu1 *= RESCALE_BY;
        }
    }
    let scale = if integer_order {
        1.0 / sum
    } else {
        (0.5 * x).powf(mu) / sum
    };
    (at_nu * scale, at_nu1 * scale)
}

/// `J_ν(x)`.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    bessel_j_pair(nu, x).0
}

/// Spherical Bessel pair `(j_l(x), j_{l+1}(x))`, `j_l(x) = sqrt(π/2x) J_{l+1/2}(x)`.
pub fn spherical_j_pair(l: usize, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (if l == 0 { 1.0 } else { 0.0 }, 0.0);
    }
    let (a, b) = bessel_j_pair(l as f64 + 0.5, x);
    let s = (std::f64::consts::PI / (2.0 * x)).sqrt();
    (a * s, b * s)
}

fn small_x(nu: f64, x: f64) -> f64 {
    // two terms of the ascending series
    let h = 0.5 * x;
    let lead = (nu * h.ln() - ln_gamma(nu + 1.0)).exp();
    lead * (1.0 - h * h / (nu + 1.0))
}

/// Upper bound on `|J_ν(x)|` for `0 <= x <= ν`, used to skip negligible
/// series terms. Integer orders use Kapteyn's inequality; other orders the
/// ascending-series bound `(x/2)^ν / Γ(ν+1)`.
pub fn bessel_j_bound_below_turning(nu: f64, x: f64) -> f64 {
    if x >= nu || nu == 0.0 {
        return 1.0;
    }
    if nu.fract() == 0.0 {
        let z = x / nu;
        let s = (1.0 - z * z).sqrt();
        (nu * (z.ln() + s - (1.0 + s).ln())).exp().min(1.0)
    } else {
        (nu * (0.5 * x).ln() - ln_gamma(nu + 1.0)).exp().min(1.0)
    }
}
