//! Tails of the Chapman–Kolmogorov integral away from the Gaussian bridge
//! centre.
//!
//! For `c = (1-α)x + αy` the product of free kernels factorises as
//! `k(αt,x,z) k((1-α)t,z,y) = k(t,x,y) G(z-c)` with `G` the centred Gaussian of
//! variance `2α(1-α)t` per coordinate. In polar coordinates about `c`
//! (radius `ρ`, angle `φ` to the inward normal `-ν` of the half-space)
//! `δ_H(z) = d - ρ cos φ` with `d = δ_H(c)`, so
//!
//! ```text
//! ∫_{H∖B(c,r)} k k δ_H^β dz = k(t,x,y) ∫_r^∞ G(ρ) ρ^{n-1} |S^{n-2}| ∫_0^π (d - ρ cos φ)_+^β sin^{n-2}φ dφ dρ.
//! ```
//!
//! Using `(d - ρ cos φ)_+ <= d + ρ`, `d <= δ_H(x) + δ_H(y)` and
//! `e^{-v²/2} <= e^{-v_r²/4} e^{-v²/4}` on `v >= v_r` gives the explicit bound
//!
//! ```text
//! lhs <= c_{n,β} k(t,x,y) t^{β/2} e^{-r²/8α(1-α)t} (1 + (δ_H(x)+δ_H(y))/√t)^β,
//! c_{n,β} = ∫_0^∞ v^{n-1} e^{-v²/4} (1+v)^β dv / (2^{n/2-1} Γ(n/2)).
//! ```

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ur};

use crate::error::{Error, Result};
use crate::geometry::{HalfSpace, Point};
use crate::kernels::{gauss_kernel, halfspace_kernel, one_minus_exp};
use crate::quadrature::integrate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "variant")]
pub enum CkVariant {
    /// Free kernels, weight `δ_H(z)^β`, integration over `H`.
    HalfSpaceWeight { beta: f64 },
    /// Half-space kernels on both sides, integration over `H`.
    HalfSpaceKernels,
    /// Free kernels over all of `R^n`.
    FullSpace,
}

/// Tail integral and the shape of its bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CkTail {
    pub lhs: f64,
    /// Bound without its constant.
    pub rhs_shape: f64,
    /// Constant making `lhs <= constant · rhs_shape` provable, when known.
    pub explicit_constant: Option<f64>,
}

impl CkTail {
    /// `lhs / rhs_shape`, the constant this case needs.
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs_shape
    }
}

fn sphere_area(dim: usize) -> f64 {
    // |S^{dim-1}|; |S^0| = 2
    let d = dim as f64;
    2.0 * std::f64::consts::PI.powf(0.5 * d) / gamma(0.5 * d)
}

/// The constant `c_{n,β}` from the module docs.
pub fn explicit_constant(n: usize, beta: f64) -> Result<f64> {
    let nf = n as f64;
    let q = integrate(
        |v: f64| v.powf(nf - 1.0) * (-0.25 * v * v).exp() * (1.0 + v).powf(beta),
        0.0,
        60.0 + 4.0 * beta.sqrt(),
        &[2.0, 6.0],
        1e-12,
        0.0,
        2000,
    )?;
    Ok(q.value / (2f64.powf(0.5 * nf - 1.0) * gamma(0.5 * nf)))
}

/// Evaluates the tail integral by the polar reduction above.
pub fn ck_tail_check(
    t: f64,
    alpha: f64,
    r: f64,
    x: &Point,
    y: &Point,
    h: &HalfSpace,
    variant: CkVariant,
) -> Result<CkTail> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("time must be positive, got {t}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("split must lie in (0, 1), got {alpha}")));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::domain(format!("radius must be >= 0, got {r}")));
    }
    x.check_same_dim(y)?;
    if h.dim() != x.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: h.dim() });
    }
    let n = x.dim();
    let nf = n as f64;
    let (dx, dy) = (h.delta(x)?, h.delta(y)?);
    let k = gauss_kernel(t, x, y)?;
    let var = 2.0 * alpha * (1.0 - alpha) * t;
    let decay = (-r * r / (8.0 * alpha * (1.0 - alpha) * t)).exp();

    if let CkVariant::FullSpace = variant {
        // P(|N(0, var I)| > r)
        let q = if r == 0.0 { 1.0 } else { gamma_ur(0.5 * nf, r * r / (2.0 * var)) };
        let lhs = k * q;
        return Ok(CkTail {
            lhs,
            rhs_shape: k * decay,
            explicit_constant: Some(explicit_constant(n, 0.0)?),
        });
    }

    let c: Vec<f64> = x
        .coords()
        .iter()
        .zip(y.coords())
        .map(|(a, b)| (1.0 - alpha) * a + alpha * b)
        .collect();
    let d = h.signed_distance(&Point::new(c)?);
    let (t1, t2) = (alpha * t, (1.0 - alpha) * t);
    // weight as a function of δ_H(z) >= 0
    let weight = |dz: f64| -> f64 {
        match variant {
            CkVariant::HalfSpaceWeight { beta } => {
                if beta == 0.0 {
                    1.0
                } else {
                    dz.powf(beta)
                }
            }
            CkVariant::HalfSpaceKernels => one_minus_exp(dx * dz / t1) * one_minus_exp(dz * dy / t2),
            CkVariant::FullSpace => unreachable!(),
        }
    };
    let area = sphere_area(n - 1);
    let angular = |rho: f64| -> Result<f64> {
        // (d - ρ cos φ) > 0  ⇔  cos φ < d/ρ
        let lo = if rho <= d.abs() {
            if d > 0.0 {
                0.0
            } else {
                return Ok(0.0);
            }
        } else {
            (d / rho).acos()
        };
        let q = integrate(
            |phi: f64| {
                let dz = d - rho * phi.cos();
                if dz <= 0.0 {
                    0.0
                } else {
                    weight(dz) * phi.sin().powi(n as i32 - 2)
                }
            },
            lo,
            std::f64::consts::PI,
            &[],
            1e-10,
            1e-300,
            400,
        )?;
        Ok(q.value)
    };
    let sd = var.sqrt();
    let norm = (2.0 * std::f64::consts::PI * var).powf(-0.5 * nf);
    // factor e^{-r²/2var} out of the radial Gaussian to keep relative accuracy
    let rho_max = (r * r + 2.0 * var * 80.0).sqrt();
    let mut inner_err = None;
    let radial = integrate(
        |rho: f64| {
            let g = (-(rho * rho - r * r) / (2.0 * var)).exp();
            match angular(rho) {
                Ok(a) => g * rho.powi(n as i32 - 1) * area * a,
                Err(e) => {
                    inner_err.get_or_insert(e);
                    0.0
                }
            }
        },
        r,
        rho_max,
        &[r + sd, r + 3.0 * sd, d.abs().clamp(r, rho_max)],
        1e-9,
        0.0,
        2000,
    )?;
    if let Some(e) = inner_err {
        return Err(e);
    }
    let lhs = k * norm * (-r * r / (2.0 * var)).exp() * radial.value;

    Ok(match variant {
        CkVariant::HalfSpaceWeight { beta } => CkTail {
            lhs,
            rhs_shape: k * t.powf(0.5 * beta) * decay * (1.0 + (dx + dy) / t.sqrt()).powf(beta),
            explicit_constant: Some(explicit_constant(n, beta)?),
        },
        CkVariant::HalfSpaceKernels => CkTail {
            lhs,
            rhs_shape: halfspace_kernel(t, x, y, h)? * decay / (alpha * (1.0 - alpha)),
            explicit_constant: None,
        },
        CkVariant::FullSpace => unreachable!(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn full_space_at_zero_radius_is_semigroup() {
        let h = HalfSpace::new(vec![1.0, 0.0], 1.0).unwrap();
        let x = p(&[0.1, 0.2]);
        let y = p(&[-0.3, 0.0]);
        let c = ck_tail_check(0.1, 0.3, 0.0, &x, &y, &h, CkVariant::FullSpace).unwrap();
        assert_relative_eq!(c.lhs, gauss_kernel(0.1, &x, &y).unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn far_half_space_matches_full_space() {
        // a plane far away removes nothing
        for n in [2usize, 3] {
            let x = Point::origin(n).unwrap();
            let mut nv = vec![0.0; n];
            nv[0] = 1.0;
            let h = HalfSpace::new(nv, 50.0).unwrap();
            let a = ck_tail_check(0.1, 0.5, 0.4, &x, &x, &h, CkVariant::HalfSpaceWeight { beta: 0.0 })
                .unwrap();
            let b = ck_tail_check(0.1, 0.5, 0.4, &x, &x, &h, CkVariant::FullSpace).unwrap();
            assert_relative_eq!(a.lhs, b.lhs, max_relative = 1e-8);
        }
    }

    #[test]
    fn explicit_constant_beta_zero() {
        assert_relative_eq!(explicit_constant(2, 0.0).unwrap(), 2.0, max_relative = 1e-11);
        assert_relative_eq!(explicit_constant(3, 0.0).unwrap(), 2f64.powf(1.5), max_relative = 1e-11);
    }

    #[test]
    fn bound_holds_on_example() {
        let h = HalfSpace::new(vec![1.0, 0.0], 1.0).unwrap();
        let o = p(&[0.0, 0.0]);
        let c = ck_tail_check(0.1, 0.5, 0.5, &o, &o, &h, CkVariant::HalfSpaceWeight { beta: 0.0 }).unwrap();
        assert!(c.lhs > 0.0);
        assert!(c.lhs <= c.explicit_constant.unwrap() * c.rhs_shape);
    }
}
