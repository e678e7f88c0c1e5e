//! Mass of the kernel over the disk against the survival probability from
//! the centre, `Σ_k 2/(j_k J_1(j_k)) e^{-j_k² t}` over the zeros of `J_0`.

use std::f64::consts::{PI, TAU};

use bhk_core::oracles::{series_kernel, SeriesConfig};
use bhk_core::quadrature::gauss_legendre_on;
use bhk_core::Point;

/// `J_m(x) = (1/π) ∫_0^π cos(mθ - x sin θ) dθ`; the trapezoidal rule is
/// spectrally accurate for this periodic integrand.
fn bessel_j(m: i32, x: f64) -> f64 {
    let n = 400;
    let h = PI / n as f64;
    let f = |th: f64| (m as f64 * th - x * th.sin()).cos();
    let mut s = 0.5 * (f(0.0) + f(PI));
    for i in 1..n {
        s += f(i as f64 * h);
    }
    s * h / PI
}

fn j0_zero(k: usize) -> f64 {
    let mut z = PI * (k as f64 - 0.25);
    for _ in 0..50 {
        z += bessel_j(0, z) / bessel_j(1, z);
    }
    z
}

fn survival_from_centre(t: f64) -> f64 {
    (1..=40)
        .map(|k| {
            let j = j0_zero(k);
            2.0 / (j * bessel_j(1, j)) * (-j * j * t).exp()
        })
        .sum()
}

#[test]
fn kernel_mass_is_the_survival_probability() {
    let cfg = SeriesConfig::new(2).unwrap();
    let o = Point::origin(2).unwrap();
    let (r, w) = gauss_legendre_on(48, 0.0, 1.0);
    for t in [0.05, 0.1, 0.3] {
        // radial kernel from the centre: the angle integral is exact with few nodes
        let nphi = 8;
        let mut mass = 0.0;
        for (ri, wi) in r.iter().zip(&w) {
            for j in 0..nphi {
                let y = Point::polar(2, *ri, TAU * j as f64 / nphi as f64).unwrap();
                mass += wi * ri * TAU / nphi as f64 * series_kernel(t, &o, &y, &cfg).unwrap().value;
            }
        }
        let want = survival_from_centre(t);
        assert!((mass / want - 1.0).abs() < 1e-9, "t={t}: {mass} vs {want}");
    }
}

#[test]
fn first_zeros() {
    assert!((j0_zero(1) - 2.404_825_557_695_773).abs() < 1e-12);
    assert!((j0_zero(2) - 5.520_078_110_286_311).abs() < 1e-12);
}
