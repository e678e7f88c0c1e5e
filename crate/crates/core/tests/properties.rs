use approx::assert_relative_eq;
use std::f64::consts::TAU;

use proptest::prelude::*;

use bhk_core::geometry::tangent_halfspace;
use bhk_core::kernels::{gauss_kernel, halfspace_kernel, thm1_approx, thm2_approx, Thm2Variant};
use bhk_core::oracles::{series_kernel, SeriesConfig};
use bhk_core::Point;

fn disk_point(r: f64, a: f64) -> Point {
    Point::polar(2, r, a).unwrap()
}

fn rotate(p: &Point, phi: f64) -> Point {
    let c = p.coords();
    let (s, k) = phi.sin_cos();
    Point::new(vec![k * c[0] - s * c[1], s * c[0] + k * c[1]]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn series_is_symmetric(r1 in 0.0..0.95f64, a1 in 0.0..TAU, r2 in 0.0..0.95f64, a2 in 0.0..TAU, t in 0.02..0.5f64) {
        let (x, y) = (disk_point(r1, a1), disk_point(r2, a2));
        let cfg = SeriesConfig::new(2).unwrap();
        let a = series_kernel(t, &x, &y, &cfg).unwrap();
        let b = series_kernel(t, &y, &x, &cfg).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.err + b.err + 1e-12 * a.value.abs());
    }

    #[test]
    fn kernels_are_rotation_invariant(r1 in 0.0..0.95f64, a1 in 0.0..TAU, r2 in 0.0..0.95f64, a2 in 0.0..TAU, t in 0.02..0.5f64, phi in 0.0..TAU) {
        let (x, y) = (disk_point(r1, a1), disk_point(r2, a2));
        let (xr, yr) = (rotate(&x, phi), rotate(&y, phi));
        let cfg = SeriesConfig::new(2).unwrap();
        let a = series_kernel(t, &x, &y, &cfg).unwrap();
        let b = series_kernel(t, &xr, &yr, &cfg).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.err + b.err + 1e-10 * a.value.abs());
        let a = thm1_approx(t, &x, &y).unwrap().value;
        let b = thm1_approx(t, &xr, &yr).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-12 * a.abs() + 1e-300);
    }

    #[test]
    fn domination_chain(r1 in 0.05..0.95f64, a1 in 0.0..TAU, r2 in 0.0..0.95f64, a2 in 0.0..TAU, t in 0.02..0.5f64) {
        // B ⊂ H_x ⊂ R^n, so 0 <= k_B <= k_{H_x} <= k
        let (x, y) = (disk_point(r1, a1), disk_point(r2, a2));
        let s = series_kernel(t, &x, &y, &SeriesConfig::new(2).unwrap()).unwrap();
        let kh = halfspace_kernel(t, &x, &y, &tangent_halfspace(&x).unwrap()).unwrap();
        let k = gauss_kernel(t, &x, &y).unwrap();
        prop_assert!(s.value >= -s.err);
        prop_assert!(s.value <= kh + s.err);
        prop_assert!(kh <= k);
    }

    #[test]
    fn thm2_variants_differ_by_second_order(r1 in 0.5..0.999f64, a1 in 0.0..TAU, r2 in 0.5..0.999f64, a2 in 0.0..TAU, t in 1e-4..0.1f64) {
        let (x, y) = (disk_point(r1, a1), disk_point(r2, a2));
        let e = thm2_approx(t, &x, &y, Thm2Variant::Exponential).unwrap().value;
        let l = thm2_approx(t, &x, &y, Thm2Variant::Linear).unwrap().value;
        let w = (1.0 - r1) * (1.0 - r2) / t;
        let k = gauss_kernel(t, &x, &y).unwrap();
        prop_assert!(l >= e);
        prop_assert!(l - e <= 0.5 * w * w * k * (1.0 + 1e-12) + 1e-300);
    }
}

#[test]
fn gauss_reference_value() {
    let x = Point::new(vec![0.0, 0.0]).unwrap();
    let y = Point::new(vec![1.0, 0.0]).unwrap();
    assert_relative_eq!(gauss_kernel(0.25, &x, &y).unwrap(), (-1.0f64).exp() / std::f64::consts::PI, max_relative = 1e-15);
}
