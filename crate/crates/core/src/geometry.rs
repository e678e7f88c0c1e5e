//! Points of the unit ball, boundary distances and the half-spaces built from
//! tangent and chord planes.
//!
//! Everything here is dimension-generic (`n >= 2`). The ball is always the
//! open unit ball centred at the origin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed when asserting `|x| <= 1`.
pub const BALL_TOL: f64 = 1e-12;

/// Below this `|x̂ + ŷ|` the chord-plane normal is meaningless.
pub const ANTIPODAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Any finite point of dimension at least two.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::domain(format!(
                "points need dimension n >= 2, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("non-finite coordinate"));
        }
        Ok(Self { coords })
    }

    /// A point of the closed unit ball.
    pub fn in_ball(coords: Vec<f64>) -> Result<Self> {
        let p = Self::new(coords)?;
        if p.norm() > 1.0 + BALL_TOL {
            return Err(Error::domain(format!(
                "point with |x| = {} lies outside the closed unit ball",
                p.norm()
            )));
        }
        Ok(p)
    }

    /// `r` times the first basis vector of `R^n`.
    pub fn on_axis(dim: usize, r: f64) -> Result<Self> {
        let mut c = vec![0.0; dim];
        if let Some(first) = c.first_mut() {
            *first = r;
        }
        Self::new(c)
    }

    /// Radius `r`, angle `theta` in the plane of the first two coordinates.
    pub fn polar(dim: usize, r: f64, theta: f64) -> Result<Self> {
        let mut c = vec![0.0; dim.max(2)];
        c[0] = r * theta.cos();
        c[1] = r * theta.sin();
        Self::new(c)
    }

    pub fn origin(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    pub fn dot(&self, other: &Point) -> f64 {
        dot(&self.coords, &other.coords)
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| 0.5 * (a + b))
                .collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Point {
        Point {
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    /// `x / |x|`; fails at the origin.
    pub fn unit(&self) -> Result<Point> {
        let r = self.norm();
        if r == 0.0 {
            return Err(Error::Degenerate(
                "direction of the zero vector is undefined".into(),
            ));
        }
        Ok(self.scaled(1.0 / r))
    }

    pub(crate) fn check_same_dim(&self, other: &Point) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The open half-space `{w : w·normal < offset}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    normal: Vec<f64>,
    offset: f64,
}

impl HalfSpace {
    /// `normal` must be a unit vector (checked to `1e-12`).
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let len = normal.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (len - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "half-space normal must be a unit vector, |normal| = {len}"
            )));
        }
        if !offset.is_finite() {
            return Err(Error::domain("non-finite half-space offset"));
        }
        Ok(Self { normal, offset })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// `offset - w·normal`; positive exactly on the interior.
    pub fn signed_distance(&self, w: &Point) -> f64 {
        self.offset - dot(&self.normal, w.coords())
    }

    /// Distance to the boundary plane for a point inside (or on) the
    /// half-space. Points outside are a domain error.
    pub fn delta(&self, w: &Point) -> Result<f64> {
        let d = self.signed_distance(w);
        if d < -BALL_TOL {
            return Err(Error::domain(format!(
                "point lies outside the half-space (signed distance {d})"
            )));
        }
        Ok(d.max(0.0))
    }

    pub fn contains(&self, w: &Point) -> bool {
        self.signed_distance(w) > 0.0
    }
}

/// `δ(x) = 1 - |x|`.
pub fn delta_ball(x: &Point) -> Result<f64> {
    let r = x.norm();
    if r > 1.0 + BALL_TOL {
        return Err(Error::domain(format!(
            "delta_ball: |x| = {r} exceeds 1"
        )));
    }
    Ok((1.0 - r).max(0.0))
}

/// Half-space bounded by the plane tangent to the sphere at `z/|z|`.
pub fn tangent_halfspace(z: &Point) -> Result<HalfSpace> {
    let u = z.unit()?;
    Ok(HalfSpace {
        normal: u.into_coords(),
        offset: 1.0,
    })
}

/// Half-space whose boundary plane passes through `x/|x|` and `y/|y|`
/// orthogonally to their bisector.
pub fn chord_halfspace(x: &Point, y: &Point) -> Result<HalfSpace> {
    x.check_same_dim(y)?;
    let (xu, yu) = (x.unit()?, y.unit()?);
    let sum: Vec<f64> = xu.coords().iter().zip(yu.coords()).map(|(a, b)| a + b).collect();
    let len = sum.iter().map(|c| c * c).sum::<f64>().sqrt();
    if len < ANTIPODAL_TOL {
        return Err(Error::Degenerate(
            "antipodal directions: chord plane normal undefined".into(),
        ));
    }
    let normal: Vec<f64> = sum.iter().map(|c| c / len).collect();
    // x̂·ν = |x̂ + ŷ| / 2 = cos(∠(x, y) / 2)
    let offset = 0.5 * len;
    Ok(HalfSpace { normal, offset })
}

/// Height of the spherical cap cut off by the chord plane,
/// `1 - sqrt(1 - |x̂ - ŷ|²/4)`.
pub fn rho_cap_height(x: &Point, y: &Point) -> Result<f64> {
    // same validation as the chord plane
    chord_halfspace(x, y)?;
    let w = 0.25 * x.unit()?.dist_sq(&y.unit()?);
    let w = w.min(1.0);
    Ok(w / (1.0 + (1.0 - w).sqrt()))
}

/// `δ((x + y)/2)`.
pub fn midpoint_delta(x: &Point, y: &Point) -> Result<f64> {
    x.check_same_dim(y)?;
    delta_ball(x)?;
    delta_ball(y)?;
    delta_ball(&x.midpoint(y))
}

/// Distance from the segment `[x, y]` to the sphere. The norm is convex, so
/// its maximum over the segment sits at an endpoint.
pub fn segment_boundary_distance(x: &Point, y: &Point) -> Result<f64> {
    x.check_same_dim(y)?;
    Ok(delta_ball(x)?.min(delta_ball(y)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn delta_ball_examples() {
        assert_eq!(delta_ball(&p(&[0.5, 0.0])).unwrap(), 0.5);
        assert_eq!(delta_ball(&p(&[0.0, 0.0])).unwrap(), 1.0);
        assert_abs_diff_eq!(delta_ball(&p(&[0.6, 0.8])).unwrap(), 0.0, epsilon = 1e-15);
        assert!(matches!(delta_ball(&p(&[1.1, 0.0])), Err(Error::Domain(_))));
    }

    #[test]
    fn in_ball_rejects_outside() {
        assert!(Point::in_ball(vec![0.9, 0.5]).is_err());
        assert!(Point::in_ball(vec![0.6, 0.8]).is_ok());
        assert!(Point::new(vec![1.0]).is_err());
        assert!(Point::new(vec![f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn tangent_plane_examples() {
        let z = p(&[0.5, 0.0]);
        let h = tangent_halfspace(&z).unwrap();
        assert_eq!(h.normal(), &[1.0, 0.0]);
        assert_eq!(h.offset(), 1.0);
        assert_abs_diff_eq!(h.delta(&p(&[0.2, 0.0])).unwrap(), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(h.delta(&z).unwrap(), 0.5, epsilon = 1e-15);
        assert!(matches!(
            tangent_halfspace(&p(&[0.0, 0.0])),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn chord_plane_examples() {
        let x = p(&[0.5, 0.0]);
        let h = chord_halfspace(&x, &x).unwrap();
        assert_abs_diff_eq!(h.normal()[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h.offset(), 1.0, epsilon = 1e-15);

        let r = 0.7;
        let h = chord_halfspace(&p(&[r, 0.0]), &p(&[0.0, r])).unwrap();
        let s = 0.5f64.sqrt();
        assert_abs_diff_eq!(h.normal()[0], s, epsilon = 1e-15);
        assert_abs_diff_eq!(h.normal()[1], s, epsilon = 1e-15);
        assert_abs_diff_eq!(h.offset(), s, epsilon = 1e-15);

        assert!(matches!(
            chord_halfspace(&p(&[0.5, 0.0]), &p(&[-0.3, 0.0])),
            Err(Error::Degenerate(_))
        ));
        assert!(chord_halfspace(&p(&[0.0, 0.0]), &p(&[0.3, 0.0])).is_err());
    }

    #[test]
    fn chord_plane_passes_through_projections() {
        let x = p(&[0.3, 0.6, -0.2]);
        let y = p(&[-0.1, 0.7, 0.4]);
        let h = chord_halfspace(&x, &y).unwrap();
        assert_abs_diff_eq!(h.signed_distance(&x.unit().unwrap()), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h.signed_distance(&y.unit().unwrap()), 0.0, epsilon = 1e-12);
        assert!(h.contains(&x) && h.contains(&y));
    }

    #[test]
    fn rho_examples() {
        let x = p(&[0.4, 0.1]);
        assert_abs_diff_eq!(rho_cap_height(&x, &x).unwrap(), 0.0, epsilon = 1e-15);
        let v = rho_cap_height(&p(&[0.9, 0.0]), &p(&[0.0, 0.2])).unwrap();
        assert_abs_diff_eq!(v, 1.0 - 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(v, 0.292_893_218_813_452_5, epsilon = 1e-12);
    }

    #[test]
    fn midpoint_delta_examples() {
        assert_abs_diff_eq!(
            midpoint_delta(&p(&[0.5, 0.0]), &p(&[-0.5, 0.0])).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            midpoint_delta(&p(&[0.8, 0.0]), &p(&[0.8, 0.0])).unwrap(),
            0.2,
            epsilon = 1e-15
        );
        assert!(matches!(
            midpoint_delta(&p(&[0.5, 0.0]), &p(&[0.5, 0.0, 0.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
