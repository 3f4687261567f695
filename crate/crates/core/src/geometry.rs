//! Incidence geometry of planar circles on the cylinder `S¹ × ℝ` and the flat
//! Lorentz space `ℝ^{1,2}` with metric `−dt² + dx₁² + dx₂²`.
//!
//! A point `(t, x)` of `ℝ^{1,2}` labels the planar circle `v = t + ⟨ω, x⟩`.
//! Angles are radians with `ω = (cos θ, sin θ)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative tolerance used to decide nullity of a direction.
pub const NULL_TOLERANCE: f64 = 1e-9;

/// Wraps an angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// A point `(θ, v)` on the cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderPoint {
    theta: f64,
    pub v: f64,
}

impl CylinderPoint {
    pub fn new(theta: f64, v: f64) -> Self {
        Self {
            theta: normalize_angle(theta),
            v,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The unit vector `ω = (cos θ, sin θ)`.
    pub fn omega(&self) -> [f64; 2] {
        [self.theta.cos(), self.theta.sin()]
    }

    /// The antipodal label `(−ω, −v)` of the same straight line in the plane.
    pub fn antipode(&self) -> Self {
        Self::new(self.theta + std::f64::consts::PI, -self.v)
    }
}

/// A point `(t, x₁, x₂)` of `ℝ^{1,2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
}

impl SpacetimePoint {
    pub const ORIGIN: Self = Self {
        t: 0.0,
        x1: 0.0,
        x2: 0.0,
    };

    pub fn new(t: f64, x1: f64, x2: f64) -> Self {
        Self { t, x1, x2 }
    }

    /// Complex spatial coordinate `z = x₁ + i x₂`.
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.x1, self.x2)
    }

    pub fn from_tz(t: f64, z: Complex64) -> Self {
        Self::new(t, z.re, z.im)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.t, self.x1, self.x2]
    }
}

/// A tangent vector `(τ, ξ₁, ξ₂)` of `ℝ^{1,2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiVector {
    pub tau: f64,
    pub xi1: f64,
    pub xi2: f64,
}

impl MinkowskiVector {
    pub fn new(tau: f64, xi1: f64, xi2: f64) -> Self {
        Self { tau, xi1, xi2 }
    }

    /// `−τ² + ξ₁² + ξ₂²`.
    pub fn quadratic_form(&self) -> f64 {
        -self.tau * self.tau + self.xi1 * self.xi1 + self.xi2 * self.xi2
    }
}

/// Height of the planar circle `C_c` above angle `θ`.
pub fn circle_height(c: &SpacetimePoint, theta: f64) -> f64 {
    c.t + c.x1 * theta.cos() + c.x2 * theta.sin()
}

/// Signed position of `p` relative to `C_c`: positive in `Ω⁺`, negative in
/// `Ω⁻`, zero on the circle.
pub fn side_of_circle(c: &SpacetimePoint, p: &CylinderPoint) -> f64 {
    circle_height(c, p.theta()) - p.v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeRelation {
    /// `C_{c2} ⊂ Ω⁺_c`.
    Future,
    /// `C_{c2} ⊂ Ω⁻_c`.
    Past,
    Neither,
    Equal,
}

/// Cone relation of `c2` with respect to the vertex `c`.
///
/// `C_{c2}` lies in `Ω⁺_c` exactly when `(t − t′) + ⟨ω, x − x′⟩ ≥ 0` for all
/// `ω`, i.e. when `t − t′ ≥ |x − x′|`. Tangent circles count as contained.
pub fn cone_relation(c: &SpacetimePoint, c2: &SpacetimePoint) -> ConeRelation {
    if c == c2 {
        return ConeRelation::Equal;
    }
    let dt = c.t - c2.t;
    let dx = (c.x1 - c2.x1).hypot(c.x2 - c2.x2);
    if dt >= dx {
        ConeRelation::Future
    } else if -dt >= dx {
        ConeRelation::Past
    } else {
        ConeRelation::Neither
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalType {
    Spacelike,
    Null,
    Timelike,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionClass {
    pub by_metric: CausalType,
    pub by_axis: CausalType,
    /// Distance from the origin of `ℝ²` to the axis line
    /// `{ω : τ + ⟨ω, ξ⟩ = 0}`; infinite when `ξ = 0`.
    pub axis_distance: f64,
}

/// Classifies the geodesic through a point with direction `d` twice: by the
/// sign of the Lorentz quadratic form, and by how the common axis of the
/// corresponding pencil of planes meets the cylinder (two crossings,
/// tangency, or disjoint).
pub fn classify_direction(d: &MinkowskiVector) -> Result<DirectionClass> {
    let tau2 = d.tau * d.tau;
    let xi2 = d.xi1 * d.xi1 + d.xi2 * d.xi2;
    if tau2 == 0.0 && xi2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let scale = tau2.max(xi2).max(1.0);

    let q = d.quadratic_form();
    let by_metric = if q.abs() <= NULL_TOLERANCE * scale {
        CausalType::Null
    } else if q > 0.0 {
        CausalType::Spacelike
    } else {
        CausalType::Timelike
    };

    // The axis projects to the line τ + ⟨ω, ξ⟩ = 0 in the ω-plane. Its
    // distance from the origin decides how it meets the unit circle.
    let (axis_distance, by_axis) = if xi2 == 0.0 {
        (f64::INFINITY, CausalType::Timelike)
    } else {
        let xi = xi2.sqrt();
        let dist = d.tau.abs() / xi;
        // 1 − dist² measured in the same scaled units as the metric test
        let gap = (1.0 - dist * dist) * xi2;
        let class = if gap.abs() <= NULL_TOLERANCE * scale {
            CausalType::Null
        } else if gap > 0.0 {
            CausalType::Spacelike
        } else {
            CausalType::Timelike
        };
        (dist, class)
    };

    Ok(DirectionClass {
        by_metric,
        by_axis,
        axis_distance,
    })
}

/// Points of the unit circle where the axis line of `d` crosses it.
pub fn axis_crossings(d: &MinkowskiVector) -> Vec<[f64; 2]> {
    let xi2 = d.xi1 * d.xi1 + d.xi2 * d.xi2;
    if xi2 == 0.0 {
        return Vec::new();
    }
    // foot of the perpendicular from the origin, then step along the line
    let foot = [-d.tau * d.xi1 / xi2, -d.tau * d.xi2 / xi2];
    let foot2 = foot[0] * foot[0] + foot[1] * foot[1];
    let rem = 1.0 - foot2;
    let dir = {
        let n = xi2.sqrt();
        [-d.xi2 / n, d.xi1 / n]
    };
    if rem.abs() <= NULL_TOLERANCE {
        vec![foot]
    } else if rem > 0.0 {
        let s = rem.sqrt();
        vec![
            [foot[0] + s * dir[0], foot[1] + s * dir[1]],
            [foot[0] - s * dir[0], foot[1] - s * dir[1]],
        ]
    } else {
        Vec::new()
    }
}

/// Normal vector `(1, cos θ, sin θ)` of the null plane `Π_p` of circles
/// through `p`, in `(t, x₁, x₂)` coordinates.
pub fn null_plane_normal(p: &CylinderPoint) -> MinkowskiVector {
    let [c, s] = p.omega();
    MinkowskiVector::new(1.0, c, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    #[test]
    fn circle_height_examples() {
        assert_eq!(circle_height(&SpacetimePoint::ORIGIN, 1.234), 0.0);
        let c = SpacetimePoint::new(1.0, 1.0, 0.0);
        assert_eq!(circle_height(&c, 0.0), 2.0);
        assert!(circle_height(&c, PI).abs() < 1e-15);
        let c = SpacetimePoint::new(0.5, 0.3, -0.4);
        assert!((circle_height(&c, FRAC_PI_2) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn side_of_circle_examples() {
        let p = CylinderPoint::new(0.0, 0.0);
        assert_eq!(side_of_circle(&SpacetimePoint::ORIGIN, &p), 0.0);
        let c = SpacetimePoint::new(1.0, 0.0, 0.0);
        assert_eq!(side_of_circle(&c, &CylinderPoint::new(PI, 0.0)), 1.0);
        let c = SpacetimePoint::new(0.0, 1.0, 0.0);
        let s = side_of_circle(&c, &CylinderPoint::new(FRAC_PI_3, 1.0));
        assert!((s + 0.5).abs() < 1e-15);
    }

    #[test]
    fn cone_relation_examples() {
        let o = SpacetimePoint::ORIGIN;
        let up = SpacetimePoint::new(1.0, 0.0, 0.0);
        assert_eq!(cone_relation(&up, &o), ConeRelation::Future);
        assert_eq!(cone_relation(&o, &up), ConeRelation::Past);
        assert_eq!(
            cone_relation(&o, &SpacetimePoint::new(0.5, 1.0, 0.0)),
            ConeRelation::Neither
        );
        assert_eq!(cone_relation(&o, &o), ConeRelation::Equal);
    }

    #[test]
    fn neither_example_matches_sampling() {
        let c = SpacetimePoint::ORIGIN;
        let c2 = SpacetimePoint::new(0.5, 1.0, 0.0);
        let n = 10_000;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let th = TAU * i as f64 / n as f64;
            let s = side_of_circle(&c, &CylinderPoint::new(th, circle_height(&c2, th)));
            lo = lo.min(s);
            hi = hi.max(s);
        }
        assert!(lo < 0.0 && hi > 0.0);
    }

    #[test]
    fn tangent_circles_are_contained() {
        // t − t′ = |x − x′| exactly: circles touch at one point
        let c = SpacetimePoint::new(1.0, 0.0, 0.0);
        let c2 = SpacetimePoint::new(0.0, 1.0, 0.0);
        assert_eq!(cone_relation(&c, &c2), ConeRelation::Future);
    }

    #[test]
    fn classify_examples() {
        let r = classify_direction(&MinkowskiVector::new(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(r.by_metric, CausalType::Spacelike);
        assert_eq!(r.by_axis, CausalType::Spacelike);
        assert_eq!(r.axis_distance, 0.0);
        assert_eq!(
            axis_crossings(&MinkowskiVector::new(0.0, 1.0, 0.0)).len(),
            2
        );

        let d = MinkowskiVector::new(1.0, 1.0, 0.0);
        let r = classify_direction(&d).unwrap();
        assert_eq!(r.by_metric, CausalType::Null);
        assert_eq!(r.by_axis, CausalType::Null);
        let touch = axis_crossings(&d);
        assert_eq!(touch.len(), 1);
        assert!((touch[0][0] + 1.0).abs() < 1e-15 && touch[0][1].abs() < 1e-15);

        let r = classify_direction(&MinkowskiVector::new(2.0, 1.0, 1.0)).unwrap();
        assert_eq!(r.by_metric, CausalType::Timelike);
        assert_eq!(r.by_axis, CausalType::Timelike);
        assert!((r.axis_distance - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn pure_time_direction_has_no_axis() {
        let r = classify_direction(&MinkowskiVector::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(r.by_axis, CausalType::Timelike);
        assert!(r.axis_distance.is_infinite());
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(matches!(
            classify_direction(&MinkowskiVector::new(0.0, 0.0, 0.0)),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn angles_are_normalized() {
        let p = CylinderPoint::new(-FRAC_PI_2, 0.0);
        assert!((p.theta() - 1.5 * PI).abs() < 1e-15);
        assert!(CylinderPoint::new(-1e-300, 0.0).theta() < TAU);
    }

    #[test]
    fn null_plane_normal_is_null() {
        for i in 0..100 {
            let p = CylinderPoint::new(0.0628 * i as f64, 0.3);
            assert!(null_plane_normal(&p).quadratic_form().abs() <= 4.0 * f64::EPSILON);
        }
    }
}
