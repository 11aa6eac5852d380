use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, RealVec3, Result};

/// Parameters that fully determine a [`MeasurementSurface`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub center: [f64; 3],
    pub radius: f64,
    pub n_phi: usize,
    pub n_theta: usize,
}

impl SurfaceSpec {
    pub fn build(&self) -> Result<MeasurementSurface> {
        build_sphere_surface(RealVec3::from(self.center), self.radius, self.n_phi, self.n_theta)
    }
}

/// A discretised sphere with outward normals and area weights.
///
/// Points are stored polar-angle major: index `i * n_theta + j` holds
/// `φ_i = (i + ½)π / n_phi`, `θ_j = (j + ½)2π / n_theta`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSurface {
    pub center: RealVec3,
    pub radius: f64,
    pub n_phi: usize,
    pub n_theta: usize,
    pub points: Vec<RealVec3>,
    pub normals: Vec<RealVec3>,
    pub weights: Vec<f64>,
    /// `(φ, θ)` of every point.
    pub angles: Vec<(f64, f64)>,
}

impl MeasurementSurface {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spec(&self) -> SurfaceSpec {
        SurfaceSpec {
            center: self.center.into(),
            radius: self.radius,
            n_phi: self.n_phi,
            n_theta: self.n_theta,
        }
    }

    /// Unsigned distance from `z` to the sphere.
    pub fn distance_to(&self, z: &RealVec3) -> f64 {
        ((z - self.center).norm() - self.radius).abs()
    }

    /// True if `z` lies strictly inside the sphere.
    pub fn contains(&self, z: &RealVec3) -> bool {
        (z - self.center).norm() < self.radius
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Midpoint rule on the sphere of radius `radius` about `center`, with
/// weights `ρ² sin φ (π / n_phi)(2π / n_theta)`.
pub fn build_sphere_surface(
    center: RealVec3,
    radius: f64,
    n_phi: usize,
    n_theta: usize,
) -> Result<MeasurementSurface> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::config("surface.radius", format!("must be positive, got {radius}")));
    }
    if n_phi < 2 {
        return Err(Error::config("surface.n_phi", format!("must be at least 2, got {n_phi}")));
    }
    if n_theta < 2 {
        return Err(Error::config("surface.n_theta", format!("must be at least 2, got {n_theta}")));
    }
    if !center.iter().all(|c| c.is_finite()) {
        return Err(Error::config("surface.center", "must be finite"));
    }
    let d_phi = PI / n_phi as f64;
    let d_theta = 2.0 * PI / n_theta as f64;
    let n = n_phi * n_theta;
    let mut points = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut angles = Vec::with_capacity(n);
    for i in 0..n_phi {
        let phi = (i as f64 + 0.5) * d_phi;
        let (sp, cp) = phi.sin_cos();
        for j in 0..n_theta {
            let theta = (j as f64 + 0.5) * d_theta;
            let (st, ct) = theta.sin_cos();
            let nu = RealVec3::new(sp * ct, sp * st, cp);
            points.push(center + nu * radius);
            normals.push(nu);
            weights.push(radius * radius * sp * d_phi * d_theta);
            angles.push((phi, theta));
        }
    }
    Ok(MeasurementSurface {
        center,
        radius,
        n_phi,
        n_theta,
        points,
        normals,
        weights,
        angles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_scale_surface() {
        let s = build_sphere_surface(RealVec3::zeros(), 25.0, 100, 100).unwrap();
        assert_eq!(s.len(), 10_000);
        for (p, nu) in s.points.iter().zip(&s.normals) {
            assert!((p.norm() - 25.0).abs() <= 1e-12 * 25.0);
            assert!((nu - p / 25.0).norm() < 1e-15);
        }
        let ratio = s.total_weight() / (4.0 * PI * 625.0);
        assert!((0.999..=1.001).contains(&ratio), "{ratio}");
    }

    #[test]
    fn offset_center() {
        let c = RealVec3::new(1.0, -2.0, 0.5);
        let s = build_sphere_surface(c, 3.0, 8, 12).unwrap();
        assert!(s.points.iter().all(|p| ((p - c).norm() - 3.0).abs() < 1e-12));
        assert_eq!(s.spec().build().unwrap(), s);
    }

    #[test]
    fn rejects_bad_parameters() {
        let z = RealVec3::zeros();
        for (r, a, b, field) in [
            (0.0, 10, 10, "surface.radius"),
            (-1.0, 10, 10, "surface.radius"),
            (1.0, 1, 10, "surface.n_phi"),
            (1.0, 10, 0, "surface.n_theta"),
        ] {
            match build_sphere_surface(z, r, a, b) {
                Err(Error::Config { field: f, .. }) => assert_eq!(f, field),
                other => panic!("expected config error, got {other:?}"),
            }
        }
    }
}
