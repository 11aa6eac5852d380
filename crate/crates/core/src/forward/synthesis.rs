use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{BallSource, CauchyData, MeasurementSurface, Provenance, SourceSet};
use crate::kernels::{dipole_field, WaveContext};
use crate::{ComplexVec3, Error, RealVec3, Result};

/// Whether sources must lie inside the measurement sphere.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Containment {
    #[default]
    Strict,
    /// Accept sources outside the sphere. Their fields are synthesised as
    /// usual, but the base functional does not see them.
    AllowExterior,
}

/// Default order of the ball quadrature.
pub const DEFAULT_QUAD_ORDER: usize = 6;

/// Field of the given point sources sampled on `surface`.
pub fn synthesize_point_source_data(
    sources: &SourceSet,
    surface: &MeasurementSurface,
    ctx: WaveContext,
) -> Result<CauchyData> {
    synthesize_point_source_data_with(sources, surface, ctx, Containment::Strict)
}

pub fn synthesize_point_source_data_with(
    sources: &SourceSet,
    surface: &MeasurementSurface,
    ctx: WaveContext,
    containment: Containment,
) -> Result<CauchyData> {
    for (i, s) in sources.sources().iter().enumerate() {
        let field = format!("sources[{i}]");
        s.validate(&field)?;
        check_placement(&s.location, 0.0, surface, containment, &format!("{field}.location"))?;
    }
    if let Some(d) = sources.min_separation() {
        if d < 2.0 * ctx.wavelength() {
            warn!(
                "closest pair of sources is {d:.4} apart, less than two wavelengths ({:.4})",
                2.0 * ctx.wavelength()
            );
        }
    }
    let dipoles: Vec<(RealVec3, f64, ComplexVec3)> =
        sources.sources().iter().map(|s| (s.location, 1.0, s.moment)).collect();
    let (e, c) = sample(&dipoles, surface, ctx.k())?;
    CauchyData::new(
        surface.clone(),
        ctx,
        e,
        c,
        Provenance {
            generator: "point-sources".into(),
            source_hash: Some(sources.fingerprint()),
            quad_order: None,
            noise: None,
        },
    )
}

/// Field of homogeneous ball sources, `E(x) = Σ_j ∫_{D_j} 𝔾(x, y) p_j dy`,
/// integrated with [`ball_quadrature`].
pub fn synthesize_small_volume_data(
    balls: &[BallSource],
    surface: &MeasurementSurface,
    ctx: WaveContext,
    quad_order: usize,
) -> Result<CauchyData> {
    if quad_order < 2 {
        return Err(Error::config("quad_order", format!("must be at least 2, got {quad_order}")));
    }
    for (i, b) in balls.iter().enumerate() {
        let field = format!("balls[{i}]");
        b.validate(&field)?;
        check_placement(&b.center, b.radius, surface, Containment::Strict, &format!("{field}.center"))?;
        if b.radius > ctx.wavelength() / 4.0 {
            warn!(
                "ball {i} has radius {} above a quarter wavelength ({:.4})",
                b.radius,
                ctx.wavelength() / 4.0
            );
        }
        for (j, other) in balls.iter().enumerate().take(i) {
            if (b.center - other.center).norm() < b.radius + other.radius {
                return Err(Error::config("balls", format!("balls {j} and {i} overlap")));
            }
        }
    }
    let mut dipoles = Vec::new();
    for b in balls {
        for (y, w) in ball_quadrature(&b.center, b.radius, quad_order) {
            dipoles.push((y, w, b.vector));
        }
    }
    let (e, c) = sample(&dipoles, surface, ctx.k())?;
    CauchyData::new(
        surface.clone(),
        ctx,
        e,
        c,
        Provenance {
            generator: "small-volume".into(),
            source_hash: Some(BallSource::fingerprint(balls)),
            quad_order: Some(quad_order),
            noise: None,
        },
    )
}

fn check_placement(
    x: &RealVec3,
    radius: f64,
    surface: &MeasurementSurface,
    containment: Containment,
    field: &str,
) -> Result<()> {
    let r = (x - surface.center).norm();
    let tol = 1e-12 * surface.radius;
    if (r - surface.radius).abs() <= radius + tol {
        return Err(Error::config(field, "source touches the measurement surface"));
    }
    if containment == Containment::Strict && r + radius >= surface.radius {
        return Err(Error::config(
            field,
            format!("source at distance {r:.6} from the centre is outside the sphere of radius {}", surface.radius),
        ));
    }
    Ok(())
}

/// Weighted dipoles `(y, w, p)` sampled at every surface point.
fn sample(
    dipoles: &[(RealVec3, f64, ComplexVec3)],
    surface: &MeasurementSurface,
    k: f64,
) -> Result<(Vec<ComplexVec3>, Vec<ComplexVec3>)> {
    let rows: Vec<(ComplexVec3, ComplexVec3)> = surface
        .points
        .par_iter()
        .zip(surface.normals.par_iter())
        .map(|(x, nu)| {
            let mut e = ComplexVec3::zeros();
            let mut curl = ComplexVec3::zeros();
            for (y, w, p) in dipoles {
                let (f, c) = dipole_field(x, y, k, p)?;
                e += f * Complex64::from(*w);
                curl += c * Complex64::from(*w);
            }
            Ok((e, curl.cross(&nu.map(Into::into))))
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().unzip())
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=n {
                let m = m as f64;
                let p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Product rule on a ball: `order` Gauss–Legendre nodes in radius,
/// `2·order` in `cos φ` and `4·order` equispaced in `θ`. The angular part
/// integrates spherical harmonics up to degree `4·order - 1` exactly.
pub fn ball_quadrature(center: &RealVec3, radius: f64, order: usize) -> Vec<(RealVec3, f64)> {
    let (rn, rw) = gauss_legendre(order);
    let (tn, tw) = gauss_legendre(2 * order);
    let n_theta = 4 * order;
    let d_theta = 2.0 * PI / n_theta as f64;
    let mut out = Vec::with_capacity(order * 2 * order * n_theta);
    for (r, wr) in rn.iter().zip(&rw) {
        let r = 0.5 * radius * (r + 1.0);
        let wr = 0.5 * radius * wr * r * r;
        for (t, wt) in tn.iter().zip(&tw) {
            let st = (1.0 - t * t).sqrt();
            for j in 0..n_theta {
                let theta = (j as f64 + 0.5) * d_theta;
                let (s, c) = theta.sin_cos();
                let y = center + RealVec3::new(r * st * c, r * st * s, r * t);
                out.push((y, wr * wt * d_theta));
            }
        }
    }
    out
}

/// Exact volume integral of `𝔾(x, ·) p` over a ball not containing `x`:
/// the field of a point dipole at the centre with moment
/// `(4π/k³)(sin ka - ka cos ka) p`.
pub fn ball_equivalent_moment(ball: &BallSource, ctx: WaveContext) -> ComplexVec3 {
    let k = ctx.k();
    let u = k * ball.radius;
    ball.vector * Complex64::from(4.0 * PI / (k * k * k) * (u.sin() - u * u.cos()))
}
