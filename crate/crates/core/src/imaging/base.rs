//! The base functionals, evaluated for all three probe directions at once.
//!
//! Both functionals are linear in the probe `q`, so each is stored as the
//! complex 3-vector `V(z)` with `I(z, q) = q · V(z)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::forward::{CauchyData, SourceSet};
use crate::kernels::{im_green_apply, im_kernel_factors, WaveContext};
use crate::{ComplexVec3, Error, RealVec3, Result};

/// Which boundary functional the imaging fields are built on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseKind {
    /// `I(z, q)` built on `Im 𝔾`; valid for every `z`.
    #[default]
    Interior,
    /// `Î(z, q)` built on the conjugated Green's tensor; singular on the
    /// measurement surface.
    Conjugate,
}

/// A functional `z ↦ V(z)` with `I(z, q) = q · V(z)`.
pub trait BaseFunctional: Sync {
    fn vector(&self, z: &RealVec3) -> Result<ComplexVec3>;

    fn k(&self) -> f64;

    fn value(&self, z: &RealVec3, q: &RealVec3) -> Result<Complex64> {
        if q.norm() == 0.0 {
            return Err(Error::Argument("probe direction q must be nonzero".into()));
        }
        let v = self.vector(z)?;
        Ok(v.x * q.x + v.y * q.y + v.z * q.z)
    }
}

#[derive(Clone, Copy)]
struct Sample {
    x: [f64; 3],
    // w · (ν × E)
    f_re: [f64; 3],
    f_im: [f64; 3],
    // w · (curl E × ν)
    c_re: [f64; 3],
    c_im: [f64; 3],
}

/// Surface quadrature of either base functional over a dataset.
pub struct QuadratureBase {
    kind: BaseKind,
    k: f64,
    samples: Vec<Sample>,
    center: RealVec3,
    radius: f64,
    tolerance: f64,
}

fn split(v: &ComplexVec3, w: f64) -> ([f64; 3], [f64; 3]) {
    (
        [v.x.re * w, v.y.re * w, v.z.re * w],
        [v.x.im * w, v.y.im * w, v.z.im * w],
    )
}

#[inline]
fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl QuadratureBase {
    /// Precomputes the weighted data. For the conjugate functional, points
    /// closer than `λ/10` to the surface are rejected by [`Self::vector`].
    pub fn new(data: &CauchyData, kind: BaseKind) -> Self {
        Self::with_tolerance(data, kind, data.ctx.wavelength() / 10.0)
    }

    pub fn with_tolerance(data: &CauchyData, kind: BaseKind, tolerance: f64) -> Self {
        let s = &data.surface;
        let samples: Vec<Sample> = (0..data.len())
            .map(|i| {
                let nu = s.normals[i].map(Complex64::from);
                let f = nu.cross(&data.e[i]);
                let (f_re, f_im) = split(&f, s.weights[i]);
                let (c_re, c_im) = split(&data.curl_e_cross_nu[i], s.weights[i]);
                Sample {
                    x: s.points[i].into(),
                    f_re,
                    f_im,
                    c_re,
                    c_im,
                }
            })
            .collect();
        Self {
            kind,
            k: data.ctx.k(),
            samples,
            center: s.center,
            radius: s.radius,
            tolerance,
        }
    }

    pub fn kind(&self) -> BaseKind {
        self.kind
    }

    fn interior(&self, z: &RealVec3) -> ComplexVec3 {
        let k = self.k;
        let mut re = [0.0; 3];
        let mut im = [0.0; 3];
        for s in &self.samples {
            let w = [s.x[0] - z.x, s.x[1] - z.y, s.x[2] - z.z];
            let r = dot(&w, &w).sqrt();
            let (alpha, beta, gamma) = im_kernel_factors(r, k);
            let g = [gamma * w[0], gamma * w[1], gamma * w[2]];
            let fr = cross(&s.f_re, &g);
            let fi = cross(&s.f_im, &g);
            let br = beta * dot(&w, &s.c_re);
            let bi = beta * dot(&w, &s.c_im);
            for a in 0..3 {
                re[a] += fr[a] - (alpha * s.c_re[a] + br * w[a]);
                im[a] += fi[a] - (alpha * s.c_im[a] + bi * w[a]);
            }
        }
        ComplexVec3::from_fn(|a, _| Complex64::new(re[a], im[a]))
    }

    fn conjugate(&self, z: &RealVec3) -> ComplexVec3 {
        let k = self.k;
        let mut acc = ComplexVec3::zeros();
        for s in &self.samples {
            let w = RealVec3::new(s.x[0] - z.x, s.x[1] - z.y, s.x[2] - z.z);
            let r = w.norm();
            let u = w / r;
            let (sn, cs) = (k * r).sin_cos();
            // conj Φ
            let phi = Complex64::new(cs, -sn) / (4.0 * PI * r);
            let kr = k * r;
            let inv = 1.0 / kr;
            let inv2 = inv * inv;
            let a = phi * Complex64::new(1.0 - inv2, -inv);
            let b = phi * Complex64::new(-1.0 + 3.0 * inv2, 3.0 * inv);
            let grad = phi * Complex64::new(-1.0 / r, -k);
            let f = ComplexVec3::from_fn(|i, _| Complex64::new(s.f_re[i], s.f_im[i]));
            let c = ComplexVec3::from_fn(|i, _| Complex64::new(s.c_re[i], s.c_im[i]));
            let uc = u.map(Complex64::from);
            let g = uc * grad;
            let uc_dot_c = uc.dot(&c);
            acc += f.cross(&g) - (c * a + uc * (b * uc_dot_c));
        }
        acc * Complex64::new(0.0, 0.5)
    }
}

impl BaseFunctional for QuadratureBase {
    fn vector(&self, z: &RealVec3) -> Result<ComplexVec3> {
        match self.kind {
            BaseKind::Interior => Ok(self.interior(z)),
            BaseKind::Conjugate => {
                let d = ((z - self.center).norm() - self.radius).abs();
                if d <= self.tolerance {
                    return Err(Error::NearSurface {
                        x: z.x,
                        y: z.y,
                        z: z.z,
                        tolerance: self.tolerance,
                    });
                }
                Ok(self.conjugate(z))
            }
        }
    }

    fn k(&self) -> f64 {
        self.k
    }
}

/// `Σ_j p_j · Im 𝔾(x_j, z) q` from the source list, bypassing quadrature.
/// Used as a test oracle.
pub struct OracleBase {
    sources: SourceSet,
    ctx: WaveContext,
}

impl OracleBase {
    pub fn new(sources: SourceSet, ctx: WaveContext) -> Self {
        Self { sources, ctx }
    }
}

impl BaseFunctional for OracleBase {
    fn vector(&self, z: &RealVec3) -> Result<ComplexVec3> {
        let mut v = ComplexVec3::zeros();
        for s in self.sources.sources() {
            // Im 𝔾 is real symmetric, so p · (Im 𝔾 q) = q · (Im 𝔾 p) for the
            // real and imaginary parts of p separately.
            let re = im_green_apply(&s.location, z, self.ctx, &s.moment.map(|c| c.re));
            let im = im_green_apply(&s.location, z, self.ctx, &s.moment.map(|c| c.im));
            v += ComplexVec3::from_fn(|a, _| Complex64::new(re[a], im[a]));
        }
        Ok(v)
    }

    fn k(&self) -> f64 {
        self.ctx.k()
    }
}

/// `I(z, q)` by surface quadrature.
pub fn base_i(z: &RealVec3, q: &RealVec3, data: &CauchyData) -> Result<Complex64> {
    QuadratureBase::new(data, BaseKind::Interior).value(z, q)
}

/// `Î(z, q)` by surface quadrature; fails within `λ/10` of the surface.
pub fn base_i_hat(z: &RealVec3, q: &RealVec3, data: &CauchyData) -> Result<Complex64> {
    QuadratureBase::new(data, BaseKind::Conjugate).value(z, q)
}

/// `Σ_j p_j · Im 𝔾(x_j, z) q`.
pub fn oracle_base(z: &RealVec3, q: &RealVec3, sources: &SourceSet, ctx: WaveContext) -> Result<Complex64> {
    OracleBase::new(sources.clone(), ctx).value(z, q)
}

