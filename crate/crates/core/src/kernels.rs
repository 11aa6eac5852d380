//! Free-space kernels of the time-harmonic Maxwell system.
//!
//! The outgoing scalar Green's function is `Φ(x, y) = exp(ikR) / (4πR)` with
//! `R = |x - y|`, and the dyadic Green's tensor is
//!
//! ```text
//! 𝔾(x, y) = Φ I₃ + k⁻² ∇ₓ divₓ(Φ I₃)
//!         = Φ [(1 + i/kR - 1/k²R²) I₃ + (-1 - 3i/kR + 3/k²R²) ŵŵᵀ],   ŵ = (x - y)/R.
//! ```
//!
//! Only the imaginary part `Im 𝔾` enters the imaging functionals. It is an
//! entire function of `x - y`, so [`im_green_apply`] and
//! [`curl_im_green_apply`] are defined everywhere, with a series branch near
//! coincidence where the closed form cancels catastrophically.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{ComplexVec3, Error, RealVec3, Result};

/// Below this value of `k|x - y|` the imaginary-part kernels switch to their
/// Taylor expansions about coincidence.
pub const TAYLOR_SWITCH_KR: f64 = 1e-2;

/// Smallest separation at which the singular kernels are evaluated.
const MIN_SEPARATION: f64 = 1e-300;

const FRAC_1_4PI: f64 = 0.25 * std::f64::consts::FRAC_1_PI;

/// Wavenumber of the single-frequency problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct WaveContext {
    k: f64,
}

impl WaveContext {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::config("wave.k", format!("wavenumber must be positive and finite, got {k}")));
        }
        Ok(Self { k })
    }

    #[inline]
    pub fn k(&self) -> f64 {
        self.k
    }

    /// `λ = 2π / k`.
    #[inline]
    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.k
    }
}

impl TryFrom<f64> for WaveContext {
    type Error = Error;

    fn try_from(k: f64) -> Result<Self> {
        WaveContext::new(k)
    }
}

impl From<WaveContext> for f64 {
    fn from(ctx: WaveContext) -> f64 {
        ctx.k
    }
}

#[inline]
fn separation(x: &RealVec3, y: &RealVec3) -> Result<(RealVec3, f64)> {
    let w = x - y;
    let r = w.norm();
    if !(r > MIN_SEPARATION) {
        return Err(Error::Coincident { distance: r });
    }
    Ok((w, r))
}

#[inline]
fn phi_of_r(r: f64, k: f64) -> Complex64 {
    let (s, c) = (k * r).sin_cos();
    Complex64::new(c, s) / (4.0 * PI * r)
}

#[inline]
fn to_complex(v: &RealVec3) -> ComplexVec3 {
    v.map(Complex64::from)
}

/// `Φ(x, y) = exp(ik|x - y|) / (4π|x - y|)`.
pub fn scalar_green(x: &RealVec3, y: &RealVec3, ctx: WaveContext) -> Result<Complex64> {
    let (_, r) = separation(x, y)?;
    Ok(phi_of_r(r, ctx.k))
}

/// `∇ₓΦ(x, y) = Φ(R) (ik - 1/R) ŵ`.
pub fn grad_scalar_green(x: &RealVec3, y: &RealVec3, ctx: WaveContext) -> Result<ComplexVec3> {
    let (w, r) = separation(x, y)?;
    let radial = phi_of_r(r, ctx.k) * Complex64::new(-1.0 / r, ctx.k) / r;
    Ok(to_complex(&w) * radial)
}

/// The two scalar coefficients `(a, b)` of `𝔾 = a I₃ + b ŵŵᵀ`.
#[inline]
fn green_coefficients(r: f64, k: f64) -> (Complex64, Complex64) {
    let phi = phi_of_r(r, k);
    let kr = k * r;
    let inv = 1.0 / kr;
    let inv2 = inv * inv;
    let a = Complex64::new(1.0 - inv2, inv);
    let b = Complex64::new(-1.0 + 3.0 * inv2, -3.0 * inv);
    (phi * a, phi * b)
}

/// The full tensor `𝔾(x, y)` as a complex 3×3 matrix.
pub fn green_tensor(x: &RealVec3, y: &RealVec3, ctx: WaveContext) -> Result<Matrix3<Complex64>> {
    let (w, r) = separation(x, y)?;
    let (a, b) = green_coefficients(r, ctx.k);
    let u = w / r;
    let outer = (u * u.transpose()).map(Complex64::from);
    Ok(Matrix3::<f64>::identity().map(Complex64::from) * a + outer * b)
}

/// `𝔾(x, y) p`, the field at `x` of a point dipole at `y` with moment `p`.
pub fn green_tensor_apply(
    x: &RealVec3,
    y: &RealVec3,
    ctx: WaveContext,
    p: &ComplexVec3,
) -> Result<ComplexVec3> {
    let (w, r) = separation(x, y)?;
    let (a, b) = green_coefficients(r, ctx.k);
    let u = to_complex(&(w / r));
    let up = u.dot(p);
    Ok(p * a + u * (b * up))
}

/// `curlₓ(𝔾(x, y) p) = ∇ₓΦ × p`; the gradient-divergence part is curl-free.
pub fn curl_green_apply(
    x: &RealVec3,
    y: &RealVec3,
    ctx: WaveContext,
    p: &ComplexVec3,
) -> Result<ComplexVec3> {
    Ok(grad_scalar_green(x, y, ctx)?.cross(p))
}

/// `(𝔾(x, y) p, ∇ₓΦ × p)` sharing one evaluation of `Φ`.
#[inline]
pub(crate) fn dipole_field(
    x: &RealVec3,
    y: &RealVec3,
    k: f64,
    p: &ComplexVec3,
) -> Result<(ComplexVec3, ComplexVec3)> {
    let (w, r) = separation(x, y)?;
    let phi = phi_of_r(r, k);
    let inv = 1.0 / (k * r);
    let inv2 = inv * inv;
    let a = phi * Complex64::new(1.0 - inv2, inv);
    let b = phi * Complex64::new(-1.0 + 3.0 * inv2, -3.0 * inv);
    let u = to_complex(&(w / r));
    let field = p * a + u * (b * u.dot(p));
    let radial = phi * Complex64::new(-1.0 / r, k);
    Ok((field, (u * radial).cross(p)))
}

/// Coefficients `(α, β)` of `Im 𝔾(x, y) = α I₃ + β ŵŵᵀ` as functions of
/// `R = |x - y|`. Near coincidence the Taylor form is used and `β` is
/// returned already multiplied by `R²` (the caller multiplies by `wwᵀ`, not
/// `ŵŵᵀ`), which keeps both branches free of `1/R`.
#[inline]
pub(crate) fn im_green_coefficients(r: f64, k: f64) -> (f64, f64) {
    let kr = k * r;
    if kr < TAYLOR_SWITCH_KR {
        // (k/6π) q - (k³/60π)(2 q R² - w (q·w))
        let k3 = k * k * k / (60.0 * PI);
        (k / (6.0 * PI) - 2.0 * k3 * r * r, k3)
    } else {
        let (s, c) = kr.sin_cos();
        let j0 = s / kr;
        let tail = (j0 - c) / (kr * kr);
        let scale = k / (4.0 * PI);
        let alpha = scale * (j0 - tail);
        let beta = scale * (3.0 * tail - j0);
        (alpha, beta / (r * r))
    }
}

/// Radial factor `γ(R)` with `Im ∇ₓΦ = γ(R) (x - y)`.
#[inline]
pub(crate) fn im_grad_factor(r: f64, k: f64) -> f64 {
    let kr = k * r;
    if kr < TAYLOR_SWITCH_KR {
        // k (cos u - sin u / u) / (4πR²) with cos u - sin u/u = -u²/3 + u⁴/30 - ...
        let u2 = kr * kr;
        k * k * k * (-1.0 / 3.0 + u2 / 30.0) / (4.0 * PI)
    } else {
        let (s, c) = kr.sin_cos();
        (k * c - s / r) / (4.0 * PI * r * r)
    }
}

/// `(α, β, γ)` of [`im_green_coefficients`] and [`im_grad_factor`] from one
/// trigonometric evaluation.
#[inline]
pub(crate) fn im_kernel_factors(r: f64, k: f64) -> (f64, f64, f64) {
    let kr = k * r;
    if kr < TAYLOR_SWITCH_KR {
        let (a, b) = im_green_coefficients(r, k);
        (a, b, im_grad_factor(r, k))
    } else {
        let (s, c) = kr.sin_cos();
        let ir = 1.0 / r;
        let ikr = ir / k;
        let j0 = s * ikr;
        let tail = (j0 - c) * ikr * ikr;
        let scale = k * FRAC_1_4PI;
        let ir2 = ir * ir;
        (
            scale * (j0 - tail),
            scale * (3.0 * tail - j0) * ir2,
            (k * c - s * ir) * ir2 * FRAC_1_4PI,
        )
    }
}

/// `Im 𝔾(x, y) q` for real `q`. Defined for all `x, y`, including `x = y`
/// where it equals `(k/6π) q`.
pub fn im_green_apply(x: &RealVec3, y: &RealVec3, ctx: WaveContext, q: &RealVec3) -> RealVec3 {
    let w = x - y;
    let (alpha, beta) = im_green_coefficients(w.norm(), ctx.k);
    q * alpha + w * (beta * w.dot(q))
}

/// `Im 𝔾(x, y)` as a real symmetric matrix.
pub fn im_green_matrix(x: &RealVec3, y: &RealVec3, ctx: WaveContext) -> Matrix3<f64> {
    let w = x - y;
    let (alpha, beta) = im_green_coefficients(w.norm(), ctx.k);
    Matrix3::identity() * alpha + w * w.transpose() * beta
}

/// `curlₓ(Im 𝔾(x, y) q) = Im(∇ₓΦ) × q`. Vanishes at coincidence.
pub fn curl_im_green_apply(x: &RealVec3, y: &RealVec3, ctx: WaveContext, q: &RealVec3) -> RealVec3 {
    let w = x - y;
    let gamma = im_grad_factor(w.norm(), ctx.k);
    (w * gamma).cross(q)
}

/// `[Im 𝔾(x, x)]⁻¹ = (6π/k) I₃`, the probe that turns the base functional at
/// a source location into a moment component.
pub fn im_green_coincidence_inverse(ctx: WaveContext) -> Matrix3<f64> {
    Matrix3::identity() * (6.0 * PI / ctx.k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff;

    fn ctx() -> WaveContext {
        WaveContext::new(20.0).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn cnorm(v: &ComplexVec3) -> f64 {
        v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn scalar_green_at_one_wavelength_is_real() {
        let ctx = ctx();
        let x = RealVec3::new(0.1, -0.2, 0.3);
        let y = x + RealVec3::new(0.0, ctx.wavelength(), 0.0);
        let g = scalar_green(&x, &y, ctx).unwrap();
        assert!(rel(g.re, 10.0 / (4.0 * PI * PI)) < 1e-12);
        assert!((g.re - 0.253303).abs() < 1e-6);
        assert!(g.im.abs() < 1e-12);
    }

    #[test]
    fn scalar_green_is_symmetric_and_rejects_coincidence() {
        let ctx = ctx();
        let x = RealVec3::new(0.3, 0.1, -0.7);
        let y = RealVec3::new(-0.2, 0.4, 0.05);
        let a = scalar_green(&x, &y, ctx).unwrap();
        let b = scalar_green(&y, &x, ctx).unwrap();
        assert_eq!(a, b);
        assert!(matches!(scalar_green(&x, &x, ctx), Err(Error::Coincident { .. })));
        assert!(grad_scalar_green(&x, &x, ctx).is_err());
        assert!(green_tensor_apply(&x, &x, ctx, &ComplexVec3::zeros()).is_err());
    }

    #[test]
    fn im_scalar_green_vanishes_at_half_wavelength() {
        // Im Φ = (k/4π) j₀(kR); kR = π is a zero of j₀.
        let ctx = ctx();
        let x = RealVec3::zeros();
        let y = RealVec3::new(PI / ctx.k(), 0.0, 0.0);
        let g = scalar_green(&x, &y, ctx).unwrap();
        assert!(g.im.abs() < 1e-14);
    }

    #[test]
    fn gradient_is_radial_and_antisymmetric() {
        let ctx = ctx();
        let x = RealVec3::new(0.4, -0.1, 0.2);
        let y = RealVec3::new(-0.1, 0.3, -0.2);
        let g = grad_scalar_green(&x, &y, ctx).unwrap();
        let w = to_complex(&(x - y));
        assert!(cnorm(&g.cross(&w)) <= 1e-12 * cnorm(&g) * (x - y).norm());
        let swapped = grad_scalar_green(&y, &x, ctx).unwrap();
        assert!(cnorm(&(g + swapped)) < 1e-14 * cnorm(&g));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let ctx = ctx();
        let y = RealVec3::new(0.1, 0.2, -0.3);
        let x = y + RealVec3::new(0.3, -0.5, 0.4).normalize() * 0.7;
        let fd = diff::gradient_complex(|p| scalar_green(p, &y, ctx).unwrap(), &x, 1e-5);
        let g = grad_scalar_green(&x, &y, ctx).unwrap();
        assert!(cnorm(&(g - fd)) / cnorm(&g) < 1e-6);
    }

    #[test]
    fn green_tensor_is_linear_and_matches_its_definition() {
        let ctx = ctx();
        let y = RealVec3::new(-0.2, 0.1, 0.0);
        let x = y + RealVec3::new(1.0, 2.0, -2.0).normalize() * 0.9;
        let p = ComplexVec3::new(
            Complex64::new(1.0, -2.0),
            Complex64::new(0.5, 0.3),
            Complex64::new(-1.5, 0.7),
        );
        let gp = green_tensor_apply(&x, &y, ctx, &p).unwrap();
        let g2p = green_tensor_apply(&x, &y, ctx, &(p * Complex64::from(2.0))).unwrap();
        assert!(cnorm(&(g2p - gp * Complex64::from(2.0))) < 1e-15 * cnorm(&gp));

        // Φp + k⁻² ∇(∇Φ·p) with the Hessian of Φ by central differences.
        let hess = diff::hessian_complex(|p| scalar_green(p, &y, ctx).unwrap(), &x, 1e-4);
        let phi = scalar_green(&x, &y, ctx).unwrap();
        let fd = p * phi + hess * p / Complex64::from(ctx.k() * ctx.k());
        assert!(cnorm(&(gp - fd)) / cnorm(&gp) < 1e-5);

        let full = green_tensor(&x, &y, ctx).unwrap() * p;
        assert!(cnorm(&(full - gp)) < 1e-14 * cnorm(&gp));
    }

    #[test]
    fn green_tensor_solves_the_homogeneous_maxwell_system() {
        let ctx = ctx();
        let y = RealVec3::zeros();
        let x = RealVec3::new(0.5, -0.3, 0.6);
        let p = ComplexVec3::new(Complex64::new(1.0, 0.5), Complex64::new(-0.3, 0.0), Complex64::new(0.2, -1.0));
        let f = |pt: &RealVec3| green_tensor_apply(pt, &y, ctx, &p).unwrap();
        let cc = diff::curl_curl_complex(f, &x, 1e-3);
        let k2gp = f(&x) * Complex64::from(ctx.k() * ctx.k());
        assert!(cnorm(&(cc - k2gp)) <= 1e-3 * cnorm(&k2gp));
    }

    #[test]
    fn curl_green_matches_finite_differences() {
        let ctx = ctx();
        let y = RealVec3::new(0.0, 0.0, 0.2);
        let x = y + RealVec3::new(-1.0, 0.5, 0.25).normalize() * 1.1;
        let p = ComplexVec3::new(Complex64::new(0.0, 4.5), Complex64::new(-5.0, 0.0), Complex64::new(3.0, -2.0));
        let curl = curl_green_apply(&x, &y, ctx, &p).unwrap();
        let fd = diff::curl_complex(|pt| green_tensor_apply(pt, &y, ctx, &p).unwrap(), &x, 1e-5);
        assert!(cnorm(&(curl - fd)) / cnorm(&curl) < 1e-5);

        let w = to_complex(&(x - y));
        assert!(w.dot(&curl).norm() <= 1e-12 * cnorm(&curl) * (x - y).norm());

        let parallel = to_complex(&(x - y)) * Complex64::new(0.3, -1.2);
        let zero = curl_green_apply(&x, &y, ctx, &parallel).unwrap();
        assert!(cnorm(&zero) < 1e-15);
    }

    #[test]
    fn im_green_coincidence_limit() {
        let ctx = ctx();
        let x = RealVec3::new(0.3, 0.3, -0.1);
        let v = im_green_apply(&x, &x, ctx, &RealVec3::x());
        assert!((v.x - 1.061033).abs() < 1e-6);
        assert!(rel(v.x, ctx.k() / (6.0 * PI)) < 1e-15);
        assert_eq!((v.y, v.z), (0.0, 0.0));
    }

    #[test]
    fn im_green_is_imaginary_part_of_green_tensor() {
        let ctx = ctx();
        let y = RealVec3::new(0.2, -0.4, 0.1);
        let x = y + RealVec3::new(2.0, -1.0, 0.5).normalize() * 0.7;
        let q = RealVec3::new(0.3, -1.2, 0.8);
        let im = im_green_apply(&x, &y, ctx, &q);
        let full = green_tensor_apply(&x, &y, ctx, &to_complex(&q)).unwrap();
        let via_complex = full.map(|c| c.im);
        assert!((im - via_complex).norm() / via_complex.norm() < 1e-10);
    }

    #[test]
    fn im_green_branches_agree_at_the_switch() {
        let ctx = ctx();
        let q = RealVec3::new(0.4, -0.9, 0.2);
        let dir = RealVec3::new(1.0, 1.0, -0.5).normalize();
        let r = TAYLOR_SWITCH_KR / ctx.k();
        let below = im_green_apply(&(dir * r * (1.0 - 1e-9)), &RealVec3::zeros(), ctx, &q);
        let above = im_green_apply(&(dir * r * (1.0 + 1e-9)), &RealVec3::zeros(), ctx, &q);
        assert!((below - above).norm() / above.norm() < 1e-8);
    }

    #[test]
    fn taylor_remainder_is_fourth_order() {
        let ctx = ctx();
        let k = ctx.k();
        let q = RealVec3::new(1.0, 0.5, -0.3);
        let dir = RealVec3::new(0.2, -0.7, 0.4).normalize();
        let mut worst: f64 = 0.0;
        for i in 1..=50 {
            let kr = 0.5 * i as f64 / 50.0;
            let w = dir * (kr / k);
            let closed = {
                let (s, c) = kr.sin_cos();
                let j0 = s / kr;
                let r2 = w.norm_squared();
                let qw = q.dot(&w);
                (q * r2 - w * qw) * (k * j0 / (4.0 * PI * r2))
                    + (w * (3.0 * qw) - q * r2) * ((j0 - c) / (4.0 * PI * k * r2 * r2))
            };
            let taylor = q * (k / (6.0 * PI))
                - (q * (2.0 * w.norm_squared()) - w * w.dot(&q)) * (k.powi(3) / (60.0 * PI));
            worst = worst.max((closed - taylor).norm() / w.norm().powi(4));
        }
        // Bounded by a modest multiple of k⁵ / (840π) |q|.
        assert!(worst < k.powi(5) * q.norm() / 100.0, "{worst}");
    }

    #[test]
    fn curl_im_green_matches_finite_differences_and_vanishes_at_coincidence() {
        let ctx = ctx();
        let y = RealVec3::new(0.0, 0.1, 0.0);
        let x = y + RealVec3::new(0.1, 0.9, -0.4).normalize() * 0.8;
        let q = RealVec3::new(-0.5, 0.2, 1.0);
        let curl = curl_im_green_apply(&x, &y, ctx, &q);
        let fd = diff::curl_real(|pt| im_green_apply(pt, &y, ctx, &q), &x, 1e-5);
        assert!((curl - fd).norm() / curl.norm() < 1e-5);
        assert!((x - y).dot(&curl).abs() <= 1e-12 * curl.norm() * (x - y).norm());

        // Leading order -k³R/(12π) ŵ × q: linear in R, so 2e-4|q| at R = 1e-6.
        let k = ctx.k();
        for r in [1e-6, 1e-9] {
            let w = RealVec3::new(1.0, 0.0, 0.0) * r;
            let lead = w.cross(&q) * (-k.powi(3) / (12.0 * PI));
            let got = curl_im_green_apply(&(y + w), &y, ctx, &q);
            assert!((got - lead).norm() <= 1e-6 * lead.norm());
        }
        let near = y + RealVec3::new(1e-12, 0.0, 0.0);
        assert!(curl_im_green_apply(&near, &y, ctx, &q).norm() <= 1e-8);
        assert_eq!(curl_im_green_apply(&y, &y, ctx, &q), RealVec3::zeros());
    }

    #[test]
    fn im_green_decays_like_inverse_distance() {
        let ctx = ctx();
        let lambda = ctx.wavelength();
        let q = RealVec3::new(1.0, -2.0, 0.5);
        let dir = RealVec3::new(0.3, 0.4, 0.866).normalize();
        let envelope = (0..=200)
            .map(|i| {
                let r = lambda * (5.0 + 95.0 * i as f64 / 200.0);
                im_green_apply(&(dir * r), &RealVec3::zeros(), ctx, &q).norm() * r
            })
            .fold(0.0_f64, f64::max);
        // R·Im𝔾q → sin(kR)(q - (q·ŵ)ŵ)/4π, plus O(1/kR) near-field terms.
        assert!(envelope <= q.norm() / (4.0 * PI) * 1.1, "{envelope}");
    }

    #[test]
    fn coincidence_inverse() {
        let ctx = ctx();
        let inv = im_green_coincidence_inverse(ctx);
        assert!((inv[(0, 0)] - 0.942478).abs() < 1e-6);
        let prod = inv * (Matrix3::identity() * (ctx.k() / (6.0 * PI)));
        assert!((prod - Matrix3::identity()).abs().max() < 1e-14);
        let x = RealVec3::new(-0.5, 0.0, 0.5);
        for i in 0..3 {
            let e = RealVec3::ith(i, 1.0);
            let back = im_green_apply(&x, &x, ctx, &(inv * e));
            assert!((back - e).norm() < 1e-14);
        }
    }
}
