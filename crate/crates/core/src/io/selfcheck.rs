use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diff;
use crate::forward::build_sphere_surface;
use crate::kernels::{
    curl_green_apply, curl_im_green_apply, grad_scalar_green, green_tensor_apply, im_green_apply, scalar_green,
    WaveContext, TAYLOR_SWITCH_KR,
};
use crate::{ComplexVec3, RealVec3};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn row(name: &str, residual: f64, tolerance: f64) -> CheckRow {
    CheckRow {
        name: name.into(),
        residual,
        tolerance,
        passed: residual <= tolerance,
    }
}

fn cnorm(v: &ComplexVec3) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// True if `p` satisfies at least one of `8pᵢ² > Σ_{j≠i} pⱼ²`.
pub fn has_dominant_component(p: &RealVec3) -> bool {
    let sq = p.map(|x| x * x);
    let total = sq.sum();
    (0..3).any(|i| 8.0 * sq[i] - (total - sq[i]) > 0.0)
}

/// Kernel identities, finite-difference oracles and quadrature sums at
/// `k = 20`.
pub fn run_selfcheck() -> Vec<CheckRow> {
    let ctx = WaveContext::new(20.0).expect("positive wavenumber");
    let k = ctx.k();
    let mut rows = Vec::new();

    let x = RealVec3::new(0.3, -0.2, 0.7);
    let worst = (0..3)
        .map(|i| {
            let e = RealVec3::ith(i, 1.0);
            (im_green_apply(&x, &x, ctx, &e) - e * (k / (6.0 * PI))).norm() / (k / (6.0 * PI))
        })
        .fold(0.0, f64::max);
    rows.push(row("coincidence Im G(x,x) = k/6pi", worst, 1e-10));

    let q = RealVec3::new(0.4, -0.9, 0.2);
    let dir = RealVec3::new(1.0, 1.0, -0.5).normalize();
    let r = TAYLOR_SWITCH_KR / k;
    let below = im_green_apply(&(dir * r * (1.0 - 1e-9)), &RealVec3::zeros(), ctx, &q);
    let above = im_green_apply(&(dir * r * (1.0 + 1e-9)), &RealVec3::zeros(), ctx, &q);
    rows.push(row("Taylor/closed branch agreement", (below - above).norm() / above.norm(), 1e-8));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut sym: f64 = 0.0;
    for _ in 0..100 {
        let a = RealVec3::from_fn(|_, _| rng.random_range(-1.5..1.5));
        let b = RealVec3::from_fn(|_, _| rng.random_range(-1.5..1.5));
        let q = RealVec3::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let u = im_green_apply(&a, &b, ctx, &q);
        let v = im_green_apply(&b, &a, ctx, &q);
        sym = sym.max((u - v).norm() / u.norm().max(f64::MIN_POSITIVE));
    }
    rows.push(row("symmetry Im G(x,y) = Im G(y,x)", sym, 1e-13));

    let y = RealVec3::new(0.1, 0.2, -0.3);
    let x = y + RealVec3::new(0.3, -0.5, 0.4).normalize() * 0.7;
    let g = grad_scalar_green(&x, &y, ctx).unwrap();
    let fd = diff::gradient_complex(|p| scalar_green(p, &y, ctx).unwrap(), &x, 1e-5);
    rows.push(row("grad Phi vs finite differences", cnorm(&(g - fd)) / cnorm(&g), 1e-5));

    let p = ComplexVec3::new(Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.3), Complex64::new(-1.5, 0.7));
    let gp = green_tensor_apply(&x, &y, ctx, &p).unwrap();
    let hess = diff::hessian_complex(|pt| scalar_green(pt, &y, ctx).unwrap(), &x, 1e-4);
    let phi = scalar_green(&x, &y, ctx).unwrap();
    let fd = p * phi + hess * p / Complex64::from(k * k);
    rows.push(row("G p vs Phi p + k^-2 grad div", cnorm(&(gp - fd)) / cnorm(&gp), 1e-5));

    let curl = curl_green_apply(&x, &y, ctx, &p).unwrap();
    let fd = diff::curl_complex(|pt| green_tensor_apply(pt, &y, ctx, &p).unwrap(), &x, 1e-5);
    rows.push(row("curl G p vs finite differences", cnorm(&(curl - fd)) / cnorm(&curl), 1e-5));

    let qr = RealVec3::new(-0.5, 0.2, 1.0);
    let curl = curl_im_green_apply(&x, &y, ctx, &qr);
    let fd = diff::curl_real(|pt| im_green_apply(pt, &y, ctx, &qr), &x, 1e-5);
    rows.push(row("curl Im G q vs finite differences", (curl - fd).norm() / curl.norm(), 1e-5));

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = 0usize;
    let mut n = 0;
    while n < 1000 {
        let p = RealVec3::from_fn(|_, _| rng.random_range(-10.0..10.0));
        if p.norm() == 0.0 {
            continue;
        }
        n += 1;
        bad += usize::from(!has_dominant_component(&p));
    }
    rows.push(row("dominant component, 1000 random p", bad as f64, 0.0));

    let rho = 25.0;
    let surface = build_sphere_surface(RealVec3::zeros(), rho, 100, 100).expect("valid surface");
    let area = 4.0 * PI * rho * rho;
    rows.push(row("surface weights sum to 4 pi rho^2", (surface.total_weight() - area).abs() / area, 1e-3));
    rows
}

pub fn format_report(rows: &[CheckRow]) -> String {
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    let _ = writeln!(s, "{:width$}  {:>11}  {:>9}  result", "check", "residual", "tolerance");
    for r in rows {
        let _ = writeln!(
            s,
            "{:width$}  {:>11.3e}  {:>9.1e}  {}",
            r.name,
            r.residual,
            r.tolerance,
            if r.passed { "pass" } else { "FAIL" }
        );
    }
    s
}
