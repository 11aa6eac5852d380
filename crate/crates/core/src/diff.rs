//! Central finite differences of scalar and vector fields on R³.
//!
//! These are the independent oracles behind the kernel self-checks: they only
//! ever call the function being differentiated and never share code with the
//! closed-form kernels.

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::{ComplexVec3, RealVec3};

fn axis(i: usize, h: f64) -> RealVec3 {
    RealVec3::ith(i, h)
}

/// Gradient of a complex scalar field, second-order central differences.
pub fn gradient_complex<F>(f: F, x: &RealVec3, h: f64) -> ComplexVec3
where
    F: Fn(&RealVec3) -> Complex64,
{
    ComplexVec3::from_fn(|i, _| (f(&(x + axis(i, h))) - f(&(x - axis(i, h)))) / (2.0 * h))
}

/// Hessian of a complex scalar field.
pub fn hessian_complex<F>(f: F, x: &RealVec3, h: f64) -> Matrix3<Complex64>
where
    F: Fn(&RealVec3) -> Complex64,
{
    let f0 = f(x);
    Matrix3::from_fn(|i, j| {
        if i == j {
            (f(&(x + axis(i, h))) - f0 * 2.0 + f(&(x - axis(i, h)))) / (h * h)
        } else {
            let (ei, ej) = (axis(i, h), axis(j, h));
            (f(&(x + ei + ej)) - f(&(x + ei - ej)) - f(&(x - ei + ej)) + f(&(x - ei - ej)))
                / (4.0 * h * h)
        }
    })
}

/// Jacobian `J[(i, j)] = ∂F_i / ∂x_j` of a complex vector field.
pub fn jacobian_complex<F>(f: F, x: &RealVec3, h: f64) -> Matrix3<Complex64>
where
    F: Fn(&RealVec3) -> ComplexVec3,
{
    let mut jac = Matrix3::zeros();
    for j in 0..3 {
        let d = (f(&(x + axis(j, h))) - f(&(x - axis(j, h)))) / Complex64::from(2.0 * h);
        jac.set_column(j, &d);
    }
    jac
}

fn curl_from_jacobian<T: nalgebra::Scalar + std::ops::Sub<Output = T> + Copy>(
    j: &Matrix3<T>,
) -> nalgebra::Vector3<T> {
    nalgebra::Vector3::new(
        j[(2, 1)] - j[(1, 2)],
        j[(0, 2)] - j[(2, 0)],
        j[(1, 0)] - j[(0, 1)],
    )
}

pub fn curl_complex<F>(f: F, x: &RealVec3, h: f64) -> ComplexVec3
where
    F: Fn(&RealVec3) -> ComplexVec3,
{
    curl_from_jacobian(&jacobian_complex(f, x, h))
}

pub fn curl_real<F>(f: F, x: &RealVec3, h: f64) -> RealVec3
where
    F: Fn(&RealVec3) -> RealVec3,
{
    let mut jac = Matrix3::<f64>::zeros();
    for j in 0..3 {
        let d = (f(&(x + axis(j, h))) - f(&(x - axis(j, h)))) / (2.0 * h);
        jac.set_column(j, &d);
    }
    curl_from_jacobian(&jac)
}

/// `curl curl F = ∇(div F) - ΔF` from second differences of each component.
pub fn curl_curl_complex<F>(f: F, x: &RealVec3, h: f64) -> ComplexVec3
where
    F: Fn(&RealVec3) -> ComplexVec3,
{
    let hessians: Vec<Matrix3<Complex64>> = (0..3)
        .map(|c| hessian_complex(|p| f(p)[c], x, h))
        .collect();
    ComplexVec3::from_fn(|i, _| {
        let grad_div: Complex64 = (0..3).map(|c| hessians[c][(i, c)]).sum();
        let laplace: Complex64 = (0..3).map(|d| hessians[i][(d, d)]).sum();
        grad_div - laplace
    })
}

/// Real-valued variant of [`curl_curl_complex`].
pub fn curl_curl_real<F>(f: F, x: &RealVec3, h: f64) -> RealVec3
where
    F: Fn(&RealVec3) -> RealVec3,
{
    let c = curl_curl_complex(|p| f(p).map(Complex64::from), x, h);
    c.map(|v| v.re)
}
