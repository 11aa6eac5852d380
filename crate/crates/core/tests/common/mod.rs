#![allow(dead_code)]

use emsource::forward::{PointSource, SourceSet};
use emsource::kernels::WaveContext;
use emsource::{ComplexVec3, RealVec3};
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cv(v: [(f64, f64); 3]) -> ComplexVec3 {
    ComplexVec3::new(c(v[0].0, v[0].1), c(v[1].0, v[1].1), c(v[2].0, v[2].1))
}

pub fn real(v: [f64; 3]) -> ComplexVec3 {
    ComplexVec3::new(c(v[0], 0.0), c(v[1], 0.0), c(v[2], 0.0))
}

pub fn src(x: [f64; 3], p: ComplexVec3) -> PointSource {
    PointSource::new(RealVec3::from(x), p).unwrap()
}

pub fn k20() -> WaveContext {
    WaveContext::new(20.0).unwrap()
}

/// Three sources with comparable moments.
pub fn three_sources() -> SourceSet {
    SourceSet::new(vec![
        src([-0.9, 0.0, 1.0], real([-2.5, 4.0, -3.0])),
        src([-1.0, 0.75, -1.0], cv([(-1.0, 3.0), (5.0, 4.0), (3.0, 0.0)])),
        src([1.1, -0.3, -1.0], cv([(0.0, 4.5), (-5.0, 0.0), (3.0, -2.0)])),
    ])
}

/// Six sources with moment magnitudes spread over an order of magnitude.
pub fn six_sources() -> SourceSet {
    SourceSet::new(vec![
        src([-1.2, 0.0, -1.0], cv([(80.0, 11.0), (50.0, 16.0), (0.0, -32.0)])),
        src([0.6, -1.0, -1.0], cv([(12.0, -23.0), (35.0, 0.0), (3.0, 60.0)])),
        src([1.0, 0.5, 0.0], cv([(-6.0, 0.0), (7.0, 40.0), (-18.0, 5.0)])),
        src([-0.3, 0.0, 0.0], cv([(0.0, -5.0), (12.0, 0.0), (9.0, 14.0)])),
        src([-1.0, 0.8, 1.0], cv([(7.0, -26.0), (-2.0, 0.0), (8.0, 0.0)])),
        src([0.0, -1.0, 1.0], real([25.0, 10.0, 6.0])),
    ])
}

pub fn rel(a: &ComplexVec3, b: &ComplexVec3) -> f64 {
    (a - b).norm() / b.norm()
}
