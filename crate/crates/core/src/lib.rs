//! Reconstruction of electromagnetic point and small-volume sources from
//! single-frequency Cauchy data on a closed measurement sphere.
//!
//! The crate is organised bottom-up:
//!
//! - [`kernels`]: closed-form free-space Green's functions and the
//!   imaginary-part kernels the imaging functionals are built from.
//! - [`forward`]: measurement surfaces, synthetic Cauchy data and noise.
//! - [`imaging`]: the boundary-integral base functionals and imaging fields
//!   over sampling grids.
//! - [`reconstruct`]: peak detection, moment recovery and the deflation loop.
//! - [`io`]: configuration, persistence and field export used by the CLI.
//!
//! ```
//! use emsource::forward::{build_sphere_surface, synthesize_point_source_data, PointSource, SourceSet};
//! use emsource::kernels::WaveContext;
//! use emsource::{ComplexVec3, RealVec3};
//! use num_complex::Complex64;
//!
//! let ctx = WaveContext::new(20.0).unwrap();
//! let surface = build_sphere_surface(RealVec3::zeros(), 25.0, 20, 20).unwrap();
//! let source = PointSource::new(
//!     RealVec3::new(0.1, 0.0, -0.2),
//!     ComplexVec3::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(0.0, 0.0)),
//! )
//! .unwrap();
//! let data = synthesize_point_source_data(&SourceSet::new(vec![source]), &surface, ctx).unwrap();
//! assert_eq!(data.e.len(), 400);
//! ```

pub mod diff;
pub mod error;
pub mod forward;
pub mod imaging;
pub mod io;
pub mod kernels;
pub mod reconstruct;
pub(crate) mod serde_cvec;

pub use error::{Error, Result};

pub type RealVec3 = nalgebra::Vector3<f64>;
pub type ComplexVec3 = nalgebra::Vector3<num_complex::Complex64>;
