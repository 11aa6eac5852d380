//! Measurement surfaces, synthetic Cauchy data and the noise model.

mod data;
mod noise;
mod sources;
mod surface;
mod synthesis;

pub use data::{stacked_norm, CauchyData, NoiseRecord, Provenance, NOISE_RNG};
pub use noise::add_noise;
pub use sources::{BallSource, PointSource, SourceSet};
pub use surface::{build_sphere_surface, MeasurementSurface, SurfaceSpec};
pub use synthesis::{
    ball_equivalent_moment, ball_quadrature, gauss_legendre, synthesize_point_source_data,
    synthesize_point_source_data_with, synthesize_small_volume_data, Containment,
    DEFAULT_QUAD_ORDER,
};
