//! Boundary-integral base functionals and the imaging fields built on them.

mod base;
mod field;
mod grid;

pub use base::{base_i, base_i_hat, oracle_base, BaseFunctional, BaseKind, OracleBase, QuadratureBase};
pub use field::{
    deflated_base, deflated_vector, field_value, imaging_field, DeflationTerm, FieldEvaluator, ImagingSpec,
    ScalarField, Variant,
};
pub use grid::SamplingGrid;
