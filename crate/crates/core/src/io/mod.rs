//! Configuration, dataset and result files, field export and the kernel
//! self-check.

mod config;
mod dataset;
mod export;
mod result;
mod selfcheck;

pub use config::{
    parse_config, parse_config_str, ExperimentConfig, GridConfig, ImagingConfig, NoiseConfig, OutputConfig,
    SurfaceConfig, WaveConfig,
};
pub use dataset::{
    cauchy_csv, read_dataset, sha256_hex, write_dataset, write_json, DatasetFiles, DatasetMetadata, CSV_HEADER, DATA_FORMAT,
};
#[cfg(feature = "png")]
pub use export::write_plane_png;
pub use export::{plane_field, plane_indices, read_vtk, slice_field, write_plane_csv, write_vtk, Plane, PlaneSlice};
pub use result::{
    check_data_matches, compare_with_truth, format_complex3, reconstruct_document, format_real3, human_table, parse_complex, truth_of, DataSummary,
    ErrorReport, ResultDocument, RunStats, SourceError, TruthSource, FLAG_DISTANCE, RESULT_FORMAT,
};
pub use selfcheck::{format_report, has_dominant_component, run_selfcheck, CheckRow};
