//! Peak detection, the deflation loop for the real and imaginary moment
//! parts, and merging them into complex moments.

mod deflation;
mod merge;
mod params;
mod peaks;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use deflation::{deflation_loop_with, first_round_max, values_at, PartEntry, PartResult, RoundDiagnostics, StopReason};
pub use merge::{merge_re_im, RecoveredSource, SourceProvenance};
pub use params::{MaskPolicy, ReconstructionParams, ResolvedParams, SearchParams};
pub use peaks::{detect_peaks, group_dominant, Peak};

use crate::forward::CauchyData;
use crate::imaging::{deflated_base, BaseKind, DeflationTerm, FieldEvaluator, ImagingSpec, SamplingGrid, Variant};
use crate::{RealVec3, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceMode {
    #[default]
    Point,
    /// Also report unit directions and magnitudes.
    SmallVolume,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub sources: Vec<RecoveredSource>,
    pub rounds_re: Vec<RoundDiagnostics>,
    pub rounds_im: Vec<RoundDiagnostics>,
    pub stop_re: StopReason,
    pub stop_im: StopReason,
    pub base: BaseKind,
    pub s: u32,
    pub mode: SourceMode,
    pub params: ResolvedParams,
    /// Base-functional evaluations over both parts.
    pub evaluations: u64,
}

impl Reconstruction {
    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    /// False if either part stopped on `max_rounds`.
    pub fn converged(&self) -> bool {
        self.stop_re != StopReason::MaxRounds && self.stop_im != StopReason::MaxRounds
    }
}

/// `(p)ᵢ` estimated at `x_hat`: the selected projection of the deflated base
/// with probe `(6π/k) eᵢ`. `axis` is 1-based.
pub fn recover_moment_component(
    x_hat: &RealVec3,
    axis: usize,
    data: &CauchyData,
    terms: &[DeflationTerm],
    kind: BaseKind,
    variant: Variant,
) -> Result<f64> {
    Ok(6.0 * PI / data.ctx.k() * deflated_base(x_hat, axis, data, terms, kind, variant)?)
}

/// Deflation for one projection of `data` on `grid`.
pub fn deflation_loop(
    data: &CauchyData,
    grid: &SamplingGrid,
    spec: &ImagingSpec,
    params: &ReconstructionParams,
) -> Result<PartResult> {
    let resolved = params.resolve(data.ctx, grid)?;
    let ev = FieldEvaluator::from_data(data, spec.base, *grid)?;
    deflation_loop_with(&ev, spec, &resolved, None)
}

/// Both parts over a shared evaluator, merged.
pub fn reconstruct_with(
    ev: &FieldEvaluator,
    base: BaseKind,
    s: u32,
    params: &ResolvedParams,
    mode: SourceMode,
) -> Result<Reconstruction> {
    let re_spec = ImagingSpec::new(base, Variant::RealPart, s)?;
    let im_spec = ImagingSpec::new(base, Variant::ImagPart, s)?;
    let re_max = first_round_max(ev, &re_spec, params, None)?;
    let reference = re_max.max(first_round_max(ev, &im_spec, params, Some(re_max))?);
    let re = deflation_loop_with(ev, &re_spec, params, Some(reference))?;
    let im = deflation_loop_with(ev, &im_spec, params, Some(reference))?;
    let mut sources = merge_re_im(&re.entries, &im.entries, params.merge_radius);
    if mode == SourceMode::SmallVolume {
        for src in &mut sources {
            let m = src.moment.norm();
            src.magnitude = Some(m);
            src.direction = (m > 0.0).then(|| src.moment.unscale(m));
        }
    }
    Ok(Reconstruction {
        sources,
        rounds_re: re.rounds,
        rounds_im: im.rounds,
        stop_re: re.stop,
        stop_im: im.stop,
        base,
        s,
        mode,
        params: *params,
        evaluations: ev.evaluations(),
    })
}

/// Locations and complex moments of the sources behind `data`.
pub fn reconstruct_sources(
    data: &CauchyData,
    grid: &SamplingGrid,
    base: BaseKind,
    s: u32,
    params: &ReconstructionParams,
    mode: SourceMode,
) -> Result<Reconstruction> {
    let resolved = params.resolve(data.ctx, grid)?;
    let ev = FieldEvaluator::from_data(data, base, *grid)?;
    reconstruct_with(&ev, base, s, &resolved, mode)
}
