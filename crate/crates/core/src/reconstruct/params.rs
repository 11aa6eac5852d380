use serde::{Deserialize, Serialize};

use crate::imaging::SamplingGrid;
use crate::kernels::WaveContext;
use crate::{Error, Result};

/// When to zero the field around already accepted sources before the next
/// peak scan.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaskPolicy {
    Off,
    /// On from the first round whose strongest value is weaker than the
    /// first round's by [`ReconstructionParams::mask_ratio`] or more in
    /// moment magnitude.
    #[default]
    Auto,
    On,
}

/// How sampling points are visited.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchParams {
    /// Evaluate every grid point instead of a coarse pass plus local
    /// refinement.
    pub dense: bool,
    /// Coarse lattice keeps every `coarse_stride`-th fine point per axis.
    pub coarse_stride: usize,
    /// Half-width, in coarse cells, of the fine window around each candidate.
    /// The window is re-centred while its maximum sits on its boundary.
    pub refine_cells: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            dense: false,
            coarse_stride: 4,
            refine_cells: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconstructionParams {
    /// Peaks below `eta` times the field maximum are ignored.
    pub eta: f64,
    /// Peaks within `gamma` of the round's largest are accepted together.
    pub gamma: f64,
    /// Minimum distance between peaks; default half a wavelength.
    pub min_sep: Option<f64>,
    /// Stop when the strongest non-residual peak, in moment-magnitude scale
    /// `(peak_n / max_1)^(1/s)`, falls below this fraction.
    pub tau_stop: f64,
    pub max_rounds: usize,
    /// Re/im pairing distance; default three fine grid steps.
    pub merge_radius: Option<f64>,
    pub mask: MaskPolicy,
    /// Default half a wavelength.
    pub mask_radius: Option<f64>,
    /// Magnitude ratio that switches [`MaskPolicy::Auto`] on.
    pub mask_ratio: f64,
    /// A later peak within `residual_radius` of an accepted source is taken
    /// as that source's deflation residual when its magnitude
    /// `value^(1/s)` is below `residual_ratio` times the source's. Default
    /// one wavelength.
    pub residual_radius: Option<f64>,
    pub residual_ratio: f64,
    pub search: SearchParams,
}

impl Default for ReconstructionParams {
    fn default() -> Self {
        Self {
            eta: 0.2,
            gamma: 0.5,
            min_sep: None,
            tau_stop: 0.05,
            max_rounds: 8,
            merge_radius: None,
            mask: MaskPolicy::Auto,
            mask_radius: None,
            mask_ratio: 6.0,
            residual_radius: None,
            residual_ratio: 0.25,
            search: SearchParams::default(),
        }
    }
}

/// Parameters with every length made concrete.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedParams {
    pub eta: f64,
    pub gamma: f64,
    pub min_sep: f64,
    pub tau_stop: f64,
    pub max_rounds: usize,
    pub merge_radius: f64,
    pub mask: MaskPolicy,
    pub mask_radius: f64,
    pub mask_ratio: f64,
    pub residual_radius: f64,
    pub residual_ratio: f64,
    pub search: SearchParams,
}

impl ReconstructionParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("reconstruction.eta", self.eta),
            ("reconstruction.gamma", self.gamma),
            ("reconstruction.tau_stop", self.tau_stop),
            ("reconstruction.residual_ratio", self.residual_ratio),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::config(name, format!("must lie in (0, 1), got {v}")));
            }
        }
        for (name, v) in [
            ("reconstruction.min_sep", self.min_sep),
            ("reconstruction.merge_radius", self.merge_radius),
            ("reconstruction.mask_radius", self.mask_radius),
            ("reconstruction.residual_radius", self.residual_radius),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::config(name, format!("must be positive, got {v}")));
                }
            }
        }
        if self.max_rounds == 0 {
            return Err(Error::config("reconstruction.max_rounds", "must be at least 1"));
        }
        if !(self.mask_ratio > 1.0) {
            return Err(Error::config("reconstruction.mask_ratio", "must exceed 1"));
        }
        if self.search.coarse_stride == 0 {
            return Err(Error::config("reconstruction.search.coarse_stride", "must be positive"));
        }
        if self.search.refine_cells == 0 {
            return Err(Error::config("reconstruction.search.refine_cells", "must be positive"));
        }
        Ok(())
    }

    pub fn resolve(&self, ctx: WaveContext, grid: &SamplingGrid) -> Result<ResolvedParams> {
        self.validate()?;
        let lambda = ctx.wavelength();
        let step = grid.step().max();
        Ok(ResolvedParams {
            eta: self.eta,
            gamma: self.gamma,
            min_sep: self.min_sep.unwrap_or(lambda / 2.0),
            tau_stop: self.tau_stop,
            max_rounds: self.max_rounds,
            merge_radius: self.merge_radius.unwrap_or(3.0 * step),
            mask: self.mask,
            mask_radius: self.mask_radius.unwrap_or(lambda / 2.0),
            mask_ratio: self.mask_ratio,
            residual_radius: self.residual_radius.unwrap_or(lambda),
            residual_ratio: self.residual_ratio,
            search: self.search,
        })
    }
}
