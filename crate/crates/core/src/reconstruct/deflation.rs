use std::f64::consts::PI;

use log::{debug, info};
use serde::{Deserialize, Serialize};

use super::params::{MaskPolicy, ResolvedParams};
use super::peaks::{is_local_max, merge_close, sort_desc, Peak};
use crate::imaging::{field_value, DeflationTerm, FieldEvaluator, ImagingSpec, SamplingGrid, Variant};
use crate::{Error, RealVec3, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// The first field is identically zero.
    ZeroField,
    /// The round maximum fell below the stopping fraction.
    BelowThreshold,
    /// No admissible peaks remained.
    NoPeaks,
    /// `max_rounds` rounds accepted sources; the result may be partial.
    MaxRounds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundDiagnostics {
    pub round: usize,
    pub field_max: f64,
    /// `(field_max / reference)^(1/s)`, the reference being the first-round
    /// maximum.
    pub magnitude_ratio: f64,
    /// The same ratio for the strongest peak that is not a residual of an
    /// accepted source; compared against `tau_stop`.
    pub peak_ratio: f64,
    pub mask_active: bool,
    pub peaks: Vec<Peak>,
    pub accepted: Vec<DeflationTerm>,
    pub deferred: usize,
    /// Field value at each accepted location before and after subtracting
    /// that round's terms.
    pub before: Vec<f64>,
    pub after: Vec<f64>,
    /// Cumulative base-functional evaluations at the end of the round.
    pub evaluations: u64,
}

/// One recovered real or imaginary moment part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartEntry {
    pub location: RealVec3,
    pub part: RealVec3,
    pub round: usize,
    pub peak_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartResult {
    pub variant: Variant,
    pub entries: Vec<PartEntry>,
    pub rounds: Vec<RoundDiagnostics>,
    pub stop: StopReason,
}

impl PartResult {
    pub fn terms(&self) -> Vec<DeflationTerm> {
        self.entries
            .iter()
            .map(|e| DeflationTerm {
                location: e.location,
                part: e.part,
            })
            .collect()
    }

    pub fn converged(&self) -> bool {
        self.stop != StopReason::MaxRounds
    }
}

/// Zeroes values within `radius` of any of `centers`.
struct Mask<'a> {
    centers: &'a [RealVec3],
    radius: f64,
}

impl Mask<'_> {
    fn apply(&self, grid: &SamplingGrid, indices: &[usize], values: &mut [f64]) {
        if self.centers.is_empty() {
            return;
        }
        for (i, v) in indices.iter().zip(values.iter_mut()) {
            let p = grid.point(*i);
            if self.centers.iter().any(|c| (p - c).norm() < self.radius) {
                *v = 0.0;
            }
        }
    }
}

/// Smallest field value worth refining: anything below cannot clear
/// `tau_stop` against `reference`, even when the nearest coarse node sits
/// half a coarse cell off the peak. The amplitude there is taken as half the
/// envelope `sin(kr)/kr`; grids too coarse for that bound get no floor.
fn candidate_floor(ev: &FieldEvaluator, params: &ResolvedParams, s: u32, reference: Option<f64>) -> f64 {
    let Some(r) = reference else { return 0.0 };
    if params.search.dense {
        return 0.0;
    }
    let kr = ev.ctx().k() * 0.5 * params.search.coarse_stride as f64 * ev.grid().step().norm();
    let envelope = if kr > 0.0 { kr.sin() / kr } else { 1.0 };
    if envelope < 0.2 {
        return 0.0;
    }
    r * (0.5 * envelope * params.tau_stop).powi(s as i32)
}

struct Scan {
    max: f64,
    peaks: Vec<Peak>,
}

fn scan(
    ev: &FieldEvaluator,
    spec: &ImagingSpec,
    terms: &[DeflationTerm],
    params: &ResolvedParams,
    mask: &Mask,
    round: usize,
    floor: f64,
) -> Result<Scan> {
    let grid = *ev.grid();
    let (max, mut peaks) = if params.search.dense {
        let all: Vec<usize> = (0..grid.len()).collect();
        let mut values = ev.values(&all, spec, terms)?;
        mask.apply(&grid, &all, &mut values);
        let max = values.iter().copied().fold(0.0, f64::max);
        let mut peaks = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            if v > 0.0 && v >= params.eta * max && is_local_max(&grid, grid.unflatten(i), |j| values[j]) {
                peaks.push(Peak {
                    location: grid.point(i),
                    index: i,
                    value: v,
                    round,
                });
            }
        }
        (max, peaks)
    } else {
        two_stage(ev, spec, terms, params, mask, round, floor)?
    };
    peaks = merge_close(peaks, params.min_sep);
    peaks.retain(|p| p.value >= params.eta * max);
    Ok(Scan { max, peaks })
}

/// Coarse pass over every `coarse_stride`-th point, then the fine maximum in
/// a window around each coarse local maximum.
fn two_stage(
    ev: &FieldEvaluator,
    spec: &ImagingSpec,
    terms: &[DeflationTerm],
    params: &ResolvedParams,
    mask: &Mask,
    round: usize,
    floor: f64,
) -> Result<(f64, Vec<Peak>)> {
    let grid = *ev.grid();
    let stride = params.search.coarse_stride;
    let (coarse, picks) = grid.coarsen(stride)?;
    let fine_of = |c: [usize; 3]| grid.flatten([picks[0][c[0]], picks[1][c[1]], picks[2][c[2]]]);
    let coarse_fine: Vec<usize> = (0..coarse.len()).map(|c| fine_of(coarse.unflatten(c))).collect();
    let mut cv = ev.values(&coarse_fine, spec, terms)?;
    mask.apply(&grid, &coarse_fine, &mut cv);
    let coarse_max = cv.iter().copied().fold(0.0, f64::max);
    if !(coarse_max > 0.0) {
        return Ok((0.0, Vec::new()));
    }
    // A peak between coarse nodes can read well below its true height, so
    // candidates use a lowered threshold and are re-tested after refinement.
    let threshold = (0.4 * params.eta * coarse_max).max(floor);
    let candidates: Vec<[usize; 3]> = (0..coarse.len())
        .filter(|&c| cv[c] > 0.0 && cv[c] >= threshold)
        .map(|c| coarse.unflatten(c))
        .filter(|&ijk| is_local_max(&coarse, ijk, |j| cv[j]))
        .collect();
    let half = params.search.refine_cells * stride;
    let mut max = coarse_max;
    let mut peaks = Vec::new();
    for &c in &candidates {
        if let Some(p) = climb(ev, spec, terms, mask, grid.unflatten(fine_of(c)), half, round)? {
            max = max.max(p.value);
            peaks.push(p);
        }
    }
    debug!(
        "round {round}: coarse max {coarse_max:.4e}, {} candidates, refined max {max:.4e}",
        candidates.len()
    );
    sort_desc(&mut peaks);
    peaks.dedup_by_key(|p| p.index);
    Ok((max, peaks))
}

/// Fine-grid maximum in the window of half-width `half` around `center`,
/// re-centring while the maximum lies on the window boundary.
fn climb(
    ev: &FieldEvaluator,
    spec: &ImagingSpec,
    terms: &[DeflationTerm],
    mask: &Mask,
    mut center: [usize; 3],
    half: usize,
    round: usize,
) -> Result<Option<Peak>> {
    let grid = *ev.grid();
    let dims = grid.dims();
    for _ in 0..16 {
        let w = grid.window(center, half);
        let mut vals = ev.values(&w, spec, terms)?;
        mask.apply(&grid, &w, &mut vals);
        let mut best = 0;
        for (j, v) in vals.iter().enumerate() {
            if *v > vals[best] || (*v == vals[best] && w[j] < w[best]) {
                best = j;
            }
        }
        if !(vals[best] > 0.0) {
            return Ok(None);
        }
        let b = grid.unflatten(w[best]);
        let on_edge = (0..3).any(|a| {
            let d = b[a].abs_diff(center[a]);
            d == half && b[a] != 0 && b[a] + 1 != dims[a]
        });
        if !on_edge || b == center {
            return Ok(Some(Peak {
                location: grid.point(w[best]),
                index: w[best],
                value: vals[best],
                round,
            }));
        }
        center = b;
    }
    Ok(None)
}

/// `(6π/k)` times the deflated projection at `x`: the recovered part vector.
pub(crate) fn recover_part(
    ev: &FieldEvaluator,
    index: usize,
    variant: Variant,
    terms: &[DeflationTerm],
) -> Result<RealVec3> {
    let d = ev.deflated(&[index], variant, terms)?;
    let d = d[0].ok_or_else(|| Error::Argument("peak lies too close to the measurement surface".into()))?;
    Ok(d * (6.0 * PI / ev.ctx().k()))
}

/// Largest value of the undeflated field as seen by the peak search. Peaks
/// too weak to matter against `reference` are not refined.
pub fn first_round_max(
    ev: &FieldEvaluator,
    spec: &ImagingSpec,
    params: &ResolvedParams,
    reference: Option<f64>,
) -> Result<f64> {
    let off = Mask {
        centers: &[],
        radius: 0.0,
    };
    Ok(scan(ev, spec, &[], params, &off, 1, candidate_floor(ev, params, spec.s, reference))?.max)
}

/// Iterated peak detection and subtraction for one projection.
///
/// Stopping ratios are taken against `reference`, or against this
/// projection's own first-round maximum when `None`. Passing the larger
/// first-round maximum of both projections keeps a projection that carries
/// only noise (e.g. the imaginary part of real moments) from being imaged.
pub fn deflation_loop_with(
    ev: &FieldEvaluator,
    spec: &ImagingSpec,
    params: &ResolvedParams,
    reference: Option<f64>,
) -> Result<PartResult> {
    if spec.variant == Variant::Modulus {
        return Err(Error::Argument("deflation needs the real-part or imag-part variant".into()));
    }
    let s = spec.s as f64;
    let mut entries: Vec<PartEntry> = Vec::new();
    let mut rounds = Vec::new();
    let mut terms: Vec<DeflationTerm> = Vec::new();
    let mut first_max = 0.0;
    let mut mask_on = params.mask == MaskPolicy::On;
    let mut stop = StopReason::MaxRounds;
    for round in 1..=params.max_rounds {
        let centers: Vec<RealVec3> = entries.iter().map(|e| e.location).collect();
        let off = Mask {
            centers: &[],
            radius: 0.0,
        };
        let on = Mask {
            centers: &centers,
            radius: params.mask_radius,
        };
        let known = if round == 1 { reference } else { Some(first_max) };
        let floor = candidate_floor(ev, params, spec.s, known);
        let mut sc = scan(ev, spec, &terms, params, if mask_on { &on } else { &off }, round, floor)?;
        if round == 1 {
            if !(sc.max > 0.0) {
                stop = StopReason::ZeroField;
                break;
            }
            first_max = reference.unwrap_or(sc.max).max(sc.max);
        }
        let mut ratio = (sc.max / first_max).powf(1.0 / s);
        if !mask_on && params.mask == MaskPolicy::Auto && round > 1 && ratio * params.mask_ratio <= 1.0 {
            info!("{}: magnitude ratio {:.3} in round {round}, masking accepted sources", spec.label(), ratio);
            mask_on = true;
            sc = scan(ev, spec, &terms, params, &on, round, floor)?;
            ratio = (sc.max / first_max).powf(1.0 / s);
        }
        // Peaks next to accepted sources, or weak ones in their
        // neighbourhood, are what deflation left of those sources.
        sc.peaks.retain(|p| {
            entries.iter().all(|e| {
                let d = (p.location - e.location).norm();
                d >= params.min_sep
                    && (d >= params.residual_radius
                        || (p.value / e.peak_value).powf(1.0 / s) >= params.residual_ratio)
            })
        });
        let top = sc.peaks.first().map_or(0.0, |p| p.value);
        let peak_ratio = (top / first_max).powf(1.0 / s);
        let mut diag = RoundDiagnostics {
            round,
            field_max: sc.max,
            magnitude_ratio: ratio,
            peak_ratio,
            mask_active: mask_on,
            peaks: sc.peaks.clone(),
            accepted: Vec::new(),
            deferred: 0,
            before: Vec::new(),
            after: Vec::new(),
            evaluations: 0,
        };
        if sc.peaks.is_empty() || peak_ratio < params.tau_stop {
            stop = if sc.peaks.is_empty() && ratio >= params.tau_stop {
                StopReason::NoPeaks
            } else {
                StopReason::BelowThreshold
            };
            diag.evaluations = ev.evaluations();
            rounds.push(diag);
            break;
        }
        let (dominant, deferred) = super::peaks::group_dominant(&sc.peaks, params.gamma);
        let mut new_terms = Vec::with_capacity(dominant.len());
        for p in &dominant {
            let part = recover_part(ev, p.index, spec.variant, &terms)?;
            new_terms.push(DeflationTerm {
                location: p.location,
                part,
            });
            entries.push(PartEntry {
                location: p.location,
                part,
                round,
                peak_value: p.value,
            });
        }
        let idx: Vec<usize> = dominant.iter().map(|p| p.index).collect();
        diag.before = ev.values(&idx, spec, &terms)?;
        terms.extend(new_terms.iter().cloned());
        diag.after = ev.values(&idx, spec, &terms)?;
        diag.accepted = new_terms;
        diag.deferred = deferred.len();
        diag.evaluations = ev.evaluations();
        info!(
            "{} round {round}: max {:.4e} (ratio {:.4}), {} accepted, {} deferred",
            spec.label(),
            sc.max,
            ratio,
            dominant.len(),
            deferred.len()
        );
        rounds.push(diag);
    }
    Ok(PartResult {
        variant: spec.variant,
        entries,
        rounds,
        stop,
    })
}

/// Field values of `spec` with the given terms at a list of points; used by
/// diagnostics and tests.
pub fn values_at(
    ev: &FieldEvaluator,
    spec: &ImagingSpec,
    terms: &[DeflationTerm],
    indices: &[usize],
) -> Result<Vec<f64>> {
    let d = ev.deflated(indices, spec.variant, terms)?;
    Ok(d.into_iter().map(|d| d.map_or(0.0, |d| field_value(&d, spec.s))).collect())
}
