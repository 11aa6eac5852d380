use serde::{Deserialize, Serialize};

use crate::imaging::{SamplingGrid, ScalarField};
use crate::RealVec3;

/// A local maximum of an imaging field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub location: RealVec3,
    /// Flat index on the sampling grid.
    pub index: usize,
    pub value: f64,
    pub round: usize,
}

/// True if `values[ijk]` is ≥ every on-grid neighbour and > at least one.
pub(crate) fn is_local_max(grid: &SamplingGrid, ijk: [usize; 3], value: impl Fn(usize) -> f64) -> bool {
    let v = value(grid.flatten(ijk));
    let mut strict = false;
    for nb in grid.neighbours(ijk) {
        let w = value(grid.flatten(nb));
        if w > v {
            return false;
        }
        strict |= w < v;
    }
    strict
}

/// Keeps the larger of any two peaks closer than `min_sep`; input need not
/// be sorted, output is sorted by value, descending.
pub(crate) fn merge_close(mut peaks: Vec<Peak>, min_sep: f64) -> Vec<Peak> {
    sort_desc(&mut peaks);
    let mut kept: Vec<Peak> = Vec::with_capacity(peaks.len());
    for p in peaks {
        if kept.iter().all(|k| (k.location - p.location).norm() >= min_sep) {
            kept.push(p);
        }
    }
    kept
}

pub(crate) fn sort_desc(peaks: &mut [Peak]) {
    // Ties broken by grid index for determinism.
    peaks.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.index.cmp(&b.index)));
}

/// Grid points that are ≥ all 26 neighbours and strictly above at least one,
/// with value ≥ `eta` times the global maximum. Peaks closer than `min_sep`
/// are merged keeping the larger. Sorted by value, descending.
pub fn detect_peaks(field: &ScalarField, eta: f64, min_sep: f64) -> Vec<Peak> {
    let max = field.max();
    if !(max > 0.0) {
        return Vec::new();
    }
    let grid = &field.grid;
    let threshold = eta * max;
    let mut peaks = Vec::new();
    for (i, &v) in field.values.iter().enumerate() {
        if v < threshold || v <= 0.0 {
            continue;
        }
        let ijk = grid.unflatten(i);
        if is_local_max(grid, ijk, |j| field.values[j]) {
            peaks.push(Peak {
                location: grid.point(i),
                index: i,
                value: v,
                round: 1,
            });
        }
    }
    merge_close(peaks, min_sep)
}

/// Splits value-sorted peaks into those within `gamma` of the largest and the
/// rest.
pub fn group_dominant(peaks: &[Peak], gamma: f64) -> (Vec<Peak>, Vec<Peak>) {
    let Some(top) = peaks.first() else {
        return (Vec::new(), Vec::new());
    };
    let cut = gamma * top.value;
    peaks.iter().cloned().partition(|p| p.value >= cut)
}
