use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::deflation::PartEntry;
use crate::{serde_cvec, ComplexVec3, RealVec3};

/// Where a merged moment came from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceProvenance {
    pub re_round: Option<usize>,
    pub im_round: Option<usize>,
    /// Both parts were found and paired.
    pub matched: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveredSource {
    pub location: RealVec3,
    #[serde(with = "serde_cvec")]
    pub moment: ComplexVec3,
    pub provenance: SourceProvenance,
    /// Distance between the re and im locations when paired.
    pub pair_distance: Option<f64>,
    /// Small-volume mode: `moment / |moment|`.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "serde_cvec::option")]
    pub direction: Option<ComplexVec3>,
    /// Small-volume mode: `|moment|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub magnitude: Option<f64>,
}

/// Pairs re and im entries nearest-first within `merge_radius`. A pair keeps
/// the re location. Output order: paired and re-only sources in re order,
/// then im-only sources in im order.
pub fn merge_re_im(re: &[PartEntry], im: &[PartEntry], merge_radius: f64) -> Vec<RecoveredSource> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, r) in re.iter().enumerate() {
        for (j, m) in im.iter().enumerate() {
            let d = (r.location - m.location).norm();
            if d <= merge_radius {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut re_mate = vec![None; re.len()];
    let mut im_used = vec![false; im.len()];
    for (d, i, j) in pairs {
        if re_mate[i].is_none() && !im_used[j] {
            re_mate[i] = Some((j, d));
            im_used[j] = true;
        }
    }
    let mut out = Vec::with_capacity(re.len() + im.len());
    for (i, r) in re.iter().enumerate() {
        let (moment, provenance, pair_distance) = match re_mate[i] {
            Some((j, d)) => (
                r.part.zip_map(&im[j].part, Complex64::new),
                SourceProvenance {
                    re_round: Some(r.round),
                    im_round: Some(im[j].round),
                    matched: true,
                },
                Some(d),
            ),
            None => (
                r.part.map(Complex64::from),
                SourceProvenance {
                    re_round: Some(r.round),
                    im_round: None,
                    matched: false,
                },
                None,
            ),
        };
        out.push(RecoveredSource {
            location: r.location,
            moment,
            provenance,
            pair_distance,
            direction: None,
            magnitude: None,
        });
    }
    for (j, m) in im.iter().enumerate() {
        if !im_used[j] {
            out.push(RecoveredSource {
                location: m.location,
                moment: m.part.map(|b| Complex64::new(0.0, b)),
                provenance: SourceProvenance {
                    re_round: None,
                    im_round: Some(m.round),
                    matched: false,
                },
                pair_distance: None,
                direction: None,
                magnitude: None,
            });
        }
    }
    out
}
