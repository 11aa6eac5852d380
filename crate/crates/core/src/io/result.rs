use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::forward::{CauchyData, Provenance};
use crate::imaging::FieldEvaluator;
use crate::reconstruct::{reconstruct_with, Reconstruction, SourceMode};
use crate::{serde_cvec, ComplexVec3, Error, RealVec3, Result};

pub const RESULT_FORMAT: &str = "emsource-result/1";

/// Location errors above this are flagged in the human table.
pub const FLAG_DISTANCE: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataSummary {
    pub points: usize,
    pub csv_sha256: Option<String>,
    pub provenance: Provenance,
}

/// One ground-truth source.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruthSource {
    pub location: RealVec3,
    /// Point moment, or the ball's vector.
    #[serde(with = "serde_cvec")]
    pub moment: ComplexVec3,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceError {
    /// Index into `reconstruction.sources`.
    pub recovered: usize,
    /// Index into the ground truth.
    pub truth: usize,
    pub location_error: f64,
    /// Largest per-coordinate deviation.
    pub coordinate_error: f64,
    pub moment_relative_error: f64,
    /// `|p̂/|p̂| - p/|p||`; reported in small-volume mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction_relative_error: Option<f64>,
    pub flagged: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub matches: Vec<SourceError>,
    /// Truth indices with no recovered counterpart.
    pub missed: Vec<usize>,
    /// Recovered indices with no truth counterpart.
    pub spurious: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub wall_seconds: f64,
    pub evaluations: u64,
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub format: String,
    pub config: ExperimentConfig,
    pub data: DataSummary,
    pub reconstruction: Reconstruction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub errors: Option<ErrorReport>,
    pub stats: RunStats,
}

/// Ground truth of a config: point sources, or balls as (center, vector).
pub fn truth_of(config: &ExperimentConfig) -> Vec<TruthSource> {
    if config.balls.is_empty() {
        config
            .sources
            .sources()
            .iter()
            .map(|s| TruthSource {
                location: s.location,
                moment: s.moment,
            })
            .collect()
    } else {
        config
            .balls
            .iter()
            .map(|b| TruthSource {
                location: b.center,
                moment: b.vector,
            })
            .collect()
    }
}

fn unit(v: &ComplexVec3) -> ComplexVec3 {
    let n = v.norm();
    if n > 0.0 {
        v.unscale(n)
    } else {
        *v
    }
}

/// Pairs recovered and true sources nearest-first, each used once, within
/// `max_distance`.
pub fn compare_with_truth(
    rec: &Reconstruction,
    truth: &[TruthSource],
    max_distance: f64,
) -> ErrorReport {
    let mut pairs = Vec::new();
    for (i, s) in rec.sources.iter().enumerate() {
        for (j, t) in truth.iter().enumerate() {
            let d = (s.location - t.location).norm();
            if d <= max_distance {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_r = vec![false; rec.sources.len()];
    let mut used_t = vec![false; truth.len()];
    let mut matches = Vec::new();
    for (d, i, j) in pairs {
        if used_r[i] || used_t[j] {
            continue;
        }
        used_r[i] = true;
        used_t[j] = true;
        let s = &rec.sources[i];
        let t = &truth[j];
        let coordinate_error = (s.location - t.location).abs().max();
        matches.push(SourceError {
            recovered: i,
            truth: j,
            location_error: d,
            coordinate_error,
            moment_relative_error: (s.moment - t.moment).norm() / t.moment.norm(),
            direction_relative_error: (rec.mode == SourceMode::SmallVolume)
                .then(|| (unit(&s.moment) - unit(&t.moment)).norm()),
            flagged: d > FLAG_DISTANCE,
        });
    }
    matches.sort_by_key(|m| m.truth);
    ErrorReport {
        matches,
        missed: (0..truth.len()).filter(|&j| !used_t[j]).collect(),
        spurious: (0..rec.sources.len()).filter(|&i| !used_r[i]).collect(),
    }
}

/// Errors unless `data` was taken at the configured wavenumber on the
/// configured surface.
pub fn check_data_matches(config: &ExperimentConfig, data: &CauchyData) -> Result<()> {
    if data.ctx != config.ctx() {
        return Err(Error::Format(format!(
            "data wavenumber {} differs from configured {}",
            data.ctx.k(),
            config.ctx().k()
        )));
    }
    if data.surface.spec() != config.surface.spec() {
        return Err(Error::Format(format!(
            "data surface {:?} differs from configured {:?}",
            data.surface.spec(),
            config.surface.spec()
        )));
    }
    Ok(())
}

/// Runs the configured reconstruction on `data` and scores it against the
/// configured sources, if any.
pub fn reconstruct_document(
    config: &ExperimentConfig,
    data: &CauchyData,
    csv_sha256: Option<String>,
) -> Result<ResultDocument> {
    config.validate()?;
    check_data_matches(config, data)?;
    let start = Instant::now();
    let params = config.resolved_params()?;
    let ev = FieldEvaluator::from_data(data, config.imaging.base, config.sampling_grid()?)?;
    let reconstruction = reconstruct_with(&ev, config.imaging.base, config.imaging.s, &params, config.imaging.mode)?;
    let truth = truth_of(config);
    let errors = (!truth.is_empty()).then(|| compare_with_truth(&reconstruction, &truth, config.ctx().wavelength()));
    Ok(ResultDocument {
        format: RESULT_FORMAT.into(),
        config: config.clone(),
        data: DataSummary {
            points: data.len(),
            csv_sha256,
            provenance: data.provenance.clone(),
        },
        stats: RunStats {
            wall_seconds: start.elapsed().as_secs_f64(),
            evaluations: reconstruction.evaluations,
            threads: rayon::current_num_threads(),
        },
        reconstruction,
        errors,
    })
}

fn c3(c: Complex64) -> String {
    let re = format!("{:.3}", c.re);
    let im = format!("{:.3}", c.im.abs());
    let zero = |s: &str| s.trim_start_matches('-').chars().all(|ch| ch == '0' || ch == '.');
    match (zero(&re), zero(&im)) {
        (_, true) => re,
        (true, false) => format!("{}{im}i", if c.im < 0.0 { "-" } else { "" }),
        (false, false) => format!("{re}{}{im}i", if c.im < 0.0 { "-" } else { "+" }),
    }
}

pub fn format_real3(v: &RealVec3) -> String {
    format!("({:.3}, {:.3}, {:.3})", v.x, v.y, v.z)
}

pub fn format_complex3(v: &ComplexVec3) -> String {
    format!("({}, {}, {})", c3(v.x), c3(v.y), c3(v.z))
}

/// Parses one entry written by [`format_complex3`]'s component formatter.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return s.parse().ok().map(|re| Complex64::new(re, 0.0));
    };
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(_, ch)| ch == '+' || ch == '-')
        .map(|(i, _)| i)
        .last();
    match split {
        Some(i) => Some(Complex64::new(body[..i].parse().ok()?, body[i..].parse().ok()?)),
        None => Some(Complex64::new(0.0, body.parse().ok()?)),
    }
}

/// Rounded table of the recovered sources, with truth and errors when known.
pub fn human_table(doc: &ResultDocument) -> String {
    let rec = &doc.reconstruction;
    let truth = truth_of(&doc.config);
    let small = rec.mode == SourceMode::SmallVolume;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} sources recovered (base {:?}, s = {}, {} Re rounds, {} Im rounds)",
        rec.sources.len(),
        rec.base,
        rec.s,
        rec.rounds_re.len(),
        rec.rounds_im.len()
    );
    let head = if small { "magnitude | direction" } else { "moment" };
    let _ = writeln!(s, "#  | computed location | computed {head} | true location | error");
    let by_rec: Vec<Option<&SourceError>> = (0..rec.sources.len())
        .map(|i| doc.errors.as_ref().and_then(|e| e.matches.iter().find(|m| m.recovered == i)))
        .collect();
    for (i, src) in rec.sources.iter().enumerate() {
        let value = if small {
            let m = src.magnitude.unwrap_or_else(|| src.moment.norm());
            format!("{m:.3} | {}", format_complex3(&unit(&src.moment)))
        } else {
            format_complex3(&src.moment)
        };
        let (tl, err) = match by_rec[i] {
            Some(m) => {
                let e = if small {
                    format!("loc {:.3}, dir {:.2}%", m.location_error, 100.0 * m.direction_relative_error.unwrap_or(f64::NAN))
                } else {
                    format!("loc {:.3}, moment {:.2}%", m.location_error, 100.0 * m.moment_relative_error)
                };
                let flag = if m.flagged { " FLAGGED" } else { "" };
                (format_real3(&truth[m.truth].location), format!("{e}{flag}"))
            }
            None if doc.errors.is_some() => ("-".into(), "no true source nearby FLAGGED".into()),
            None => ("-".into(), "-".into()),
        };
        let _ = writeln!(s, "{:<2} | {} | {} | {} | {}", i + 1, format_real3(&src.location), value, tl, err);
    }
    if let Some(e) = &doc.errors {
        for &j in &e.missed {
            let _ = writeln!(s, "missed true source at {}", format_real3(&truth[j].location));
        }
    }
    if !rec.converged() {
        let _ = writeln!(s, "warning: stopped at max_rounds; the result may be partial");
    }
    s
}
