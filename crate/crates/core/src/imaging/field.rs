use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::base::{BaseFunctional, BaseKind, QuadratureBase};
use super::grid::SamplingGrid;
use crate::forward::CauchyData;
use crate::kernels::{im_green_apply, WaveContext};
use crate::{ComplexVec3, Error, RealVec3, Result};

/// Which projection of the base functional enters the imaging field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Modulus,
    RealPart,
    ImagPart,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Modulus => "modulus",
            Variant::RealPart => "re",
            Variant::ImagPart => "im",
        }
    }
}

/// `Σᵢ |P(base(z, eᵢ))|^s` for a projection `P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImagingSpec {
    pub base: BaseKind,
    pub variant: Variant,
    pub s: u32,
}

impl ImagingSpec {
    pub fn new(base: BaseKind, variant: Variant, s: u32) -> Result<Self> {
        if s < 1 {
            return Err(Error::config("imaging.s", "exponent must be at least 1"));
        }
        Ok(Self { base, variant, s })
    }

    pub fn label(&self) -> String {
        let b = match self.base {
            BaseKind::Interior => "I",
            BaseKind::Conjugate => "I-hat",
        };
        format!("{b} {} s={}", self.variant.name(), self.s)
    }
}

/// A recovered real or imaginary moment part at a location, subtracted from
/// later rounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeflationTerm {
    pub location: RealVec3,
    pub part: RealVec3,
}

/// Real values of an imaging function on a sampling grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: SamplingGrid,
    pub values: Vec<f64>,
    pub label: String,
    /// Grid points where the base functional was not evaluated (too close to
    /// the measurement surface); their value is 0.
    pub excluded: usize,
}

impl ScalarField {
    pub fn new(grid: SamplingGrid, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Argument(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            values,
            label: label.into(),
            excluded: 0,
        })
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Flat index of the largest value (first one on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        best
    }

    pub fn argmax_point(&self) -> RealVec3 {
        self.grid.point(self.argmax())
    }

    /// Copy scaled so that the maximum is 1 (unchanged if the field is zero).
    pub fn normalized(&self) -> ScalarField {
        let m = self.max();
        let mut out = self.clone();
        if m > 0.0 {
            out.values.iter_mut().for_each(|v| *v /= m);
        }
        out
    }
}

/// Projection of `V(z)` with the deflation terms subtracted.
pub fn deflated_vector(
    v: &ComplexVec3,
    z: &RealVec3,
    variant: Variant,
    terms: &[DeflationTerm],
    ctx: WaveContext,
) -> Result<RealVec3> {
    let mut d = match variant {
        Variant::RealPart => v.map(|c| c.re),
        Variant::ImagPart => v.map(|c| c.im),
        Variant::Modulus => {
            if !terms.is_empty() {
                return Err(Error::Argument("deflation needs a real-part or imag-part variant".into()));
            }
            return Ok(v.map(|c| c.norm()));
        }
    };
    for t in terms {
        // p · Im𝔾(x, z) eᵢ for all i is Im𝔾(z, x) p by symmetry.
        d -= im_green_apply(z, &t.location, ctx, &t.part);
    }
    Ok(d)
}

/// `Σᵢ |dᵢ|^s`.
#[inline]
pub fn field_value(d: &RealVec3, s: u32) -> f64 {
    d.iter().map(|x| x.abs().powi(s as i32)).sum()
}

/// Caches `V(z)` on the points of one grid so that rounds, variants and
/// refinement windows share base evaluations.
pub struct FieldEvaluator {
    base: Box<dyn BaseFunctional + Send>,
    grid: SamplingGrid,
    ctx: WaveContext,
    cache: Mutex<HashMap<usize, Option<ComplexVec3>>>,
    evaluations: AtomicU64,
}

impl FieldEvaluator {
    pub fn new(base: Box<dyn BaseFunctional + Send>, grid: SamplingGrid) -> Result<Self> {
        let ctx = WaveContext::new(base.k())?;
        Ok(Self {
            base,
            grid,
            ctx,
            cache: Mutex::new(HashMap::new()),
            evaluations: AtomicU64::new(0),
        })
    }

    pub fn from_data(data: &CauchyData, kind: BaseKind, grid: SamplingGrid) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Argument("dataset has no surface samples".into()));
        }
        Self::new(Box::new(QuadratureBase::new(data, kind)), grid)
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn ctx(&self) -> WaveContext {
        self.ctx
    }

    /// Number of base-functional evaluations performed so far.
    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    /// `V(z)` at the given flat indices; `None` where the point is too close
    /// to the measurement surface.
    pub fn vectors(&self, indices: &[usize]) -> Result<Vec<Option<ComplexVec3>>> {
        let missing: Vec<usize> = {
            let cache = self.cache.lock().unwrap();
            let mut m: Vec<usize> = indices.iter().copied().filter(|i| !cache.contains_key(i)).collect();
            m.sort_unstable();
            m.dedup();
            m
        };
        if !missing.is_empty() {
            let computed: Vec<(usize, Option<ComplexVec3>)> = missing
                .par_iter()
                .map(|&i| match self.base.vector(&self.grid.point(i)) {
                    Ok(v) => Ok((i, Some(v))),
                    Err(Error::NearSurface { .. }) => Ok((i, None)),
                    Err(e) => Err(e),
                })
                .collect::<Result<_>>()?;
            self.evaluations.fetch_add(missing.len() as u64, Ordering::Relaxed);
            self.cache.lock().unwrap().extend(computed);
        }
        let cache = self.cache.lock().unwrap();
        Ok(indices.iter().map(|i| cache[i]).collect())
    }

    /// Deflated projections at the given indices (`None` where excluded).
    pub fn deflated(
        &self,
        indices: &[usize],
        variant: Variant,
        terms: &[DeflationTerm],
    ) -> Result<Vec<Option<RealVec3>>> {
        let vs = self.vectors(indices)?;
        indices
            .par_iter()
            .zip(vs.par_iter())
            .map(|(&i, v)| match v {
                Some(v) => deflated_vector(v, &self.grid.point(i), variant, terms, self.ctx).map(Some),
                None => Ok(None),
            })
            .collect()
    }

    /// Imaging-field values at the given indices; excluded points give 0.
    pub fn values(&self, indices: &[usize], spec: &ImagingSpec, terms: &[DeflationTerm]) -> Result<Vec<f64>> {
        Ok(self
            .deflated(indices, spec.variant, terms)?
            .into_iter()
            .map(|d| d.map_or(0.0, |d| field_value(&d, spec.s)))
            .collect())
    }

    /// The imaging field on the whole grid.
    pub fn field(&self, spec: &ImagingSpec, terms: &[DeflationTerm], label: impl Into<String>) -> Result<ScalarField> {
        let all: Vec<usize> = (0..self.grid.len()).collect();
        let d = self.deflated(&all, spec.variant, terms)?;
        let excluded = d.iter().filter(|d| d.is_none()).count();
        let values = d.into_iter().map(|d| d.map_or(0.0, |d| field_value(&d, spec.s))).collect();
        let mut f = ScalarField::new(self.grid, values, label)?;
        f.excluded = excluded;
        Ok(f)
    }
}

/// The deflated, projected base `P(base(z, eᵢ)) - Σ part · Im𝔾(x, z) eᵢ`.
/// `axis` is 1-based.
pub fn deflated_base(
    z: &RealVec3,
    axis: usize,
    data: &CauchyData,
    terms: &[DeflationTerm],
    kind: BaseKind,
    variant: Variant,
) -> Result<f64> {
    if !(1..=3).contains(&axis) {
        return Err(Error::Argument(format!("axis must be 1, 2 or 3, got {axis}")));
    }
    let v = QuadratureBase::new(data, kind).vector(z)?;
    Ok(deflated_vector(&v, z, variant, terms, data.ctx)?[axis - 1])
}

/// Dense imaging field of `data` over `grid`.
pub fn imaging_field(
    grid: &SamplingGrid,
    spec: &ImagingSpec,
    data: &CauchyData,
    terms: &[DeflationTerm],
) -> Result<ScalarField> {
    let ev = FieldEvaluator::from_data(data, spec.base, *grid)?;
    ev.field(spec, terms, spec.label())
}
