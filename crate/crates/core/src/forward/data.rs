use serde::{Deserialize, Serialize};

use super::MeasurementSurface;
use crate::kernels::WaveContext;
use crate::{ComplexVec3, Error, Result};

/// Name of the generator used by [`super::add_noise`].
pub const NOISE_RNG: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseRecord {
    pub delta1: f64,
    pub delta2: f64,
    pub seed: u64,
    pub rng: String,
}

/// Where a dataset came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    /// `point-sources`, `small-volume`, or free text for external data.
    pub generator: String,
    /// Fingerprint of the generating source configuration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseRecord>,
}

/// Samples of `E` and `curl E × ν` at every point of a measurement surface.
#[derive(Clone, Debug, PartialEq)]
pub struct CauchyData {
    pub surface: MeasurementSurface,
    pub ctx: WaveContext,
    pub e: Vec<ComplexVec3>,
    pub curl_e_cross_nu: Vec<ComplexVec3>,
    pub provenance: Provenance,
}

impl CauchyData {
    pub fn new(
        surface: MeasurementSurface,
        ctx: WaveContext,
        e: Vec<ComplexVec3>,
        curl_e_cross_nu: Vec<ComplexVec3>,
        provenance: Provenance,
    ) -> Result<Self> {
        let d = Self {
            surface,
            ctx,
            e,
            curl_e_cross_nu,
            provenance,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.surface.len();
        if self.e.len() != n || self.curl_e_cross_nu.len() != n {
            return Err(Error::Format(format!(
                "{} surface points but {} E samples and {} curl samples",
                n,
                self.e.len(),
                self.curl_e_cross_nu.len()
            )));
        }
        let finite = |v: &ComplexVec3| v.iter().all(|c| c.re.is_finite() && c.im.is_finite());
        if let Some(i) = self.e.iter().position(|v| !finite(v)) {
            return Err(Error::Format(format!("non-finite E at point {i}")));
        }
        if let Some(i) = self.curl_e_cross_nu.iter().position(|v| !finite(v)) {
            return Err(Error::Format(format!("non-finite curl E × ν at point {i}")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    /// True if every sample is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.e.iter().chain(&self.curl_e_cross_nu).all(|v| v.iter().all(|c| c.re == 0.0 && c.im == 0.0))
    }
}

/// Euclidean norm over all components of all points.
pub fn stacked_norm(v: &[ComplexVec3]) -> f64 {
    v.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}
