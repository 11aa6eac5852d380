use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{ComplexVec3, Error, RealVec3, Result};

/// A point dipole: location and complex moment vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSource {
    pub location: RealVec3,
    #[serde(with = "crate::serde_cvec")]
    pub moment: ComplexVec3,
}

impl PointSource {
    pub fn new(location: RealVec3, moment: ComplexVec3) -> Result<Self> {
        let s = Self { location, moment };
        s.validate("source")?;
        Ok(s)
    }

    pub(crate) fn validate(&self, field: &str) -> Result<()> {
        if !self.location.iter().all(|v| v.is_finite()) {
            return Err(Error::config(format!("{field}.location"), "must be finite"));
        }
        if !self.moment.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::config(format!("{field}.moment"), "must be finite"));
        }
        if self.moment.norm() == 0.0 {
            return Err(Error::config(format!("{field}.moment"), "must be nonzero"));
        }
        Ok(())
    }
}

/// An ordered collection of point sources.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SourceSet {
    sources: Vec<PointSource>,
}

impl SourceSet {
    pub fn new(sources: Vec<PointSource>) -> Self {
        Self { sources }
    }

    pub fn sources(&self) -> &[PointSource] {
        &self.sources
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    /// Smallest pairwise distance, `None` for fewer than two sources.
    pub fn min_separation(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (i, a) in self.sources.iter().enumerate() {
            for b in &self.sources[i + 1..] {
                let d = (a.location - b.location).norm();
                best = Some(best.map_or(d, |m: f64| m.min(d)));
            }
        }
        best
    }

    /// Hex SHA-256 of the sources in canonical text form.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for s in &self.sources {
            for v in s.location.iter() {
                h.update(format!("{v:.17e},"));
            }
            for c in s.moment.iter() {
                h.update(format!("{:.17e},{:.17e},", c.re, c.im));
            }
            h.update(b";");
        }
        hex::encode(h.finalize())
    }
}

impl FromIterator<PointSource> for SourceSet {
    fn from_iter<I: IntoIterator<Item = PointSource>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// A homogeneous source `vector · 1_D` on the ball `D` of the given radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSource {
    pub center: RealVec3,
    pub radius: f64,
    #[serde(with = "crate::serde_cvec")]
    pub vector: ComplexVec3,
}

impl BallSource {
    pub fn new(center: RealVec3, radius: f64, vector: ComplexVec3) -> Result<Self> {
        let b = Self { center, radius, vector };
        b.validate("ball")?;
        Ok(b)
    }

    pub(crate) fn validate(&self, field: &str) -> Result<()> {
        if !self.center.iter().all(|v| v.is_finite()) {
            return Err(Error::config(format!("{field}.center"), "must be finite"));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::config(format!("{field}.radius"), "must be positive"));
        }
        if !self.vector.iter().all(|v| v.re.is_finite() && v.im.is_finite()) || self.vector.norm() == 0.0 {
            return Err(Error::config(format!("{field}.vector"), "must be finite and nonzero"));
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * std::f64::consts::PI * self.radius.powi(3)
    }

    pub fn fingerprint(balls: &[BallSource]) -> String {
        let mut h = Sha256::new();
        for b in balls {
            for v in b.center.iter().chain(std::iter::once(&b.radius)) {
                h.update(format!("{v:.17e},"));
            }
            for c in b.vector.iter() {
                h.update(format!("{:.17e},{:.17e},", c.re, c.im));
            }
            h.update(b";");
        }
        hex::encode(h.finalize())
    }
}
