use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::forward::{
    add_noise, synthesize_point_source_data_with, synthesize_small_volume_data, BallSource,
    CauchyData, Containment, MeasurementSurface, SourceSet, SurfaceSpec, DEFAULT_QUAD_ORDER,
};
use crate::imaging::{BaseKind, SamplingGrid};
use crate::kernels::WaveContext;
use crate::reconstruct::{ReconstructionParams, ResolvedParams, SourceMode};
use crate::{Error, RealVec3, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveConfig {
    pub k: WaveContext,
}

impl Default for WaveConfig {
    fn default() -> Self {
        Self {
            k: WaveContext::new(20.0).unwrap(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfaceConfig {
    pub center: [f64; 3],
    pub radius: f64,
    pub n_phi: usize,
    pub n_theta: usize,
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        Self {
            center: [0.0; 3],
            radius: 25.0,
            n_phi: 100,
            n_theta: 100,
        }
    }
}

impl SurfaceConfig {
    pub fn spec(&self) -> SurfaceSpec {
        SurfaceSpec {
            center: self.center,
            radius: self.radius,
            n_phi: self.n_phi,
            n_theta: self.n_theta,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// `[min, max]` corners.
    #[serde(rename = "box")]
    pub bounds: [[f64; 3]; 2],
    /// Points per axis, endpoints included.
    pub n: [usize; 3],
    /// Coarse pass plus local refinement; `false` evaluates every point.
    pub two_stage: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            bounds: [[-1.5; 3], [1.5; 3]],
            n: [201; 3],
            two_stage: true,
        }
    }
}

impl GridConfig {
    pub fn grid(&self) -> Result<SamplingGrid> {
        SamplingGrid::new(self.bounds[0].into(), self.bounds[1].into(), self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImagingConfig {
    pub base: BaseKind,
    pub s: u32,
    pub mode: SourceMode,
}

impl Default for ImagingConfig {
    fn default() -> Self {
        Self {
            base: BaseKind::Interior,
            s: 4,
            mode: SourceMode::Point,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub delta1: f64,
    pub delta2: f64,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            delta1: 0.1,
            delta2: 0.1,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Relative paths resolve against the directory of the config file.
    pub dir: PathBuf,
    /// File-name stem of everything written.
    pub name: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            name: "run".into(),
        }
    }
}

/// One experiment: geometry, sources, noise, imaging and reconstruction
/// settings. Every section and field is optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub wave: WaveConfig,
    pub surface: SurfaceConfig,
    pub sources: SourceSet,
    /// Homogeneous ball sources; mutually exclusive with `sources`.
    pub balls: Vec<BallSource>,
    /// Admit sources outside the measurement sphere.
    pub allow_exterior: bool,
    pub quad_order: usize,
    pub grid: GridConfig,
    pub imaging: ImagingConfig,
    pub noise: NoiseConfig,
    pub reconstruction: ReconstructionParams,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            wave: WaveConfig::default(),
            surface: SurfaceConfig::default(),
            sources: SourceSet::default(),
            balls: Vec::new(),
            allow_exterior: false,
            quad_order: DEFAULT_QUAD_ORDER,
            grid: GridConfig::default(),
            imaging: ImagingConfig::default(),
            noise: NoiseConfig::default(),
            reconstruction: ReconstructionParams::default(),
            output: OutputConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn ctx(&self) -> WaveContext {
        self.wave.k
    }

    pub fn containment(&self) -> Containment {
        if self.allow_exterior {
            Containment::AllowExterior
        } else {
            Containment::Strict
        }
    }

    /// Checks everything that can be checked without synthesising data.
    pub fn validate(&self) -> Result<()> {
        let surface = self.surface()?;
        let grid = self.grid.grid()?;
        self.resolved_params()?;
        if self.imaging.s == 0 {
            return Err(Error::config("imaging.s", "must be at least 1"));
        }
        if !self.sources.is_empty() && !self.balls.is_empty() {
            return Err(Error::config("balls", "give either point sources or balls, not both"));
        }
        for (name, d) in [("noise.delta1", self.noise.delta1), ("noise.delta2", self.noise.delta2)] {
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::config(name, format!("must be a nonnegative fraction, got {d}")));
            }
        }
        if self.quad_order < 2 {
            return Err(Error::config("quad_order", "must be at least 2"));
        }
        for (i, s) in self.sources.sources().iter().enumerate() {
            self.check_inside(&surface, &s.location, 0.0, &format!("sources[{i}].location"))?;
        }
        for (i, b) in self.balls.iter().enumerate() {
            self.check_inside(&surface, &b.center, b.radius, &format!("balls[{i}].center"))?;
        }
        if self.imaging.base == BaseKind::Conjugate {
            let r = surface.radius;
            let far = (0..8).any(|c| {
                let p = RealVec3::from_fn(|a, _| if c >> a & 1 == 1 { grid.max()[a] } else { grid.min()[a] });
                (p - surface.center).norm() >= r
            });
            if far {
                log::warn!("grid box reaches the measurement surface; the conjugate functional is skipped there");
            }
        }
        Ok(())
    }

    fn check_inside(&self, surface: &MeasurementSurface, x: &RealVec3, radius: f64, field: &str) -> Result<()> {
        let d = (x - surface.center).norm();
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::config(field, "must be finite"));
        }
        if (d - surface.radius).abs() <= radius + 1e-12 * surface.radius {
            return Err(Error::config(field, "touches the measurement surface"));
        }
        if d > surface.radius && !self.allow_exterior {
            return Err(Error::config(
                field,
                format!("lies outside the measurement sphere (|x - c| = {d:.4}); set allow_exterior to permit this"),
            ));
        }
        Ok(())
    }

    pub fn surface(&self) -> Result<MeasurementSurface> {
        self.surface.spec().build()
    }

    pub fn sampling_grid(&self) -> Result<SamplingGrid> {
        self.grid.grid()
    }

    pub fn resolved_params(&self) -> Result<ResolvedParams> {
        let mut p = self.reconstruction;
        p.search.dense = p.search.dense || !self.grid.two_stage;
        p.resolve(self.ctx(), &self.grid.grid()?)
    }

    /// Exact data of the configured sources, then noise if any.
    pub fn synthesize(&self) -> Result<CauchyData> {
        self.validate()?;
        let surface = self.surface()?;
        let exact = if self.balls.is_empty() {
            synthesize_point_source_data_with(&self.sources, &surface, self.ctx(), self.containment())?
        } else {
            synthesize_small_volume_data(&self.balls, &surface, self.ctx(), self.quad_order)?
        };
        if self.noise.delta1 == 0.0 && self.noise.delta2 == 0.0 {
            Ok(exact)
        } else {
            add_noise(&exact, self.noise.delta1, self.noise.delta2, self.noise.seed)
        }
    }

    /// Output directory resolved against `base` (the config file's directory).
    pub fn output_dir(&self, base: &Path) -> PathBuf {
        if self.output.dir.is_absolute() {
            self.output.dir.clone()
        } else {
            base.join(&self.output.dir)
        }
    }
}

/// Parses and validates JSON config text. Errors name the offending field.
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        // Missing or unknown keys are reported by serde relative to their
        // parent, so the parent path is the most useful field name.
        Error::config(if path == "." { "config".to_string() } else { path }, inner.to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text)
}
