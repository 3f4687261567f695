//! TOML run configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use sd_twistor::transforms::{CylinderFunction, Mode, VProfile};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Transform,
    Invert,
    Monopole,
    Metric,
    Disks,
    Geodesics,
    Roundtrip,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Command::Transform => "transform",
            Command::Invert => "invert",
            Command::Monopole => "monopole",
            Command::Metric => "metric",
            Command::Disks => "disks",
            Command::Geodesics => "geodesics",
            Command::Roundtrip => "roundtrip",
        };
        f.write_str(s)
    }
}

/// Profile `a(v)` as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Zero,
    /// `amplitude · e^{−((v − center)/width)²}`.
    Gaussian {
        amplitude: f64,
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        width: f64,
    },
    GaussianPoly {
        coeffs: Vec<f64>,
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        width: f64,
    },
    SechPow {
        amplitude: f64,
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        width: f64,
        power: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl ProfileConfig {
    fn to_profile(&self) -> VProfile {
        match self {
            ProfileConfig::Zero => VProfile::zero(),
            ProfileConfig::Gaussian {
                amplitude,
                center,
                width,
            } => VProfile::gaussian(*amplitude, *center, *width),
            ProfileConfig::GaussianPoly {
                coeffs,
                center,
                width,
            } => VProfile::gaussian_poly(coeffs.clone(), *center, *width),
            ProfileConfig::SechPow {
                amplitude,
                center,
                width,
                power,
            } => VProfile::sech_pow(*amplitude, *center, *width, *power),
        }
    }
}

/// One term `a_k(v) cos kθ + b_k(v) sin kθ`. `k` is signed so that negative
/// values reach validation instead of failing as a type error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub k: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cos: Option<ProfileConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sin: Option<ProfileConfig>,
}

/// `[min, max]` sampled at `n` evenly spaced points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Range {
    pub const fn new(min: f64, max: f64, n: usize) -> Self {
        Self { min, max, n }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.n - 1) as f64;
        (0..self.n).map(|i| self.min + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    /// Spacetime grid for tabulated output and roundtrip comparisons.
    pub t: Range,
    pub x1: Range,
    pub x2: Range,
    /// Radius of the disk `|x| ≤ radius` on which roundtrip errors are measured.
    pub radius: f64,
    /// Random sample count for sweeps.
    pub samples: usize,
    /// Angular quadrature nodes for `R`.
    pub n_theta: usize,
    /// Finite-difference steps of convergence studies, coarsest first.
    pub fd_steps: Vec<f64>,
    /// Line grid for the Radon/Hilbert pipeline.
    pub line_n_theta: usize,
    pub line_n_v: usize,
    pub line_v_max: f64,
    pub line_half_length: f64,
    pub line_n_s: usize,
    /// Tables of Cauchy data.
    pub plane_extent: f64,
    pub plane_spacing: f64,
    /// Curvature and disk base point `(s, t, x1, x2)`.
    pub point: [f64; 4],
    /// Fourier truncation for disks.
    pub k: usize,
    pub n_boundary: usize,
    pub n_radial: usize,
    /// Amplitude of the gauge perturbation `ψ = a·e^{−t²−|x|²}` in roundtrip.
    pub gauge_amplitude: f64,
    pub gauge_half_width: f64,
    pub gauge_spacing: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            t: Range::new(-1.0, 1.0, 5),
            x1: Range::new(-2.0, 2.0, 9),
            x2: Range::new(-2.0, 2.0, 9),
            radius: 2.0,
            samples: 100,
            n_theta: 256,
            fd_steps: vec![1e-2, 5e-3, 2.5e-3],
            line_n_theta: 256,
            line_n_v: 1024,
            line_v_max: 8.0,
            line_half_length: 20.0,
            line_n_s: 401,
            plane_extent: 24.0,
            plane_spacing: 0.1,
            point: [0.0, 0.0, 0.5, 0.0],
            k: 32,
            n_boundary: 64,
            n_radial: 4,
            gauge_amplitude: 1.0,
            gauge_half_width: 8.0,
            gauge_spacing: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Residuals at or below this count as exactly zero, skipping order fits.
    pub zero_floor: f64,
    pub wave_order: f64,
    pub roundtrip: f64,
    pub monopole_residual: f64,
    pub asd_order: f64,
    pub beta: f64,
    pub disk_incidence: f64,
    pub disk_holomorphy: f64,
    pub quotient: f64,
    pub gauge_a: f64,
    pub poisson_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero_floor: 1e-12,
            wave_order: 1.9,
            roundtrip: 1e-3,
            monopole_residual: 1e-9,
            asd_order: 1.8,
            beta: 1e-9,
            disk_incidence: 1e-8,
            disk_holomorphy: 1e-8,
            quotient: 1e-10,
            gauge_a: 1e-4,
            poisson_residual: 1e-4,
        }
    }
}

impl Tolerances {
    fn entries(&self) -> [(&'static str, f64); 11] {
        [
            ("zero_floor", self.zero_floor),
            ("wave_order", self.wave_order),
            ("roundtrip", self.roundtrip),
            ("monopole_residual", self.monopole_residual),
            ("asd_order", self.asd_order),
            ("beta", self.beta),
            ("disk_incidence", self.disk_incidence),
            ("disk_holomorphy", self.disk_holomorphy),
            ("quotient", self.quotient),
            ("gauge_a", self.gauge_a),
            ("poisson_residual", self.poisson_residual),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub h_spec: Vec<ModeConfig>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            h_spec: Vec::new(),
            grid: GridSpec::default(),
            tolerances: Tolerances::default(),
            seed: DEFAULT_SEED,
            output: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, m) in self.h_spec.iter().enumerate() {
            if m.k < 0 {
                bail!("h_spec[{i}].k = {} must be non-negative", m.k);
            }
            if m.k > u32::MAX as i64 {
                bail!("h_spec[{i}].k = {} is too large", m.k);
            }
            if m.cos.is_none() && m.sin.is_none() {
                bail!("h_spec[{i}] needs a cos or sin profile");
            }
        }
        self.h().context("h_spec")?;

        let g = &self.grid;
        for (name, r) in [("grid.t", g.t), ("grid.x1", g.x1), ("grid.x2", g.x2)] {
            if r.n == 0 {
                bail!("{name}.n must be positive");
            }
            if !(r.min.is_finite() && r.max.is_finite() && r.min <= r.max) {
                bail!("{name} needs finite min ≤ max");
            }
        }
        let counts = [
            ("grid.samples", g.samples),
            ("grid.n_theta", g.n_theta),
            ("grid.line_n_theta", g.line_n_theta),
            ("grid.line_n_v", g.line_n_v),
            ("grid.line_n_s", g.line_n_s),
            ("grid.k", g.k),
            ("grid.n_boundary", g.n_boundary),
        ];
        for (name, n) in counts {
            if n == 0 {
                bail!("{name} must be positive");
            }
        }
        let lengths = [
            ("grid.radius", g.radius),
            ("grid.line_v_max", g.line_v_max),
            ("grid.line_half_length", g.line_half_length),
            ("grid.plane_extent", g.plane_extent),
            ("grid.plane_spacing", g.plane_spacing),
            ("grid.gauge_half_width", g.gauge_half_width),
            ("grid.gauge_spacing", g.gauge_spacing),
        ];
        for (name, x) in lengths {
            if !(x > 0.0 && x.is_finite()) {
                bail!("{name} = {x} must be positive");
            }
        }
        if g.fd_steps.len() < 2 {
            bail!("grid.fd_steps needs at least two steps");
        }
        if g.fd_steps.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            bail!("grid.fd_steps must be positive");
        }
        if !g.point.iter().all(|x| x.is_finite()) || !g.gauge_amplitude.is_finite() {
            bail!("grid.point and grid.gauge_amplitude must be finite");
        }
        for (name, x) in self.tolerances.entries() {
            if !(x >= f64::EPSILON && x.is_finite()) {
                bail!("tolerances.{name} = {x} must be at least machine epsilon");
            }
        }
        Ok(())
    }

    /// The cylinder function described by `h_spec`.
    pub fn h(&self) -> Result<CylinderFunction> {
        let modes = self
            .h_spec
            .iter()
            .map(|m| Mode {
                k: m.k as u32,
                cos_profile: m
                    .cos
                    .as_ref()
                    .map_or_else(VProfile::zero, |p| p.to_profile()),
                sin_profile: m.sin.as_ref().map(|p| p.to_profile()),
            })
            .collect();
        Ok(CylinderFunction::new(modes)?)
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    RunConfig::from_toml(&text).with_context(|| format!("invalid config {}", path.display()))
}
