//! TOML run configuration shared by every CLI subcommand.
//!
//! ```toml
//! seed = 7
//! [domain]
//! length = 1.0
//! cells = 200
//! [bc]
//! left = "neumann"
//! right = "impedance"
//! [kernel]
//! z0 = 1.0
//! z_tau = 0.5
//! tau = 0.3
//! [time]
//! t_final = 10.0
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{KernelSpec, SamplerConfig};
use crate::measures::{DiffusiveDescriptor, Quadrature};
use crate::realizations::delay_cells;
use crate::resolvent::RobinEnds;
use crate::spectrum::GeneratorConfig;
use crate::wavesim::{BCSpec, BoundaryCondition, Grid1D, InitialCondition, Simulation};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub domain: DomainConfig,
    #[serde(default)]
    pub bc: BcConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub initial: InitialCondition,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureFitConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DomainConfig {
    pub length: f64,
    pub cells: usize,
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig {
            length: 1.0,
            cells: 200,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcKind {
    Dirichlet,
    Neumann,
    Impedance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BcConfig {
    pub left: BcKind,
    pub right: BcKind,
}

impl Default for BcConfig {
    fn default() -> Self {
        BcConfig {
            left: BcKind::Neumann,
            right: BcKind::Impedance,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    /// `None` picks `h/2`, shrunk so that every delay is a whole number of steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

fn default_t_final() -> f64 {
    10.0
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            t_final: default_t_final(),
            dt: None,
        }
    }
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition::Pulse {
            center: 0.5,
            width: 0.05,
            direction: 1.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Relative paths resolve against the config file's directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMode {
    Standard,
    Extended,
}

/// `measure-fit`: discretize a descriptor and compare against its closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFitConfig {
    pub descriptor: DiffusiveDescriptor,
    #[serde(default)]
    pub quadrature: Quadrature,
    #[serde(default = "default_fit_mode")]
    pub mode: FitMode,
    /// Real sample points `s > 0`.
    #[serde(default = "default_fit_samples")]
    pub samples: Vec<f64>,
    #[serde(default = "default_fit_tol")]
    pub tolerance: f64,
}

fn default_fit_mode() -> FitMode {
    FitMode::Standard
}

fn default_fit_samples() -> Vec<f64> {
    vec![0.01, 0.1, 1.0, 10.0, 100.0]
}

fn default_fit_tol() -> f64 {
    1e-3
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub n_real: usize,
    pub n_imag: usize,
    pub lo: f64,
    pub hi: f64,
    pub ends: RobinEnds,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            n_real: 50,
            n_imag: 25,
            lo: 1e-2,
            hi: 1e2,
            ends: RobinEnds::BOTH,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delay_cells: Option<usize>,
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| {
        let path = e
            .span()
            .map(|r| format!("byte {}..{}", r.start, r.end))
            .unwrap_or_else(|| "<root>".into());
        Error::config(path, e.message().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("<root>", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.domain;
        if !(d.length > 0.0 && d.length.is_finite()) {
            return Err(Error::config("domain.length", "must be a positive number"));
        }
        if d.cells < 2 {
            return Err(Error::config(
                "domain.cells",
                "at least two cells are required",
            ));
        }
        if !(self.time.t_final >= 0.0 && self.time.t_final.is_finite()) {
            return Err(Error::config("time.t_final", "must be >= 0"));
        }
        let needs_kernel = self.bc.left == BcKind::Impedance || self.bc.right == BcKind::Impedance;
        match (&self.kernel, needs_kernel) {
            (None, true) => {
                return Err(Error::config(
                    "kernel",
                    "an impedance boundary needs a [kernel] section",
                ));
            }
            (Some(k), _) => k
                .validate()
                .map_err(|e| Error::config("kernel", e.to_string()))?,
            (None, false) => {}
        }
        if let Some(dt) = self.time.dt {
            if !(dt > 0.0) {
                return Err(Error::config("time.dt", "must be > 0"));
            }
            if let Some(k) = self
                .kernel
                .as_ref()
                .filter(|k| needs_kernel && k.has_delay())
            {
                delay_cells(k.tau, dt).map_err(|e| Error::config("time.dt", e.to_string()))?;
            }
        }
        if let InitialCondition::Pulse { width, .. } = self.initial {
            if !(width > 0.0) {
                return Err(Error::config("initial.width", "must be > 0"));
            }
        }
        if let Some(m) = &self.measure {
            m.descriptor
                .validate()
                .map_err(|e| Error::config("measure.descriptor", e.to_string()))?;
            if m.samples.iter().any(|s| !(*s > 0.0)) {
                return Err(Error::config("measure.samples", "samples must be > 0"));
            }
        }
        if let Some(s) = &self.scan {
            if !(s.lo > 0.0 && s.hi > s.lo) {
                return Err(Error::config("scan", "need 0 < lo < hi"));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid1D {
        Grid1D {
            length: self.domain.length,
            cells: self.domain.cells,
        }
    }

    fn side(&self, kind: BcKind) -> BoundaryCondition {
        match kind {
            BcKind::Dirichlet => BoundaryCondition::Dirichlet,
            BcKind::Neumann => BoundaryCondition::Neumann,
            BcKind::Impedance => {
                BoundaryCondition::Impedance(self.kernel.clone().unwrap_or_default())
            }
        }
    }

    pub fn bc_spec(&self) -> BCSpec {
        BCSpec::new(self.side(self.bc.left), self.side(self.bc.right))
    }

    pub fn kernel_or_err(&self) -> Result<&KernelSpec> {
        self.kernel
            .as_ref()
            .ok_or_else(|| Error::config("kernel", "this command needs a [kernel] section"))
    }

    pub fn simulation(&self) -> Simulation {
        let grid = self.grid();
        let bc = self.bc_spec();
        Simulation {
            dt: self
                .time
                .dt
                .unwrap_or_else(|| Simulation::default_dt(&grid, &bc)),
            grid,
            bc,
            t_final: self.time.t_final,
            initial: self.initial.clone(),
            seed: self.seed,
            source: None,
        }
    }

    pub fn generator_config(&self) -> GeneratorConfig {
        GeneratorConfig {
            grid: self.grid(),
            bc: self.bc_spec(),
            delay_cells: self.spectrum.and_then(|s| s.delay_cells),
        }
    }

    pub fn scan_config(&self) -> ScanConfig {
        self.scan.unwrap_or_default()
    }
}
