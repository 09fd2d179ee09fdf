//! Run configuration: a single JSON document with per-command sections,
//! plus dotted-path overrides (`--set key.path=value`).

use curlgap_core::ground_state::{Mode, SolverOptions};
use curlgap_core::periodic::PiecewisePotential1D;
use curlgap_core::radial::StepRadialPotential;
use curlgap_core::CylGrid;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// 1-periodic piecewise-constant potential `P(x3)`.
    pub periodic: Option<PeriodicSection>,
    /// Direct radial step potential (for `curves` and `spectrum`).
    pub radial: Option<RadialSection>,
    /// Eigenvalue-design inputs (for `design`, `spectrum`, `groundstate`).
    pub radial_design: Option<DesignSection>,
    /// Band computation controls.
    #[serde(default)]
    pub bands: BandsSection,
    /// Matching-curve sampling controls.
    #[serde(default)]
    pub curves: CurvesSection,
    /// Cylinder grid for the discretized problems.
    pub grid: Option<GridSection>,
    /// Nonlinear problem description.
    pub problem: Option<ProblemSection>,
    /// Solver tolerances and budgets.
    #[serde(default)]
    pub solver: SolverSection,
    /// Where output files go (default: current directory).
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodicSection {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

/// Extra keys are tolerated here so that a `potential.json` emitted by
/// `design` re-ingests directly (it carries `mu0`, `eta`, `xi` alongside
/// the potential parameters).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialSection {
    pub w0: f64,
    pub winf: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignSection {
    pub winf: f64,
    pub eta: f64,
    #[serde(default = "default_fraction")]
    pub mu0_fraction: f64,
}

fn default_fraction() -> f64 {
    0.5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BandsSection {
    /// Number of bands to compute.
    pub count: usize,
    /// Fail (exit 2) when the first gap is closed.
    pub require_gap: bool,
}

impl Default for BandsSection {
    fn default() -> Self {
        Self {
            count: 8,
            require_gap: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CurvesSection {
    /// Sample count across the well interval.
    pub samples: usize,
}

impl Default for CurvesSection {
    fn default() -> Self {
        Self { samples: 2000 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSection {
    pub r_max: f64,
    pub z_half: f64,
    pub nr: usize,
    pub nz: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSection {
    #[serde(default = "default_p")]
    pub p: f64,
    pub mode: Mode,
    pub gamma: CoefficientSpec,
    pub potential: PotentialSpec,
}

fn default_p() -> f64 {
    3.0
}

/// Nonlinear coefficient: a constant, or the radial power profile
/// `coeff (1 + |x|)^exponent`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientSpec {
    Constant(f64),
    PowerLaw { coeff: f64, exponent: f64 },
}

impl CoefficientSpec {
    pub fn sampler(&self) -> impl Fn(f64, f64) -> f64 + '_ {
        let spec = self.clone();
        move |r: f64, z: f64| match spec {
            CoefficientSpec::Constant(c) => c,
            CoefficientSpec::PowerLaw { coeff, exponent } => {
                let rho = (r * r + z * z).sqrt();
                coeff * (1.0 + rho).powf(exponent)
            }
        }
    }
}

/// Linear potential: a constant, or the designed separable
/// `W(r) + P(x3)` built from the `periodic` and `radial_design` sections.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialSpec {
    Constant(f64),
    Designed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSection {
    pub tol_gradient: f64,
    pub tol_inner: f64,
    pub tol_outer: f64,
    pub max_iterations: usize,
    pub starts: usize,
    pub k_neg_max: usize,
    pub seed: u64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverOptions::default();
        Self {
            tol_gradient: d.tol_gradient,
            tol_inner: d.tol_inner,
            tol_outer: d.tol_outer,
            max_iterations: d.max_iterations,
            starts: d.starts,
            k_neg_max: d.k_neg_max,
            seed: d.seed,
        }
    }
}

impl SolverSection {
    pub fn to_options(&self) -> SolverOptions {
        SolverOptions {
            tol_gradient: self.tol_gradient,
            tol_inner: self.tol_inner,
            tol_outer: self.tol_outer,
            max_iterations: self.max_iterations,
            starts: self.starts,
            k_neg_max: self.k_neg_max,
            seed: self.seed,
        }
    }
}

impl RunConfig {
    /// Load the JSON config and apply `--set path=value` overrides.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut doc: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config is not valid JSON: {e}")))?;
        for item in overrides {
            apply_override(&mut doc, item)?;
        }
        serde_json::from_value(doc)
            .map_err(|e| CliError::Config(format!("config schema error: {e}")))
    }

    pub fn periodic(&self) -> Result<PiecewisePotential1D, CliError> {
        let section = self
            .periodic
            .as_ref()
            .ok_or_else(|| CliError::Config("missing `periodic` section".into()))?;
        PiecewisePotential1D::new(section.breakpoints.clone(), section.values.clone())
            .map_err(|e| CliError::Config(format!("periodic potential: {e}")))
    }

    pub fn radial(&self) -> Result<StepRadialPotential, CliError> {
        let section = self
            .radial
            .as_ref()
            .ok_or_else(|| CliError::Config("missing `radial` section".into()))?;
        StepRadialPotential::new(section.w0, section.winf, section.delta)
            .map_err(|e| CliError::Hypothesis(format!("radial potential: {e}")))
    }

    pub fn design(&self) -> Result<&DesignSection, CliError> {
        self.radial_design
            .as_ref()
            .ok_or_else(|| CliError::Config("missing `radial_design` section".into()))
    }

    pub fn grid(&self) -> Result<CylGrid, CliError> {
        let section = self
            .grid
            .as_ref()
            .ok_or_else(|| CliError::Config("missing `grid` section".into()))?;
        CylGrid::new(section.r_max, section.z_half, section.nr, section.nz)
            .map_err(|e| CliError::Config(format!("grid: {e}")))
    }

    pub fn problem_section(&self) -> Result<&ProblemSection, CliError> {
        self.problem
            .as_ref()
            .ok_or_else(|| CliError::Config("missing `problem` section".into()))
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

fn apply_override(doc: &mut serde_json::Value, item: &str) -> Result<(), CliError> {
    let (path, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{item}` is not key=value")))?;
    let value = serde_json::from_str(raw)
        .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (idx, key) in parts.iter().enumerate() {
        if !node.is_object() {
            return Err(CliError::Config(format!(
                "override path `{path}` crosses a non-object at `{key}`"
            )));
        }
        let map = node.as_object_mut().expect("checked");
        if idx + 1 == parts.len() {
            map.insert((*key).to_string(), value);
            return Ok(());
        }
        node = map
            .entry((*key).to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    Ok(())
}
