//! Scenario files: a TOML document describing one measuring interaction, the
//! object and probe preparations, and the checks to run.

use std::fmt;
use std::path::Path;

use qmeas_core::grid::{DEFAULT_BOUNDARY_THRESHOLD, DEFAULT_GRID_POINTS, DEFAULT_HALF_WIDTH_SIGMAS};
use qmeas_core::measurement::{PX, PY, X, Y};
use qmeas_core::{BilinearTerm, MeasurementModel, ModeGaussian, ModelKind, MomentState};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default = "unit")]
    pub hbar: f64,
    #[serde(default)]
    pub seed: u64,
    pub model: ModelSpec,
    pub object: ModeGaussian,
    pub probe: ModeGaussian,
    pub checks: Vec<Check>,
    #[serde(default)]
    pub expect: Expectations,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub sampling: SamplingSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    VonNeumann,
    Ozawa,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: Kind,
    #[serde(default = "unit")]
    pub coupling: f64,
    /// Unit-strength interaction for `kind = "custom"`.
    #[serde(default)]
    pub terms: Vec<TermSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
pub enum Coordinate {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "p_x")]
    Px,
    #[serde(rename = "y")]
    Y,
    #[serde(rename = "p_y")]
    Py,
}

impl Coordinate {
    fn index(self) -> usize {
        match self {
            Self::X => X,
            Self::Px => PX,
            Self::Y => Y,
            Self::Py => PY,
        }
    }
}

/// `coefficient * left * right`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coefficient: f64,
    pub left: Coordinate,
    pub right: Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Verdict,
    Tradeoff,
    Robertson,
    Repeatability,
    Realization,
    LimitSweep,
    GridCrosscheck,
    BornSampling,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Self::Verdict => "verdict",
            Self::Tradeoff => "tradeoff",
            Self::Robertson => "robertson",
            Self::Repeatability => "repeatability",
            Self::Realization => "realization",
            Self::LimitSweep => "limit_sweep",
            Self::GridCrosscheck => "grid_crosscheck",
            Self::BornSampling => "born_sampling",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Satisfied,
    Violated,
}

impl Relation {
    pub fn from_flag(satisfied: bool) -> Self {
        if satisfied {
            Self::Satisfied
        } else {
            Self::Violated
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Satisfied => "satisfied",
            Self::Violated => "violated",
        }
    }
}

/// Values a scenario claims; every one that is present becomes a pass/fail
/// comparison in the report.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    pub epsilon: Option<f64>,
    pub eta: Option<f64>,
    pub product: Option<f64>,
    /// `epsilon * eta >= hbar / 2`.
    pub verdict: Option<Relation>,
    /// `sigma(x) * eta >= hbar / 2`.
    pub tradeoff: Option<Relation>,
    /// RMS deviation between two successive outputs.
    pub repeatability: Option<f64>,
    /// Largest `alpha` the cascade must be `alpha`-repeatable for.
    pub alpha: Option<f64>,
    #[serde(default)]
    pub sweep: SweepExpectations,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepExpectations {
    pub max_epsilon: Option<f64>,
    pub final_eta_below: Option<f64>,
    pub eta_decreasing: Option<bool>,
    pub post_sigma_x_increasing: Option<bool>,
    /// Post-interaction `sigma(x)` at least the prepared `sigma(x)`.
    pub post_sigma_x_at_least_prepared: Option<bool>,
}

/// Sweep over `sigma_p = 2^-k`, `k = 0..=k_max`.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_k_max")]
    pub k_max: u32,
}

fn default_k_max() -> u32 {
    10
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { k_max: default_k_max() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectProfile {
    Gaussian,
    /// Equal-weight superposition of two copies of the object Gaussian
    /// centred at `mean_x -/+ separation / 2`.
    Bimodal,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_grid_points")]
    pub n: usize,
    #[serde(default = "default_half_width")]
    pub half_width_sigmas: f64,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_profile")]
    pub object_profile: ObjectProfile,
    #[serde(default)]
    pub separation: f64,
    #[serde(default = "default_boundary")]
    pub boundary_threshold: f64,
}

fn default_grid_points() -> usize {
    DEFAULT_GRID_POINTS
}

fn default_half_width() -> f64 {
    DEFAULT_HALF_WIDTH_SIGMAS
}

fn default_bins() -> usize {
    128
}

fn default_profile() -> ObjectProfile {
    ObjectProfile::Gaussian
}

fn default_boundary() -> f64 {
    DEFAULT_BOUNDARY_THRESHOLD
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n: default_grid_points(),
            half_width_sigmas: default_half_width(),
            bins: default_bins(),
            object_profile: default_profile(),
            separation: 0.0,
            boundary_threshold: default_boundary(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    #[serde(default = "default_samples")]
    pub count: usize,
    /// Significance level of the Kolmogorov-Smirnov test.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_samples() -> usize {
    100_000
}

fn default_alpha() -> f64 {
    0.01
}

impl Default for SamplingSpec {
    fn default() -> Self {
        Self {
            count: default_samples(),
            alpha: default_alpha(),
        }
    }
}

/// Absolute tolerances, in the units of the compared quantity.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Moment-level values and closed forms.
    #[serde(default = "tol_moment")]
    pub moment: f64,
    /// Grid noise and disturbance against the moment engine.
    #[serde(default = "tol_grid")]
    pub grid: f64,
    /// Grid first and second moments against symplectic evolution.
    #[serde(default = "tol_grid_moment")]
    pub grid_moment: f64,
    /// Total variation between output and Born histograms.
    #[serde(default = "tol_histogram_tv")]
    pub histogram_tv: f64,
    /// Per-bin gap between a grid histogram and the normal law.
    #[serde(default = "tol_histogram_cdf")]
    pub histogram_cdf: f64,
}

fn tol_moment() -> f64 {
    1e-12
}

fn tol_grid() -> f64 {
    1e-4
}

fn tol_grid_moment() -> f64 {
    1e-6
}

fn tol_histogram_tv() -> f64 {
    1e-3
}

fn tol_histogram_cdf() -> f64 {
    1e-4
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            moment: tol_moment(),
            grid: tol_grid(),
            grid_moment: tol_grid_moment(),
            histogram_tv: tol_histogram_tv(),
            histogram_cdf: tol_histogram_cdf(),
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 5] = ["moment", "grid", "grid_moment", "histogram_tv", "histogram_cdf"];

    /// Applies a `key=value` override.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(CliError::Override(format!("tolerance `{key}` must be positive, got {value}")));
        }
        let slot = match key {
            "moment" => &mut self.moment,
            "grid" => &mut self.grid,
            "grid_moment" => &mut self.grid_moment,
            "histogram_tv" => &mut self.histogram_tv,
            "histogram_cdf" => &mut self.histogram_cdf,
            _ => {
                return Err(CliError::Override(format!(
                    "unknown tolerance `{key}`, expected one of {}",
                    Self::KEYS.join(", ")
                )))
            }
        };
        *slot = value;
        Ok(())
    }
}

/// `key=value` with a positive real value.
pub fn parse_override(text: &str) -> Result<(String, f64)> {
    let (key, value) = text
        .split_once('=')
        .ok_or_else(|| CliError::Override(format!("expected KEY=VALUE, got `{text}`")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| CliError::Override(format!("`{value}` is not a number")))?;
    Ok((key.trim().to_string(), value))
}

impl Scenario {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| CliError::Config {
            origin: origin.to_string(),
            message: e.to_string(),
        })?;
        scenario.validate().map_err(|message| CliError::Config {
            origin: origin.to_string(),
            message,
        })?;
        Ok(scenario)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text, &path.display().to_string())
    }

    fn validate(&self) -> std::result::Result<(), String> {
        let name_ok = !self.name.is_empty()
            && self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
        if !name_ok {
            return Err(format!(
                "name: `{}` must be non-empty and use only letters, digits, `-` and `_`",
                self.name
            ));
        }
        if self.checks.is_empty() {
            return Err("checks: at least one check is required".into());
        }
        match self.model.kind {
            Kind::Custom if self.model.terms.is_empty() => {
                return Err("model.terms: a custom model needs at least one term".into())
            }
            Kind::VonNeumann | Kind::Ozawa if !self.model.terms.is_empty() => {
                return Err("model.terms: only custom models take a term list".into())
            }
            _ => {}
        }
        if self.grid.object_profile == ObjectProfile::Bimodal && !(self.grid.separation > 0.0) {
            return Err("grid.separation: a bimodal object needs a positive separation".into());
        }
        if self.sampling.count == 0 {
            return Err("sampling.count: must be positive".into());
        }
        if !(self.sampling.alpha > 0.0 && self.sampling.alpha < 1.0) {
            return Err("sampling.alpha: must lie in (0, 1)".into());
        }
        Ok(())
    }

    pub fn model_kind(&self) -> ModelKind {
        match self.model.kind {
            Kind::VonNeumann => ModelKind::VonNeumann,
            Kind::Ozawa => ModelKind::Ozawa,
            Kind::Custom => ModelKind::Custom,
        }
    }

    pub fn build_model(&self) -> Result<MeasurementModel> {
        let model = match self.model.kind {
            Kind::Custom => {
                let terms: Vec<BilinearTerm> = self
                    .model
                    .terms
                    .iter()
                    .map(|t| BilinearTerm::new(t.coefficient, t.left.index(), t.right.index()))
                    .collect();
                MeasurementModel::custom(&terms, self.model.coupling, self.hbar)?
            }
            _ => MeasurementModel::named(self.model_kind(), self.model.coupling, self.hbar)?,
        };
        Ok(model)
    }

    pub fn object_state(&self) -> Result<MomentState> {
        Ok(MomentState::single_mode("object", self.object, self.hbar)?)
    }

    pub fn probe_state(&self) -> Result<MomentState> {
        Ok(MomentState::single_mode("probe", self.probe, self.hbar)?)
    }
}
