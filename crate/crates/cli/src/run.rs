//! Evaluation of a scenario's checks.

use std::fmt::Write as _;

use log::{debug, info};
use qmeas_core::cascade::CascadeScenario;
use qmeas_core::grid::{self, GridAxis};
use qmeas_core::measurement::{self, FactorOrder};
use qmeas_core::states::{ks_critical_value, ks_statistic, sample_outcomes};
use qmeas_core::{
    GridConfig, GridState, GridUnitary, LinearObservable, MeasurementModel, ModeGaussian,
    ModelKind, MomentState,
};
use rayon::prelude::*;

use crate::error::Result;
use crate::report::{BatchReport, CheckReport, Quantity, ScenarioReport, Status};
use crate::scenario::{Check, ObjectProfile, Relation, Scenario};

/// Norm drift allowed across one application of a measuring unitary.
pub const NORM_DRIFT: f64 = 1e-10;

/// Decimal places kept when printing observables.
const DISPLAY_DECIMALS: i32 = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub report: ScenarioReport,
    pub artifacts: Vec<Artifact>,
}

/// Runs scenarios in parallel; the report is sorted by scenario name.
pub fn run_batch(scenarios: &[Scenario]) -> (BatchReport, Vec<Artifact>) {
    let outcomes: Vec<ScenarioOutcome> = scenarios.par_iter().map(run).collect();
    let mut artifacts = Vec::new();
    let mut reports = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        artifacts.extend(o.artifacts);
        reports.push(o.report);
    }
    artifacts.sort_by(|a, b| a.file_name.cmp(&b.file_name));
    (BatchReport::new(reports), artifacts)
}

pub fn run(scenario: &Scenario) -> ScenarioOutcome {
    info!("running scenario {}", scenario.name);
    let mut checks = Vec::new();
    let mut artifacts = Vec::new();
    let error = match Context::new(scenario) {
        Ok(ctx) => scenario.checks.iter().find_map(|&check| {
            debug!("{}: {check}", scenario.name);
            match ctx.run_check(check, &mut artifacts) {
                Ok(report) => {
                    checks.push(report);
                    None
                }
                Err(e) => Some(format!("{check}: {e}")),
            }
        }),
        Err(e) => Some(e.to_string()),
    };
    let status = if error.is_some() {
        Status::Error
    } else if checks.iter().all(|c| c.passed) {
        Status::Pass
    } else {
        Status::Fail
    };
    ScenarioOutcome {
        report: ScenarioReport {
            name: scenario.name.clone(),
            description: scenario.description.clone(),
            model: model_name(scenario.model_kind()).into(),
            coupling: scenario.model.coupling,
            hbar: scenario.hbar,
            seed: scenario.seed,
            status,
            error,
            checks,
        },
        artifacts,
    }
}

fn model_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::VonNeumann => "von_neumann",
        ModelKind::Ozawa => "ozawa",
        ModelKind::Custom => "custom",
    }
}

fn verdict_text(r: Relation) -> &'static str {
    match r {
        Relation::Satisfied => "Heisenberg relation satisfied",
        Relation::Violated => "Heisenberg relation violated",
    }
}

fn approx_or_info(name: &str, value: f64, expected: Option<f64>, tol: f64) -> Quantity {
    match expected {
        Some(e) => Quantity::approx(name, value, e, tol),
        None => Quantity::info(name, value),
    }
}

fn flag_or_info(name: &str, value: bool, expected: Option<bool>) -> Quantity {
    match expected {
        Some(e) => Quantity::equals(name, value, e),
        None => Quantity::info(name, value),
    }
}

/// A product against `hbar / 2` in the direction the scenario claims.
fn bound_quantity(name: &str, value: f64, bound: f64, tol: f64, claim: Option<Relation>) -> Quantity {
    match claim {
        Some(Relation::Satisfied) => Quantity::at_least(name, value, bound, tol),
        Some(Relation::Violated) => Quantity::below(name, value, bound - tol),
        None => Quantity::info(name, value),
    }
}

struct Context<'a> {
    scenario: &'a Scenario,
    model: MeasurementModel,
    object: MomentState,
    probe: MomentState,
}

impl<'a> Context<'a> {
    fn new(scenario: &'a Scenario) -> Result<Self> {
        Ok(Self {
            model: scenario.build_model()?,
            object: scenario.object_state()?,
            probe: scenario.probe_state()?,
            scenario,
        })
    }

    fn hbar(&self) -> f64 {
        self.scenario.hbar
    }

    fn run_check(&self, check: Check, artifacts: &mut Vec<Artifact>) -> Result<CheckReport> {
        match check {
            Check::Verdict => self.verdict(),
            Check::Tradeoff => self.tradeoff(),
            Check::Robertson => self.robertson(),
            Check::Repeatability => self.repeatability(),
            Check::Realization => self.realization(),
            Check::LimitSweep => self.limit_sweep(artifacts),
            Check::GridCrosscheck => self.grid_crosscheck(artifacts),
            Check::BornSampling => self.born_sampling(),
        }
    }

    fn verdict(&self) -> Result<CheckReport> {
        let tol = self.scenario.tolerances.moment;
        let expect = &self.scenario.expect;
        let r = self.model.heisenberg_verdict_with_tol(&self.object, &self.probe, tol)?;
        let product = match expect.product {
            Some(p) => Quantity::approx("epsilon*eta", r.product, p, tol),
            None => bound_quantity("epsilon*eta", r.product, r.heisenberg_bound, tol * self.hbar(), expect.verdict),
        };
        let verdict = match expect.verdict {
            Some(v) => Quantity::equals("verdict", r.verdict(), verdict_text(v)),
            None => Quantity::info("verdict", r.verdict()),
        };
        Ok(CheckReport::new(
            Check::Verdict.name(),
            vec![
                approx_or_info("epsilon(x)", r.epsilon, expect.epsilon, tol),
                approx_or_info("eta(p_x)", r.eta, expect.eta, tol),
                product,
                Quantity::info("hbar/2", r.heisenberg_bound),
                verdict,
            ],
        ))
    }

    fn tradeoff(&self) -> Result<CheckReport> {
        let tol = self.scenario.tolerances.moment;
        let claim = self.scenario.expect.tradeoff;
        let r = self.model.heisenberg_verdict_with_tol(&self.object, &self.probe, tol)?;
        let relation = Relation::from_flag(r.tradeoff_satisfied).name();
        let verdict = match claim {
            Some(c) => Quantity::equals("sigma(x)*eta >= hbar/2", relation, c.name()),
            None => Quantity::info("sigma(x)*eta >= hbar/2", relation),
        };
        Ok(CheckReport::new(
            Check::Tradeoff.name(),
            vec![
                Quantity::info("sigma(x)", r.sigma_x_pre),
                Quantity::info("eta(p_x)", r.eta),
                bound_quantity("sigma(x)*eta", r.tradeoff_product, r.heisenberg_bound, tol * self.hbar(), claim),
                verdict,
            ],
        ))
    }

    fn robertson(&self) -> Result<CheckReport> {
        let tol = self.scenario.tolerances.moment * self.hbar();
        let sys = self.model.system();
        let before = self.model.joint_state(&self.object, &self.probe)?;
        let after = before.evolve(self.model.endpoint())?;
        let mut quantities = Vec::new();
        for (label, state) in [("t", &before), ("t+dt", &after)] {
            for (mode, (q, p)) in [(0, ("x", "p_x")), (1, ("y", "p_y"))] {
                let a = LinearObservable::position(sys, mode);
                let b = LinearObservable::momentum(sys, mode);
                let r = state.robertson_check(&a, &b, tol)?;
                let name = format!("sigma({q})*sigma({p}) at {label}");
                quantities.push(Quantity::at_least(&name, r.lhs, r.bound, tol));
            }
        }
        Ok(CheckReport::new(Check::Robertson.name(), quantities))
    }

    fn repeatability(&self) -> Result<CheckReport> {
        let tol = self.scenario.tolerances.moment;
        let expect = &self.scenario.expect;
        let cascade = CascadeScenario::new(self.model.clone(), self.object.clone(), self.probe.clone())?;
        let deviation = cascade.repeatability_deviation()?;
        let mut quantities = vec![
            Quantity::info("y(t+dt)", cascade.first_output_observable()?.rounded(DISPLAY_DECIMALS).to_string()),
            Quantity::info("z(t+2dt)", cascade.second_output_observable()?.rounded(DISPLAY_DECIMALS).to_string()),
            Quantity::info("sigma(y)", self.scenario.probe.sigma_x),
            approx_or_info("rms(z - y)", deviation, expect.repeatability, tol),
        ];
        if let Some(alpha) = expect.alpha {
            let name = format!("{}-repeatable", crate::report::number(alpha));
            quantities.push(Quantity::equals(&name, cascade.is_alpha_repeatable(alpha + tol)?, true));
        }
        Ok(CheckReport::new(Check::Repeatability.name(), quantities))
    }

    /// Object and probe preparations with `hbar = 1`.
    fn unit_modes(&self) -> (ModeGaussian, ModeGaussian) {
        (
            self.scenario.object.rescaled_to_unit_hbar(self.hbar()),
            self.scenario.probe.rescaled_to_unit_hbar(self.hbar()),
        )
    }

    fn grid_state(&self) -> Result<GridState> {
        let spec = &self.scenario.grid;
        let (object, probe) = self.unit_modes();
        match spec.object_profile {
            ObjectProfile::Gaussian => {
                let config = GridConfig::for_spreads(object.sigma_x, probe.sigma_x, spec.n, spec.half_width_sigmas)
                    .with_boundary_threshold(spec.boundary_threshold);
                Ok(GridState::init_gaussian(&object, &probe, config)?)
            }
            ObjectProfile::Bimodal => {
                let half = spec.separation / 2.0;
                let spread = (object.sigma_x * object.sigma_x + half * half).sqrt();
                let config = GridConfig::for_spreads(spread, probe.sigma_x, spec.n, spec.half_width_sigmas)
                    .with_boundary_threshold(spec.boundary_threshold);
                let arm = |shift: f64| ModeGaussian {
                    mean_x: object.mean_x + shift,
                    ..object
                };
                let fx = grid::superposition_profile(&[(1.0, arm(-half)), (1.0, arm(half))], config.nx, config.lx)?;
                let fy = grid::gaussian_profile(&probe, config.ny, config.ly)?;
                Ok(GridState::from_profiles(config, &fx, &fy)?)
            }
        }
    }

    /// Moments of the grid input on a `hbar = 1` system: the prepared
    /// Gaussian, or quadrature for a superposition.
    fn unit_moments(&self, state: &GridState, model: &MeasurementModel) -> Result<MomentState> {
        match self.scenario.grid.object_profile {
            ObjectProfile::Gaussian => {
                let (object, probe) = self.unit_modes();
                let o = MomentState::single_mode("object", object, 1.0)?;
                let p = MomentState::single_mode("probe", probe, 1.0)?;
                Ok(model.joint_state(&o, &p)?)
            }
            ObjectProfile::Bimodal => Ok(state.moments().moment_state(model.system())?),
        }
    }

    fn realization(&self) -> Result<CheckReport> {
        let tols = &self.scenario.tolerances;
        let k = self.scenario.model.coupling;
        let residual = measurement::realization_residual(k, FactorOrder::PxYFirst)?;
        let reversed = measurement::realization_residual(k, FactorOrder::XPyFirst)?;

        let unit = MeasurementModel::ozawa(1.0)?;
        let state = self.grid_state()?;
        let after = GridUnitary::Ozawa.applied(&state)?;
        let expected = self.unit_moments(&state, &unit)?.evolve(unit.endpoint())?;
        let got = after.moments();
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            worst = worst.max((got.mean[i] - expected.mean()[i]).abs());
            for j in 0..4 {
                worst = worst.max((got.cov[i][j] - expected.cov()[(i, j)]).abs());
            }
        }
        Ok(CheckReport::new(
            Check::Realization.name(),
            vec![
                Quantity::at_most("residual, p_x y shear first", residual, tols.moment),
                Quantity::info("residual, x p_y shear first", reversed),
                Quantity::at_most("grid moment error", worst, tols.grid_moment),
                Quantity::at_most("grid norm drift", (after.norm_sq() - state.norm_sq()).abs(), NORM_DRIFT),
            ],
        ))
    }

    fn limit_sweep(&self, artifacts: &mut Vec<Artifact>) -> Result<CheckReport> {
        let expect = &self.scenario.expect.sweep;
        let schedule = measurement::momentum_eigenstate_schedule(self.scenario.sweep.k_max);
        let rows = self.model.limit_sweep(&schedule)?;

        let mut csv = String::from("k,sigma_p,sigma_x,epsilon,eta,epsilon_eta,sigma_x_eta,post_sigma_x\n");
        for (k, r) in rows.iter().enumerate() {
            let _ = writeln!(
                csv,
                "{k},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                r.sigma_p, r.sigma_x, r.report.epsilon, r.report.eta, r.report.product, r.report.tradeoff_product, r.post_sigma_x
            );
        }
        let file_name = format!("{}-sweep.csv", self.scenario.name);
        artifacts.push(Artifact {
            file_name: file_name.clone(),
            contents: csv,
        });

        let max_eps = rows.iter().map(|r| r.report.epsilon).fold(0.0, f64::max);
        let final_eta = rows.last().map_or(f64::NAN, |r| r.report.eta);
        let eta_decreasing = rows.windows(2).all(|w| w[1].report.eta < w[0].report.eta);
        let post_increasing = rows.windows(2).all(|w| w[1].post_sigma_x > w[0].post_sigma_x);
        let post_floor = rows.iter().all(|r| r.post_sigma_x >= r.sigma_x);
        let mut quantities = vec![
            Quantity::info("steps", rows.len() as f64),
            match expect.max_epsilon {
                Some(b) => Quantity::at_most("max epsilon(x)", max_eps, b),
                None => Quantity::info("max epsilon(x)", max_eps),
            },
            match expect.final_eta_below {
                Some(b) => Quantity::below("final eta(p_x)", final_eta, b),
                None => Quantity::info("final eta(p_x)", final_eta),
            },
            flag_or_info("eta decreasing", eta_decreasing, expect.eta_decreasing),
            flag_or_info("post sigma(x) increasing", post_increasing, expect.post_sigma_x_increasing),
            flag_or_info("post sigma(x) >= prepared", post_floor, expect.post_sigma_x_at_least_prepared),
        ];
        if let Some(last) = rows.last() {
            quantities.push(Quantity::info("final post sigma(x)", last.post_sigma_x));
        }
        let mut report = CheckReport::new(Check::LimitSweep.name(), quantities);
        report.artifacts.push(file_name);
        Ok(report)
    }

    fn grid_crosscheck(&self, artifacts: &mut Vec<Artifact>) -> Result<CheckReport> {
        let tols = &self.scenario.tolerances;
        let spec = &self.scenario.grid;
        let kind = self.scenario.model_kind();
        let unitary = GridUnitary::for_model(kind)?;
        let hbar = self.hbar();
        let unit = MeasurementModel::named(kind, 1.0, 1.0)?;

        let state = self.grid_state()?;
        let after = unitary.applied(&state)?;
        let grid_eps = grid::grid_noise(&state, unitary)?;
        // p -> p / hbar on the grid
        let grid_eta = grid::grid_disturbance(&state, unitary)? * hbar;

        let (moment_eps, moment_eta) = match spec.object_profile {
            ObjectProfile::Gaussian => {
                let r = self.model.heisenberg_verdict(&self.object, &self.probe)?;
                (r.epsilon, r.eta)
            }
            ObjectProfile::Bimodal => {
                let m = self.unit_moments(&state, &unit)?;
                let eps = m.rms(&unit.noise_operator())?;
                let eta = m.rms(&unit.disturbance_operator(&unit.object_momentum())?)?;
                (eps, eta * hbar)
            }
        };

        let output = after.marginal_histogram(GridAxis::Probe, spec.bins)?;
        let born = state.marginal_histogram(GridAxis::Object, spec.bins)?;
        let mut quantities = vec![
            Quantity::info("grid points", format!("{} x {}", state.config().nx, state.config().ny)),
            Quantity::info("half-width", state.config().lx),
            Quantity::approx("grid epsilon(x)", grid_eps, moment_eps, tols.grid),
            Quantity::approx("grid eta(p_x)", grid_eta, moment_eta, tols.grid),
            Quantity::at_most("norm drift", (after.norm_sq() - state.norm_sq()).abs(), NORM_DRIFT),
            Quantity::approx("output mass", output.total(), 1.0, NORM_DRIFT),
        ];
        let tv = output.total_variation(&born)?;
        if kind == ModelKind::Ozawa {
            quantities.push(Quantity::at_most("TV(output, Born)", tv, tols.histogram_tv));
        } else {
            quantities.push(Quantity::info("TV(output, Born)", tv));
        }
        if spec.object_profile == ObjectProfile::Gaussian {
            let moments = self.unit_moments(&state, &unit)?.evolve(unit.endpoint())?;
            let law = moments.observable_distribution(unit.probe_observable())?;
            let edges = output.bin_edges();
            // grid samples sit at the left edge of their cells
            let half_cell = state.dy() / 2.0;
            let gap = output
                .probabilities
                .iter()
                .enumerate()
                .map(|(i, p)| (p - law.interval_probability(edges[i] - half_cell, edges[i + 1] - half_cell)).abs())
                .fold(0.0, f64::max);
            quantities.push(Quantity::at_most("max bin gap to normal law", gap, tols.histogram_cdf));
        }

        let edges = output.bin_edges();
        let mut csv = String::from("bin_lo,bin_hi,output,born\n");
        for (i, (p, q)) in output.probabilities.iter().zip(&born.probabilities).enumerate() {
            let _ = writeln!(csv, "{:e},{:e},{p:e},{q:e}", edges[i], edges[i + 1]);
        }
        let histogram = format!("{}-histogram.csv", self.scenario.name);
        let mut marginals = Vec::new();
        after.write_marginals_csv(&mut marginals).expect("writing to memory");
        let marginal_file = format!("{}-marginals.csv", self.scenario.name);
        artifacts.push(Artifact {
            file_name: histogram.clone(),
            contents: csv,
        });
        artifacts.push(Artifact {
            file_name: marginal_file.clone(),
            contents: String::from_utf8(marginals).expect("CSV is ASCII"),
        });
        let mut report = CheckReport::new(Check::GridCrosscheck.name(), quantities);
        report.artifacts = vec![histogram, marginal_file];
        Ok(report)
    }

    fn born_sampling(&self) -> Result<CheckReport> {
        let spec = &self.scenario.sampling;
        let joint = self.model.joint_state(&self.object, &self.probe)?;
        let after = joint.evolve(self.model.endpoint())?;
        let output = after.observable_distribution(self.model.probe_observable())?;
        let born = joint.observable_distribution(self.model.measured())?;
        let samples = sample_outcomes(&output, spec.count, self.scenario.seed);
        let again = sample_outcomes(&output, spec.count, self.scenario.seed);
        let deterministic = samples.iter().zip(&again).all(|(a, b)| a.to_bits() == b.to_bits());
        let d = ks_statistic(&samples, |x| born.cdf(x));
        let critical = ks_critical_value(spec.count, spec.alpha);
        Ok(CheckReport::new(
            Check::BornSampling.name(),
            vec![
                Quantity::info("samples", spec.count as f64),
                Quantity::info("output mean", output.mean),
                Quantity::info("output variance", output.variance),
                Quantity::info("Born mean", born.mean),
                Quantity::info("Born variance", born.variance),
                Quantity::below("KS statistic", d, critical),
                Quantity::equals("deterministic", deterministic, true),
            ],
        ))
    }
}
