//! Indirect position-measurement models.
//!
//! An object mode (index 0) interacts with a probe mode (index 1) through a
//! quadratic Hamiltonian `K * F` for a time `dt = 1/K`; afterwards the probe
//! observable is read out exactly. With `S` the Heisenberg map over the
//! interaction,
//!
//! * noise operator: `N(A) = M(t + dt) - A(t)`, noise `eps(A) = <N(A)^2>^(1/2)`,
//! * disturbance operator: `D(B) = B(t + dt) - B(t)`, `eta(B) = <D(B)^2>^(1/2)`,
//!
//! with expectations taken in the product state `object (x) probe` at time `t`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::canonical::{
    BilinearTerm, LinearObservable, ModeSystem, QuadraticHamiltonian, SymplecticPropagation,
};
use crate::error::{invalid, Error, Result};
use crate::numerics::{self, DEFAULT_TOL};
use crate::states::{ModeGaussian, MomentState};

pub const OBJECT: usize = 0;
pub const PROBE: usize = 1;

/// Coordinate indices on the two-mode object/probe system.
pub const X: usize = 0;
pub const PX: usize = 1;
pub const Y: usize = 2;
pub const PY: usize = 3;

/// `pi / (3 sqrt 3)`, the rate prefactor of the position-swapping interaction.
pub fn ozawa_rate() -> f64 {
    PI / (3.0 * 3f64.sqrt())
}

/// `x p_y`: the von Neumann coupling, unit strength.
pub fn von_neumann_terms() -> Vec<BilinearTerm> {
    vec![BilinearTerm::new(1.0, X, PY)]
}

/// `g (2 x p_y - 2 p_x y + x p_x - y p_y)` with `g = pi / (3 sqrt 3)`.
pub fn ozawa_terms() -> Vec<BilinearTerm> {
    let g = ozawa_rate();
    vec![
        BilinearTerm::new(2.0 * g, X, PY),
        BilinearTerm::new(-2.0 * g, PX, Y),
        BilinearTerm::new(g, X, PX),
        BilinearTerm::new(-g, Y, PY),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    VonNeumann,
    Ozawa,
    Custom,
}

/// An object/probe interaction together with the measured and probe
/// observables.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementModel {
    kind: ModelKind,
    system: ModeSystem,
    hamiltonian: QuadraticHamiltonian,
    coupling: f64,
    dt: f64,
    measured: LinearObservable,
    probe_obs: LinearObservable,
    endpoint: SymplecticPropagation,
}

impl MeasurementModel {
    /// `H = K x p_y`.
    pub fn von_neumann(coupling: f64) -> Result<Self> {
        Self::with_hbar(ModelKind::VonNeumann, &von_neumann_terms(), coupling, 1.0)
    }

    /// `H = K pi/(3 sqrt 3) (2 x p_y - 2 p_x y + x p_x - y p_y)`.
    pub fn ozawa(coupling: f64) -> Result<Self> {
        Self::with_hbar(ModelKind::Ozawa, &ozawa_terms(), coupling, 1.0)
    }

    /// One of the named models on a system with the given `hbar`.
    pub fn named(kind: ModelKind, coupling: f64, hbar: f64) -> Result<Self> {
        match kind {
            ModelKind::VonNeumann => Self::with_hbar(kind, &von_neumann_terms(), coupling, hbar),
            ModelKind::Ozawa => Self::with_hbar(kind, &ozawa_terms(), coupling, hbar),
            ModelKind::Custom => Err(invalid("kind", "custom models need a term list")),
        }
    }

    /// Arbitrary unit-strength interaction `F`; the Hamiltonian is `K F`.
    /// Measures `x` of the object and reads out `y` of the probe.
    pub fn custom(terms: &[BilinearTerm], coupling: f64, hbar: f64) -> Result<Self> {
        Self::with_hbar(ModelKind::Custom, terms, coupling, hbar)
    }

    fn with_hbar(kind: ModelKind, terms: &[BilinearTerm], coupling: f64, hbar: f64) -> Result<Self> {
        if !(coupling > 0.0 && coupling.is_finite()) {
            return Err(invalid("coupling", format!("must be positive and finite, got {coupling}")));
        }
        let system = ModeSystem::new(["object", "probe"], hbar)?;
        let hamiltonian = QuadraticHamiltonian::build(&system, terms)?.scaled(coupling);
        let dt = 1.0 / coupling;
        if (coupling * dt - 1.0).abs() > DEFAULT_TOL {
            return Err(invalid("coupling", "K * dt = 1 cannot be represented"));
        }
        let endpoint = hamiltonian.propagate(dt)?;
        Ok(Self {
            kind,
            measured: LinearObservable::position(&system, OBJECT),
            probe_obs: LinearObservable::position(&system, PROBE),
            system,
            hamiltonian,
            coupling,
            dt,
            endpoint,
        })
    }

    /// Replaces the probe observable. Any linear observable is accepted.
    pub fn with_probe_observable(mut self, probe_obs: LinearObservable) -> Result<Self> {
        if !self.system.compatible(probe_obs.system()) {
            return Err(Error::SystemMismatch);
        }
        self.probe_obs = probe_obs;
        Ok(self)
    }

    /// Replaces the measured observable, which must live on the object mode.
    pub fn with_measured_observable(mut self, measured: LinearObservable) -> Result<Self> {
        if !self.system.compatible(measured.system()) {
            return Err(Error::SystemMismatch);
        }
        if !measured.supported_on_mode(OBJECT, 0.0) {
            return Err(invalid("measured", "measured observable must act on the object only"));
        }
        self.measured = measured;
        Ok(self)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn system(&self) -> &ModeSystem {
        &self.system
    }

    pub fn hamiltonian(&self) -> &QuadraticHamiltonian {
        &self.hamiltonian
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn measured(&self) -> &LinearObservable {
        &self.measured
    }

    pub fn probe_observable(&self) -> &LinearObservable {
        &self.probe_obs
    }

    /// Heisenberg map over the whole interaction, `r(t + dt) = S r(t)`.
    pub fn endpoint(&self) -> &SymplecticPropagation {
        &self.endpoint
    }

    /// Heisenberg map over `tau` (normally within `[0, dt]`).
    pub fn propagation_at(&self, tau: f64) -> Result<SymplecticPropagation> {
        self.hamiltonian.propagate(tau)
    }

    pub fn object_position(&self) -> LinearObservable {
        LinearObservable::position(&self.system, OBJECT)
    }

    pub fn object_momentum(&self) -> LinearObservable {
        LinearObservable::momentum(&self.system, OBJECT)
    }

    /// `object (x) probe` on this model's system.
    pub fn joint_state(&self, object: &MomentState, probe: &MomentState) -> Result<MomentState> {
        if object.system().modes() != 1 || probe.system().modes() != 1 {
            return Err(invalid("state", "object and probe states must be single-mode"));
        }
        object.product(probe)?.relabeled(&self.system)
    }

    /// `N(A) = M(t + dt) - A(t)`.
    pub fn noise_operator(&self) -> LinearObservable {
        self.endpoint
            .heisenberg_apply(&self.probe_obs)
            .and_then(|m| m.checked_sub(&self.measured))
            .expect("model observables share the model system")
    }

    /// `D(B) = B(t + dt) - B(t)`.
    pub fn disturbance_operator(&self, b: &LinearObservable) -> Result<LinearObservable> {
        self.endpoint.heisenberg_apply(b)?.checked_sub(b)
    }

    /// `eps(A)` in the state `object (x) probe`.
    pub fn noise(&self, object: &MomentState, probe: &MomentState) -> Result<f64> {
        self.joint_state(object, probe)?.rms(&self.noise_operator())
    }

    /// `eta(B)` in the state `object (x) probe`.
    pub fn disturbance(
        &self,
        object: &MomentState,
        probe: &MomentState,
        b: &LinearObservable,
    ) -> Result<f64> {
        self.joint_state(object, probe)?.rms(&self.disturbance_operator(b)?)
    }

    /// Noise for `x`, disturbance for `p_x`, and both trade-off products.
    pub fn heisenberg_verdict(&self, object: &MomentState, probe: &MomentState) -> Result<NoiseReport> {
        self.heisenberg_verdict_with_tol(object, probe, DEFAULT_TOL)
    }

    /// As [`heisenberg_verdict`](Self::heisenberg_verdict); `tol` is in units of `hbar`.
    pub fn heisenberg_verdict_with_tol(
        &self,
        object: &MomentState,
        probe: &MomentState,
        tol: f64,
    ) -> Result<NoiseReport> {
        let joint = self.joint_state(object, probe)?;
        let hbar = self.system.hbar();
        let epsilon = joint.rms(&self.noise_operator())?;
        let eta = joint.rms(&self.disturbance_operator(&self.object_momentum())?)?;
        let sigma_x_pre = joint.std_dev(&self.object_position())?;
        let bound = hbar / 2.0;
        let product = epsilon * eta;
        let tradeoff_product = sigma_x_pre * eta;
        Ok(NoiseReport {
            epsilon,
            eta,
            product,
            heisenberg_bound: bound,
            satisfied: product >= bound - tol * hbar,
            sigma_x_pre,
            tradeoff_product,
            tradeoff_satisfied: tradeoff_product >= bound - tol * hbar,
        })
    }

    /// Noise/disturbance along a schedule of states approaching the zero
    /// momentum eigenstate: object and probe both zero-mean with momentum
    /// width `sigma_p` and position width `hbar / (2 sigma_p)`.
    pub fn limit_sweep(&self, sigma_p_schedule: &[f64]) -> Result<Vec<SweepRow>> {
        let hbar = self.system.hbar();
        sigma_p_schedule
            .iter()
            .map(|&sigma_p| {
                if !(sigma_p > 0.0 && sigma_p.is_finite()) {
                    return Err(invalid("sigma_p", format!("must be positive, got {sigma_p}")));
                }
                let sigma_x = hbar / (2.0 * sigma_p);
                let g = ModeGaussian::new(0.0, 0.0, sigma_x, sigma_p, 0.0);
                let object = MomentState::single_mode("object", g, hbar)?;
                let probe = MomentState::single_mode("probe", g, hbar)?;
                let report = self.heisenberg_verdict(&object, &probe)?;
                let after = self.joint_state(&object, &probe)?.evolve(&self.endpoint)?;
                let post_sigma_x = after.std_dev(&self.object_position())?;
                Ok(SweepRow {
                    sigma_p,
                    sigma_x,
                    report,
                    post_sigma_x,
                })
            })
            .collect()
    }
}

/// `sigma_p = 2^-k` for `k = 0..=k_max`.
pub fn momentum_eigenstate_schedule(k_max: u32) -> Vec<f64> {
    (0..=k_max).map(|k| 2f64.powi(-(k as i32))).collect()
}

/// Noise, disturbance and the two trade-off products for one input state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseReport {
    pub epsilon: f64,
    pub eta: f64,
    /// `epsilon * eta`.
    pub product: f64,
    /// `hbar / 2`.
    pub heisenberg_bound: f64,
    /// `epsilon * eta >= hbar / 2` within tolerance.
    pub satisfied: bool,
    pub sigma_x_pre: f64,
    /// `sigma(x) * eta`.
    pub tradeoff_product: f64,
    pub tradeoff_satisfied: bool,
}

impl NoiseReport {
    pub fn verdict(&self) -> &'static str {
        if self.satisfied {
            "Heisenberg relation satisfied"
        } else {
            "Heisenberg relation violated"
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub sigma_p: f64,
    pub sigma_x: f64,
    pub report: NoiseReport,
    /// Object position spread right after the interaction.
    pub post_sigma_x: f64,
}

/// `exp(-(i/hbar) theta x p_y)` as a Heisenberg map: `y -> y + theta x`,
/// `p_x -> p_x - theta p_y`.
pub fn shear_x_py(system: &ModeSystem, theta: f64) -> Result<SymplecticPropagation> {
    QuadraticHamiltonian::build(system, &[BilinearTerm::new(1.0, X, PY)])?.propagate(theta)
}

/// `exp((i/hbar) theta p_x y)` as a Heisenberg map: `x -> x - theta y`,
/// `p_y -> p_y + theta p_x`.
pub fn shear_px_y(system: &ModeSystem, theta: f64) -> Result<SymplecticPropagation> {
    QuadraticHamiltonian::build(system, &[BilinearTerm::new(-1.0, PX, Y)])?.propagate(theta)
}

/// Order of the two shear factors in the product compared against the
/// position-swapping propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorOrder {
    /// `exp(-i x p_y) exp(i p_x y)`: the `p_x y` shear acts on the state first.
    PxYFirst,
    /// `exp(i p_x y) exp(-i x p_y)`.
    XPyFirst,
}

/// Frobenius distance between the position-swapping endpoint map and the
/// product of the two unit shears taken in `order`.
pub fn realization_residual(coupling: f64, order: FactorOrder) -> Result<f64> {
    let model = MeasurementModel::ozawa(coupling)?;
    let sys = model.system();
    let a = shear_x_py(sys, 1.0)?;
    let b = shear_px_y(sys, 1.0)?;
    let product = match order {
        FactorOrder::PxYFirst => a.then_after(&b)?,
        FactorOrder::XPyFirst => b.then_after(&a)?,
    };
    numerics::frobenius_distance(model.endpoint().matrix(), product.matrix())
}

/// Residual of the factorization in its stated order.
pub fn realization_check(coupling: f64) -> Result<f64> {
    realization_residual(coupling, FactorOrder::PxYFirst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::tests::admissible_mode;
    use proptest::strategy::{Strategy, ValueTree};
    use proptest::test_runner::TestRunner;

    fn obs(model: &MeasurementModel, coeffs: [f64; 4]) -> LinearObservable {
        LinearObservable::new(model.system(), coeffs.to_vec(), 0.0).unwrap()
    }

    fn state(label: &str, g: ModeGaussian) -> MomentState {
        MomentState::single_mode(label, g, 1.0).unwrap()
    }

    fn assert_obs(actual: &LinearObservable, expected: &LinearObservable, tol: f64) {
        let diff = actual.max_difference(expected).unwrap();
        assert!(diff <= tol, "{actual} != {expected} (diff {diff:e})");
    }

    #[test]
    fn von_neumann_endpoint_relations() {
        let m = MeasurementModel::von_neumann(1.0).unwrap();
        let s = m.endpoint();
        let px_after = s.heisenberg_apply(&obs(&m, [0.0, 1.0, 0.0, 0.0])).unwrap();
        assert_obs(&px_after, &obs(&m, [0.0, 1.0, 0.0, -1.0]), 1e-15);
        let y_after = s.heisenberg_apply(&obs(&m, [0.0, 0.0, 1.0, 0.0])).unwrap();
        assert_obs(&y_after, &obs(&m, [1.0, 0.0, 1.0, 0.0]), 1e-15);
        let m10 = MeasurementModel::von_neumann(10.0).unwrap();
        assert!((m10.dt() - 0.1).abs() <= 1e-16);
        let d = numerics::max_abs_difference(m10.endpoint().matrix(), s.matrix()).unwrap();
        assert!(d <= 1e-14);
    }

    #[test]
    fn von_neumann_half_time() {
        let m = MeasurementModel::von_neumann(4.0).unwrap();
        let s = m.propagation_at(0.5 / 4.0).unwrap();
        let y = s.heisenberg_apply(&obs(&m, [0.0, 0.0, 1.0, 0.0])).unwrap();
        assert_obs(&y, &obs(&m, [0.5, 0.0, 1.0, 0.0]), 1e-15);
    }

    #[test]
    fn ozawa_endpoint_relations() {
        let m = MeasurementModel::ozawa(1.0).unwrap();
        let s = m.endpoint();
        let after = |c| s.heisenberg_apply(&obs(&m, c)).unwrap();
        assert_obs(&after([1.0, 0.0, 0.0, 0.0]), &obs(&m, [1.0, 0.0, -1.0, 0.0]), 1e-12);
        assert_obs(&after([0.0, 0.0, 1.0, 0.0]), &obs(&m, [1.0, 0.0, 0.0, 0.0]), 1e-12);
        assert_obs(&after([0.0, 1.0, 0.0, 0.0]), &obs(&m, [0.0, 0.0, 0.0, -1.0]), 1e-12);
        assert_obs(&after([0.0, 0.0, 0.0, 1.0]), &obs(&m, [0.0, 1.0, 0.0, 1.0]), 1e-12);
    }

    #[test]
    fn ozawa_third_time_position() {
        // x(t + tau) = (2/sqrt 3)[sin((1 + K tau) pi/3) x - sin(K tau pi/3) y] at K tau = 1/3
        let m = MeasurementModel::ozawa(3.0).unwrap();
        let s = m.propagation_at(1.0 / 9.0).unwrap();
        let c = 2.0 / 3f64.sqrt();
        let x = s.heisenberg_apply(&m.object_position()).unwrap();
        let expected = obs(&m, [c * (4.0 * PI / 9.0).sin(), 0.0, -c * (PI / 9.0).sin(), 0.0]);
        assert_obs(&x, &expected, 1e-12);
    }

    #[test]
    fn noise_operators() {
        let vn = MeasurementModel::von_neumann(1.0).unwrap();
        assert_obs(&vn.noise_operator(), &obs(&vn, [0.0, 0.0, 1.0, 0.0]), 1e-15);
        let oz = MeasurementModel::ozawa(1.0).unwrap();
        assert!(oz.noise_operator().is_zero(1e-12));

        let empty: [BilinearTerm; 0] = [];
        let idle = MeasurementModel::custom(&empty, 1.0, 1.0).unwrap();
        let idle = idle.clone().with_probe_observable(idle.object_position()).unwrap();
        assert!(idle.noise_operator().is_zero(0.0));
    }

    #[test]
    fn disturbance_operators() {
        let vn = MeasurementModel::von_neumann(1.0).unwrap();
        let d = vn.disturbance_operator(&vn.object_momentum()).unwrap();
        assert_obs(&d, &obs(&vn, [0.0, 0.0, 0.0, -1.0]), 1e-15);
        assert!(vn.disturbance_operator(&vn.object_position()).unwrap().is_zero(0.0));
        let oz = MeasurementModel::ozawa(1.0).unwrap();
        let d = oz.disturbance_operator(&oz.object_momentum()).unwrap();
        assert_obs(&d, &obs(&oz, [0.0, -1.0, 0.0, -1.0]), 1e-12);
    }

    #[test]
    fn noise_values() {
        let vn = MeasurementModel::von_neumann(1.0).unwrap();
        let object = state("object", ModeGaussian::new(0.3, -0.2, 1.0, 1.0, 0.0));
        let probe = state("probe", ModeGaussian::new(0.0, 0.0, 0.5, 1.0, 0.0));
        assert!((vn.noise(&object, &probe).unwrap() - 0.5).abs() <= 1e-15);

        let oz = MeasurementModel::ozawa(1.0).unwrap();
        assert!(oz.noise(&object, &probe).unwrap() <= 1e-12);

        // Position spread -> 0 leaves only the bias of the probe pointer.
        let probe = state("probe", ModeGaussian::new(1.0, 0.0, 1e-9, 1e9, 0.0));
        assert!((vn.noise(&object, &probe).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn disturbance_values() {
        let vn = MeasurementModel::von_neumann(1.0).unwrap();
        let object = state("object", ModeGaussian::new(0.0, 0.7, 1.0, 1.0, 0.0));
        let probe = state("probe", ModeGaussian::new(0.0, 0.0, 0.5, 2.0, 0.0));
        let px = vn.object_momentum();
        assert!((vn.disturbance(&object, &probe, &px).unwrap() - 2.0).abs() <= 1e-15);
        assert_eq!(vn.disturbance(&object, &probe, &vn.object_position()).unwrap(), 0.0);

        let oz = MeasurementModel::ozawa(1.0).unwrap();
        let probe = state("probe", ModeGaussian::new(0.0, -0.4, 0.5, 2.0, 0.3));
        let eta = oz.disturbance(&object, &probe, &px).unwrap();
        let closed = (1.0f64 + 4.0 + (0.7f64 - 0.4).powi(2)).sqrt();
        assert!((eta - closed).abs() <= 1e-12);
    }

    #[test]
    fn verdicts() {
        let half = 0.5f64.sqrt();
        let object = state("object", ModeGaussian::new(0.2, 0.1, 1.3, 0.9, 0.1));
        let probe = state("probe", ModeGaussian::minimum_uncertainty(half, 1.0));
        let vn = MeasurementModel::von_neumann(1.0).unwrap();
        let r = vn.heisenberg_verdict(&object, &probe).unwrap();
        assert!((r.product - 0.5).abs() <= 1e-9);
        assert!(r.satisfied);
        assert_eq!(r.verdict(), "Heisenberg relation satisfied");

        let oz = MeasurementModel::ozawa(1.0).unwrap();
        let r = oz.heisenberg_verdict(&object, &probe).unwrap();
        assert!(r.epsilon <= 1e-12);
        assert!(r.product <= 1e-11);
        assert!(!r.satisfied);
        assert!(r.tradeoff_satisfied && r.tradeoff_product >= 0.5);
        assert_eq!(r.verdict(), "Heisenberg relation violated");
    }

    #[test]
    fn realization_identity_and_order() {
        for k in [1.0, 0.5, 7.0] {
            assert!(realization_check(k).unwrap() <= 1e-12);
        }
        assert!(realization_residual(1.0, FactorOrder::XPyFirst).unwrap() > 0.5);
        let sys = ModeSystem::natural(["object", "probe"]).unwrap();
        assert!(shear_x_py(&sys, 1.0).unwrap().symplectic_defect() <= 1e-12);
        assert!(shear_px_y(&sys, 1.0).unwrap().symplectic_defect() <= 1e-12);
    }

    #[test]
    fn sweep_closed_forms() {
        let oz = MeasurementModel::ozawa(1.0).unwrap();
        let rows = oz.limit_sweep(&momentum_eigenstate_schedule(10)).unwrap();
        assert_eq!(rows.len(), 11);
        for (k, row) in rows.iter().enumerate() {
            let sp = 2f64.powi(-(k as i32));
            assert!(row.report.epsilon <= 1e-12);
            assert!((row.report.eta - (2.0 * sp * sp).sqrt()).abs() <= 1e-12);
            let sx = 0.5 / sp;
            assert!((row.post_sigma_x - (2.0 * sx * sx).sqrt()).abs() <= 1e-12 * sx);
        }
        for w in rows.windows(2) {
            assert!(w[1].report.eta < w[0].report.eta);
            assert!(w[1].post_sigma_x > w[0].post_sigma_x);
        }
        assert!(oz.limit_sweep(&[0.0]).is_err());
    }

    #[test]
    fn bad_constructions() {
        assert!(MeasurementModel::ozawa(0.0).is_err());
        assert!(MeasurementModel::von_neumann(f64::NAN).is_err());
        assert!(MeasurementModel::named(ModelKind::Custom, 1.0, 1.0).is_err());
        let vn = MeasurementModel::von_neumann(1.0).unwrap();
        let y = LinearObservable::position(vn.system(), PROBE);
        assert!(vn.with_measured_observable(y).is_err());
    }

    fn random_pairs(n: usize) -> Vec<(ModeGaussian, ModeGaussian)> {
        let mut runner = TestRunner::deterministic();
        let strategy = (admissible_mode(), admissible_mode());
        (0..n)
            .map(|_| strategy.new_tree(&mut runner).unwrap().current())
            .collect()
    }

    #[test]
    fn zero_noise_everywhere_iff_zero_noise_operator() {
        let pairs = random_pairs(1000);
        for model in [
            MeasurementModel::von_neumann(1.0).unwrap(),
            MeasurementModel::ozawa(2.0).unwrap(),
        ] {
            let all_zero = pairs.iter().all(|(a, b)| {
                model.noise(&state("object", *a), &state("probe", *b)).unwrap() <= 1e-12
            });
            assert_eq!(all_zero, model.noise_operator().is_zero(1e-12), "{:?}", model.kind());
            assert_eq!(all_zero, model.kind() == ModelKind::Ozawa);
        }
    }

    #[test]
    fn zero_disturbance_everywhere_iff_zero_disturbance_operator() {
        let pairs = random_pairs(1000);
        for model in [
            MeasurementModel::von_neumann(1.0).unwrap(),
            MeasurementModel::ozawa(1.0).unwrap(),
        ] {
            for b in [model.object_position(), model.object_momentum()] {
                let all_zero = pairs.iter().all(|(s, t)| {
                    model
                        .disturbance(&state("object", *s), &state("probe", *t), &b)
                        .unwrap()
                        <= 1e-12
                });
                let op_zero = model.disturbance_operator(&b).unwrap().is_zero(1e-12);
                assert_eq!(all_zero, op_zero);
            }
        }
    }
}
