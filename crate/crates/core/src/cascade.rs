//! Two equivalent apparatuses measuring the object in succession.
//!
//! The composite system is `object (x) probe1 (x) probe2`. The first copy of
//! the model couples object and probe 1 during `(t, t + dt)`, the second
//! copy couples object and probe 2 during `(t + dt, t + 2 dt)`. In the
//! Heisenberg picture the total map is `S_2 S_1`, where `S_k` is the model's
//! endpoint map embedded on modes `(0, k)`.

use crate::canonical::{LinearObservable, ModeSystem, SymplecticPropagation};
use crate::error::{invalid, Result};
use crate::measurement::MeasurementModel;
use crate::states::MomentState;

const FIRST_PROBE: usize = 1;
const SECOND_PROBE: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeScenario {
    model: MeasurementModel,
    object_state: MomentState,
    probe_state: MomentState,
    second_probe_state: Option<MomentState>,
    system: ModeSystem,
}

impl CascadeScenario {
    /// Both probes prepared in `probe_state`.
    pub fn new(model: MeasurementModel, object_state: MomentState, probe_state: MomentState) -> Result<Self> {
        for s in [&object_state, &probe_state] {
            if s.system().modes() != 1 {
                return Err(invalid("state", "cascade states must be single-mode"));
            }
            s.check_physical()?;
        }
        let system = ModeSystem::new(["object", "probe1", "probe2"], model.system().hbar())?;
        let scenario = Self {
            model,
            object_state,
            probe_state,
            second_probe_state: None,
            system,
        };
        scenario.joint_state()?;
        Ok(scenario)
    }

    /// Prepares the second probe differently from the first.
    pub fn with_second_probe(mut self, state: MomentState) -> Result<Self> {
        if state.system().modes() != 1 {
            return Err(invalid("state", "cascade states must be single-mode"));
        }
        self.second_probe_state = Some(state);
        self.joint_state()?;
        Ok(self)
    }

    pub fn model(&self) -> &MeasurementModel {
        &self.model
    }

    pub fn system(&self) -> &ModeSystem {
        &self.system
    }

    /// `object (x) probe (x) probe'`.
    pub fn joint_state(&self) -> Result<MomentState> {
        let second = self.second_probe_state.as_ref().unwrap_or(&self.probe_state);
        self.object_state
            .product(&self.probe_state)?
            .product(second)?
            .relabeled(&self.system)
    }

    pub fn first_propagation(&self) -> Result<SymplecticPropagation> {
        self.model.endpoint().embed(&[0, FIRST_PROBE], &self.system)
    }

    pub fn second_propagation(&self) -> Result<SymplecticPropagation> {
        self.model.endpoint().embed(&[0, SECOND_PROBE], &self.system)
    }

    /// `S_2 S_1`.
    pub fn total_propagation(&self) -> Result<SymplecticPropagation> {
        self.second_propagation()?.then_after(&self.first_propagation()?)
    }

    fn probe_readout(&self, probe_mode: usize) -> Result<LinearObservable> {
        // The model's probe observable, moved from probe mode 1 of the
        // two-mode system onto `probe_mode` of the cascade.
        let source = self.model.probe_observable();
        let mut coeffs = vec![0.0; self.system.dim()];
        for (i, &c) in source.coeffs().iter().enumerate() {
            let mode = if i / 2 == 0 { 0 } else { probe_mode };
            coeffs[2 * mode + i % 2] = c;
        }
        LinearObservable::new(&self.system, coeffs, source.offset())
    }

    /// `y(t + dt)`: first output, after the first interaction only.
    pub fn first_output_observable(&self) -> Result<LinearObservable> {
        self.first_propagation()?
            .heisenberg_apply(&self.probe_readout(FIRST_PROBE)?)
    }

    /// `z(t + 2 dt)`: second output, after both interactions.
    pub fn second_output_observable(&self) -> Result<LinearObservable> {
        self.total_propagation()?
            .heisenberg_apply(&self.probe_readout(SECOND_PROBE)?)
    }

    /// `<(z(t + 2 dt) - y(t + dt))^2>^(1/2)`.
    pub fn repeatability_deviation(&self) -> Result<f64> {
        let diff = self
            .second_output_observable()?
            .checked_sub(&self.first_output_observable()?)?;
        self.joint_state()?.rms(&diff)
    }

    /// Whether the deviation between successive outputs is at most `alpha`.
    pub fn is_alpha_repeatable(&self, alpha: f64) -> Result<bool> {
        Ok(self.repeatability_deviation()? <= alpha)
    }
}
