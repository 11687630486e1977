//! Noise and disturbance of indirect position measurements with bilinear
//! measuring interactions.
//!
//! The object and the probe are canonical modes. A measuring interaction is a
//! quadratic Hamiltonian, so its Heisenberg-picture action is a symplectic
//! matrix and every quantity of interest (noise, disturbance, output
//! statistics, repeatability) is a function of first and second moments.
//!
//! * [`numerics`]: small dense matrices and the matrix exponential.
//! * [`canonical`]: mode systems, linear observables, quadratic Hamiltonians
//!   and their propagators.
//! * [`states`]: moment states, Gaussian preparations and output sampling.
//! * [`measurement`]: the von Neumann and position-swapping models, noise and
//!   disturbance, trade-off verdicts, limit sweeps.
//! * [`cascade`]: two successive apparatuses and approximate repeatability.
//! * [`grid`]: a wavefunction simulator used as an independent oracle.
//!
//! ```
//! use qmeas_core::{MeasurementModel, ModeGaussian, MomentState};
//!
//! let object = MomentState::single_mode("object", ModeGaussian::minimum_uncertainty(1.0, 1.0), 1.0)?;
//! let probe = MomentState::single_mode("probe", ModeGaussian::minimum_uncertainty(0.1, 1.0), 1.0)?;
//!
//! let report = MeasurementModel::ozawa(1.0)?.heisenberg_verdict(&object, &probe)?;
//! assert!(report.epsilon < 1e-12);
//! assert!(!report.satisfied);
//! assert!(report.tradeoff_satisfied);
//! # Ok::<(), qmeas_core::Error>(())
//! ```

pub mod canonical;
pub mod cascade;
pub mod error;
pub mod grid;
pub mod measurement;
pub mod numerics;
pub mod states;

pub use canonical::{
    commutator_constant, BilinearTerm, LinearObservable, ModeSystem, QuadraticHamiltonian,
    SymplecticPropagation,
};
pub use cascade::CascadeScenario;
pub use error::{Error, Result};
pub use grid::{GridConfig, GridState, GridUnitary, Histogram};
pub use measurement::{MeasurementModel, ModelKind, NoiseReport, SweepRow};
pub use numerics::{Matrix, DEFAULT_TOL};
pub use states::{GaussianSpec, ModeGaussian, MomentState, ScalarDistribution};
