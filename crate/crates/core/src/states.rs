//! Moment-state calculus.
//!
//! A [`MomentState`] carries the first moments and the symmetrized second
//! central moments `cov_ij = <{r_i - mu_i, r_j - mu_j}> / 2` of a state.
//! Expectations of linear observables and of their squares depend only on
//! these, so noise and disturbance values are exact for any state with the
//! given moments. Interval probabilities additionally need the state to be
//! Gaussian, which is tracked by a flag.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::canonical::{commutator_constant, LinearObservable, ModeSystem, SymplecticPropagation};
use crate::error::{invalid, Error, Result};
use crate::numerics::{self, Matrix};

/// Tolerance of the physicality test `cov + i(hbar/2) Omega >= 0`, relative
/// to `max(1, ||cov||)`.
pub const PHYSICALITY_TOL: f64 = 1e-10;

/// Relative slack allowed on the Robertson bound of a Gaussian preparation.
pub const ADMISSIBILITY_TOL: f64 = 1e-12;

/// Gaussian preparation of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeGaussian {
    #[serde(default)]
    pub mean_x: f64,
    #[serde(default)]
    pub mean_p: f64,
    pub sigma_x: f64,
    pub sigma_p: f64,
    #[serde(default)]
    pub correlation: f64,
}

impl ModeGaussian {
    pub fn new(mean_x: f64, mean_p: f64, sigma_x: f64, sigma_p: f64, correlation: f64) -> Self {
        Self {
            mean_x,
            mean_p,
            sigma_x,
            sigma_p,
            correlation,
        }
    }

    /// Zero-mean, uncorrelated state with `sigma_x sigma_p = hbar / 2`.
    pub fn minimum_uncertainty(sigma_x: f64, hbar: f64) -> Self {
        Self::new(0.0, 0.0, sigma_x, hbar / (2.0 * sigma_x), 0.0)
    }

    /// Pure state with the given position width and correlation; the
    /// momentum width is fixed by `sigma_x^2 sigma_p^2 (1 - rho^2) = hbar^2/4`.
    pub fn pure(mean_x: f64, mean_p: f64, sigma_x: f64, correlation: f64, hbar: f64) -> Self {
        let sigma_p = hbar / (2.0 * sigma_x * (1.0 - correlation * correlation).sqrt());
        Self::new(mean_x, mean_p, sigma_x, sigma_p, correlation)
    }

    /// `sigma_x sigma_p sqrt(1 - rho^2)`, which is at least `hbar/2`.
    pub fn uncertainty_product(&self) -> f64 {
        self.sigma_x * self.sigma_p * (1.0 - self.correlation * self.correlation).sqrt()
    }

    pub fn covariance(&self) -> f64 {
        self.correlation * self.sigma_x * self.sigma_p
    }

    /// Same preparation expressed with `hbar = 1` (momenta divided by `hbar`).
    pub fn rescaled_to_unit_hbar(&self, hbar: f64) -> Self {
        Self::new(
            self.mean_x,
            self.mean_p / hbar,
            self.sigma_x,
            self.sigma_p / hbar,
            self.correlation,
        )
    }

    pub fn check_admissible(&self, mode: usize, hbar: f64) -> Result<()> {
        let fail = |reason: String| Error::Inadmissible { mode, reason };
        let finite = [
            self.mean_x,
            self.mean_p,
            self.sigma_x,
            self.sigma_p,
            self.correlation,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(fail("non-finite parameter".into()));
        }
        if self.sigma_x <= 0.0 || self.sigma_p <= 0.0 {
            return Err(fail(format!(
                "widths must be positive (sigma_x = {}, sigma_p = {})",
                self.sigma_x, self.sigma_p
            )));
        }
        if self.correlation.abs() >= 1.0 {
            return Err(fail(format!(
                "correlation {} outside (-1, 1)",
                self.correlation
            )));
        }
        let product = self.uncertainty_product();
        let bound = hbar / 2.0;
        if product < bound * (1.0 - ADMISSIBILITY_TOL) {
            return Err(fail(format!(
                "sigma_x*sigma_p*sqrt(1-rho^2) = {product} is below hbar/2 = {bound}"
            )));
        }
        Ok(())
    }
}

/// Per-mode Gaussian preparation of a (product) state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub modes: Vec<ModeGaussian>,
}

impl GaussianSpec {
    pub fn single(mode: ModeGaussian) -> Self {
        Self { modes: vec![mode] }
    }
}

impl From<ModeGaussian> for GaussianSpec {
    fn from(mode: ModeGaussian) -> Self {
        Self::single(mode)
    }
}

/// Distribution of one linear observable: a normal law, or a point mass when
/// the variance vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarDistribution {
    pub mean: f64,
    pub variance: f64,
}

impl ScalarDistribution {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if self.variance <= 0.0 {
            return if x >= self.mean { 1.0 } else { 0.0 };
        }
        let z = (x - self.mean) / self.std_dev();
        0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
    }

    /// Probability of the half-open interval `[lo, hi)`.
    pub fn interval_probability(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        if self.variance <= 0.0 {
            return if lo <= self.mean && self.mean < hi { 1.0 } else { 0.0 };
        }
        (self.cdf(hi) - self.cdf(lo)).max(0.0)
    }

    /// Draws `count` outcomes from an explicit generator.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        let sd = self.std_dev();
        (0..count)
            .map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                self.mean + sd * z
            })
            .collect()
    }
}

/// Deterministic outcome sampling: a ChaCha20 keystream seeded from `seed`,
/// mapped through the standard normal transform.
pub fn sample_outcomes(d: &ScalarDistribution, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    d.sample_with(&mut rng, count)
}

/// One-sample Kolmogorov-Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic critical value of the one-sample KS statistic at level `alpha`:
/// `sqrt(-ln(alpha/2) / 2) / sqrt(n)`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// Result of a Robertson uncertainty test `sigma(a) sigma(b) >= |<[a, b]>| / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobertsonCheck {
    pub lhs: f64,
    pub bound: f64,
    pub pass: bool,
}

/// First and symmetrized second moments of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentState {
    system: ModeSystem,
    mean: DVector<f64>,
    cov: Matrix,
    gaussian: bool,
}

impl MomentState {
    /// Product Gaussian state; block-diagonal covariance per mode.
    pub fn from_gaussian(spec: &GaussianSpec, system: &ModeSystem) -> Result<Self> {
        if spec.modes.len() != system.modes() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} modes", system.modes()),
                actual: format!("{} modes", spec.modes.len()),
            });
        }
        let d = system.dim();
        let mut mean = DVector::zeros(d);
        let mut cov = Matrix::zeros(d, d);
        for (m, g) in spec.modes.iter().enumerate() {
            g.check_admissible(m, system.hbar())?;
            let (x, p) = (2 * m, 2 * m + 1);
            mean[x] = g.mean_x;
            mean[p] = g.mean_p;
            cov[(x, x)] = g.sigma_x * g.sigma_x;
            cov[(p, p)] = g.sigma_p * g.sigma_p;
            cov[(x, p)] = g.covariance();
            cov[(p, x)] = g.covariance();
        }
        let state = Self {
            system: system.clone(),
            mean,
            cov,
            gaussian: true,
        };
        state.check_physical()?;
        Ok(state)
    }

    /// Single-mode Gaussian state on a fresh system.
    pub fn single_mode(label: &str, mode: ModeGaussian, hbar: f64) -> Result<Self> {
        let system = ModeSystem::new([label], hbar)?;
        Self::from_gaussian(&GaussianSpec::single(mode), &system)
    }

    /// Arbitrary moments. `gaussian` records whether the moments fully
    /// determine the state.
    pub fn from_moments(
        system: &ModeSystem,
        mean: DVector<f64>,
        cov: Matrix,
        gaussian: bool,
    ) -> Result<Self> {
        let d = system.dim();
        if mean.len() != d || cov.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: format!("mean {d}, cov ({d}, {d})"),
                actual: format!("mean {}, cov {:?}", mean.len(), cov.shape()),
            });
        }
        if !mean.iter().chain(cov.iter()).all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let scale = cov.amax().max(1.0);
        if !numerics::is_symmetric(&cov, 1e-14 * scale) {
            return Err(invalid("cov", "covariance must be symmetric"));
        }
        let cov = (&cov + cov.transpose()) * 0.5;
        let state = Self {
            system: system.clone(),
            mean,
            cov,
            gaussian,
        };
        state.check_physical()?;
        Ok(state)
    }

    pub fn system(&self) -> &ModeSystem {
        &self.system
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix {
        &self.cov
    }

    pub fn is_gaussian(&self) -> bool {
        self.gaussian
    }

    /// Same moments on a system with different labels.
    pub fn relabeled(&self, system: &ModeSystem) -> Result<Self> {
        if !self.system.compatible(system) {
            return Err(Error::SystemMismatch);
        }
        Ok(Self {
            system: system.clone(),
            ..self.clone()
        })
    }

    /// Minimum eigenvalue of the Hermitian matrix `cov + i (hbar/2) Omega`.
    pub fn physicality_margin(&self) -> f64 {
        let im = self.system.symplectic_form() * (self.system.hbar() / 2.0);
        numerics::min_hermitian_eigenvalue(&self.cov, &im)
            .expect("covariance is square and finite by construction")
    }

    pub fn check_physical(&self) -> Result<()> {
        let min = self.physicality_margin();
        let scale = self.cov.amax().max(1.0);
        if min < -PHYSICALITY_TOL * scale || self.cov.diagonal().iter().any(|&v| v < 0.0) {
            return Err(Error::Unphysical {
                min_eigenvalue: min,
            });
        }
        Ok(())
    }

    /// Uncorrelated composite `self (x) other`.
    pub fn product(&self, other: &MomentState) -> Result<MomentState> {
        let system = self.system.concat(&other.system)?;
        let (da, db) = (self.system.dim(), other.system.dim());
        let mean = DVector::from_iterator(da + db, self.mean.iter().chain(other.mean.iter()).copied());
        let mut cov = Matrix::zeros(da + db, da + db);
        cov.view_mut((0, 0), (da, da)).copy_from(&self.cov);
        cov.view_mut((da, da), (db, db)).copy_from(&other.cov);
        Ok(MomentState {
            system,
            mean,
            cov,
            gaussian: self.gaussian && other.gaussian,
        })
    }

    fn check_obs(&self, obs: &LinearObservable) -> Result<()> {
        if self.system.compatible(obs.system()) {
            Ok(())
        } else {
            Err(Error::SystemMismatch)
        }
    }

    pub fn expectation(&self, obs: &LinearObservable) -> Result<f64> {
        self.check_obs(obs)?;
        Ok(obs.coeffs().dot(&self.mean) + obs.offset())
    }

    /// `c^T cov c`.
    pub fn variance(&self, obs: &LinearObservable) -> Result<f64> {
        self.check_obs(obs)?;
        let c = obs.coeffs();
        Ok(c.dot(&(&self.cov * c)).max(0.0))
    }

    /// `<A^2> = c^T cov c + <A>^2`.
    ///
    /// The commutator part of the raw second moments is antisymmetric and
    /// drops out of a same-observable square.
    pub fn second_moment(&self, obs: &LinearObservable) -> Result<f64> {
        let mean = self.expectation(obs)?;
        Ok(self.variance(obs)? + mean * mean)
    }

    pub fn std_dev(&self, obs: &LinearObservable) -> Result<f64> {
        Ok(self.variance(obs)?.sqrt())
    }

    /// Root-mean-square value `<A^2>^(1/2)`.
    pub fn rms(&self, obs: &LinearObservable) -> Result<f64> {
        Ok(self.second_moment(obs)?.sqrt())
    }

    pub fn robertson_check(
        &self,
        a: &LinearObservable,
        b: &LinearObservable,
        tol: f64,
    ) -> Result<RobertsonCheck> {
        let lhs = self.std_dev(a)? * self.std_dev(b)?;
        let bound = commutator_constant(a, b)?.abs() / 2.0;
        Ok(RobertsonCheck {
            lhs,
            bound,
            pass: lhs >= bound - tol,
        })
    }

    /// Schrodinger-picture counterpart of
    /// [`SymplecticPropagation::heisenberg_apply`]: `mu -> S mu`,
    /// `cov -> S cov S^T`.
    pub fn evolve(&self, prop: &SymplecticPropagation) -> Result<MomentState> {
        if !self.system.compatible(prop.system()) {
            return Err(Error::SystemMismatch);
        }
        let s = prop.matrix();
        let cov = s * &self.cov * s.transpose();
        Ok(MomentState {
            system: self.system.clone(),
            mean: s * &self.mean,
            cov: (&cov + cov.transpose()) * 0.5,
            gaussian: self.gaussian,
        })
    }

    /// Law of `obs` in this state. Needs a Gaussian state.
    pub fn observable_distribution(&self, obs: &LinearObservable) -> Result<ScalarDistribution> {
        if !self.gaussian {
            return Err(Error::NotGaussian);
        }
        Ok(ScalarDistribution {
            mean: self.expectation(obs)?,
            variance: self.variance(obs)?,
        })
    }
}
