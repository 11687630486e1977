//! Canonical-mode bookkeeping.
//!
//! Coordinates of an `n`-mode system are ordered `(x_1, p_1, x_2, p_2, ...)`
//! and the symplectic form is block diagonal with blocks `[[0, 1], [-1, 0]]`,
//! so that `[r_i, r_j] = i hbar Omega_ij`.
//!
//! A quadratic Hamiltonian `H = 1/2 r^T F r` generates the Heisenberg-picture
//! flow `dr/dtau = Omega F r`, hence `r(t + tau) = exp(Omega F tau) r(t)`;
//! `hbar` cancels out of the propagator.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{invalid, Error, Result};
use crate::numerics::{self, Matrix, DEFAULT_TOL};

/// A collection of canonical modes sharing one value of `hbar`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSystem {
    labels: Arc<[String]>,
    hbar: f64,
}

impl ModeSystem {
    pub fn new<I, S>(labels: I, hbar: f64) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(invalid("labels", "a mode system needs at least one mode"));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(invalid("hbar", format!("must be positive and finite, got {hbar}")));
        }
        Ok(Self {
            labels: labels.into(),
            hbar,
        })
    }

    /// Mode system in natural units (`hbar = 1`).
    pub fn natural<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(labels, 1.0)
    }

    /// Number of modes.
    pub fn modes(&self) -> usize {
        self.labels.len()
    }

    /// Number of canonical coordinates, `2n`.
    pub fn dim(&self) -> usize {
        2 * self.labels.len()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Coordinate index of the position of `mode`.
    pub fn x_index(&self, mode: usize) -> usize {
        assert!(mode < self.modes(), "mode {mode} out of range");
        2 * mode
    }

    /// Coordinate index of the momentum of `mode`.
    pub fn p_index(&self, mode: usize) -> usize {
        assert!(mode < self.modes(), "mode {mode} out of range");
        2 * mode + 1
    }

    /// Same mode count and `hbar`. Labels are descriptive only.
    pub fn compatible(&self, other: &ModeSystem) -> bool {
        self.modes() == other.modes() && self.hbar == other.hbar
    }

    /// Composite system `self (x) other`.
    pub fn concat(&self, other: &ModeSystem) -> Result<ModeSystem> {
        if self.hbar != other.hbar {
            return Err(Error::SystemMismatch);
        }
        let labels: Vec<String> = self.labels.iter().chain(other.labels.iter()).cloned().collect();
        Ok(Self {
            labels: labels.into(),
            hbar: self.hbar,
        })
    }

    /// The symplectic form `Omega`.
    pub fn symplectic_form(&self) -> Matrix {
        let d = self.dim();
        let mut omega = Matrix::zeros(d, d);
        for m in 0..self.modes() {
            omega[(2 * m, 2 * m + 1)] = 1.0;
            omega[(2 * m + 1, 2 * m)] = -1.0;
        }
        omega
    }

    fn coordinate_name(&self, index: usize) -> String {
        let mode = &self.labels[index / 2];
        if index % 2 == 0 {
            format!("x[{mode}]")
        } else {
            format!("p[{mode}]")
        }
    }
}

/// Real linear combination of canonical coordinates plus a constant.
///
/// Every such combination is Hermitian; its value is `coeffs . r + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearObservable {
    system: ModeSystem,
    coeffs: DVector<f64>,
    offset: f64,
}

impl LinearObservable {
    pub fn new(system: &ModeSystem, coeffs: Vec<f64>, offset: f64) -> Result<Self> {
        if coeffs.len() != system.dim() {
            return Err(Error::DimensionMismatch {
                expected: system.dim().to_string(),
                actual: coeffs.len().to_string(),
            });
        }
        if !coeffs.iter().all(|c| c.is_finite()) || !offset.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            system: system.clone(),
            coeffs: DVector::from_vec(coeffs),
            offset,
        })
    }

    pub(crate) fn from_parts(system: ModeSystem, coeffs: DVector<f64>, offset: f64) -> Self {
        Self {
            system,
            coeffs,
            offset,
        }
    }

    pub fn zero(system: &ModeSystem) -> Self {
        Self::constant(system, 0.0)
    }

    pub fn constant(system: &ModeSystem, value: f64) -> Self {
        Self::from_parts(system.clone(), DVector::zeros(system.dim()), value)
    }

    /// A single canonical coordinate `r_index`.
    pub fn coordinate(system: &ModeSystem, index: usize) -> Result<Self> {
        if index >= system.dim() {
            return Err(Error::IndexOutOfRange {
                index,
                dim: system.dim(),
            });
        }
        let mut obs = Self::zero(system);
        obs.coeffs[index] = 1.0;
        Ok(obs)
    }

    /// Position of `mode`. Panics if the mode does not exist.
    pub fn position(system: &ModeSystem, mode: usize) -> Self {
        let mut obs = Self::zero(system);
        obs.coeffs[system.x_index(mode)] = 1.0;
        obs
    }

    /// Momentum of `mode`. Panics if the mode does not exist.
    pub fn momentum(system: &ModeSystem, mode: usize) -> Self {
        let mut obs = Self::zero(system);
        obs.coeffs[system.p_index(mode)] = 1.0;
        obs
    }

    pub fn system(&self) -> &ModeSystem {
        &self.system
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    fn same_system(&self, other: &Self) -> Result<()> {
        if self.system.compatible(&other.system) {
            Ok(())
        } else {
            Err(Error::SystemMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_system(other)?;
        Ok(Self::from_parts(
            self.system.clone(),
            &self.coeffs + &other.coeffs,
            self.offset + other.offset,
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_system(other)?;
        Ok(Self::from_parts(
            self.system.clone(),
            &self.coeffs - &other.coeffs,
            self.offset - other.offset,
        ))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_parts(self.system.clone(), &self.coeffs * factor, self.offset * factor)
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    /// All coefficients and the offset within `tol` of zero.
    pub fn is_zero(&self, tol: f64) -> bool {
        self.offset.abs() <= tol && self.coeffs.iter().all(|c| c.abs() <= tol)
    }

    /// Coefficients outside `mode` all within `tol` of zero.
    pub fn supported_on_mode(&self, mode: usize, tol: f64) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| i / 2 == mode || c.abs() <= tol)
    }

    /// Largest coefficient/offset difference to another observable.
    pub fn max_difference(&self, other: &Self) -> Result<f64> {
        self.same_system(other)?;
        Ok((&self.coeffs - &other.coeffs)
            .iter()
            .map(|c| c.abs())
            .fold((self.offset - other.offset).abs(), f64::max))
    }

    /// Coefficients and offset rounded to `decimals` decimal places; clears
    /// rounding residue before display.
    pub fn rounded(&self, decimals: i32) -> Self {
        let scale = 10f64.powi(decimals);
        let round = |v: f64| (v * scale).round() / scale + 0.0;
        Self::from_parts(self.system.clone(), self.coeffs.map(round), round(self.offset))
    }
}

impl fmt::Display for LinearObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let name = self.system.coordinate_name(i);
            match (wrote, c < 0.0) {
                (false, false) => write!(f, "{c}*{name}")?,
                (false, true) => write!(f, "-{}*{name}", -c)?,
                (true, false) => write!(f, " + {c}*{name}")?,
                (true, true) => write!(f, " - {}*{name}", -c)?,
            }
            wrote = true;
        }
        if self.offset != 0.0 || !wrote {
            if wrote {
                write!(f, " + {}", self.offset)?;
            } else {
                write!(f, "{}", self.offset)?;
            }
        }
        Ok(())
    }
}

/// `coefficient * r_left * r_right`, operator order as written.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BilinearTerm {
    pub coefficient: f64,
    pub left: usize,
    pub right: usize,
}

impl BilinearTerm {
    pub fn new(coefficient: f64, left: usize, right: usize) -> Self {
        Self {
            coefficient,
            left,
            right,
        }
    }
}

impl From<(f64, usize, usize)> for BilinearTerm {
    fn from((coefficient, left, right): (f64, usize, usize)) -> Self {
        Self::new(coefficient, left, right)
    }
}

/// Weyl-symmetrized quadratic Hamiltonian `H = 1/2 r^T F r`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticHamiltonian {
    system: ModeSystem,
    form: Matrix,
}

impl QuadraticHamiltonian {
    /// Builds the symmetric form from bilinear terms.
    ///
    /// `c r_i r_j` contributes `c` to `F_ij` and `F_ji` (or `2c` to `F_ii`).
    /// Writing `r_i r_j` as its symmetrization leaves a constant
    /// `i hbar c Omega_ij / 2`; these constants must cancel across the term
    /// list, otherwise the operator as written is not Hermitian.
    pub fn build<T>(system: &ModeSystem, terms: &[T]) -> Result<Self>
    where
        T: Into<BilinearTerm> + Copy,
    {
        let d = system.dim();
        let omega = system.symplectic_form();
        let mut form = Matrix::zeros(d, d);
        let mut anti_hermitian = 0.0;
        let mut scale: f64 = 0.0;
        for term in terms.iter().map(|&t| t.into()) {
            for index in [term.left, term.right] {
                if index >= d {
                    return Err(Error::IndexOutOfRange { index, dim: d });
                }
            }
            if !term.coefficient.is_finite() {
                return Err(Error::NonFinite);
            }
            let (i, j, c) = (term.left, term.right, term.coefficient);
            if i == j {
                form[(i, i)] += 2.0 * c;
            } else {
                form[(i, j)] += c;
                form[(j, i)] += c;
            }
            anti_hermitian += c * omega[(i, j)] / 2.0;
            scale = scale.max(c.abs());
        }
        if anti_hermitian.abs() > DEFAULT_TOL * scale.max(1.0) {
            return Err(Error::NonHermitianTerms {
                constant: anti_hermitian,
            });
        }
        Ok(Self {
            system: system.clone(),
            form,
        })
    }

    /// From an explicit symmetric form.
    pub fn from_form(system: &ModeSystem, form: Matrix) -> Result<Self> {
        if form.shape() != (system.dim(), system.dim()) {
            return Err(Error::DimensionMismatch {
                expected: format!("({0}, {0})", system.dim()),
                actual: format!("{:?}", form.shape()),
            });
        }
        if !numerics::is_symmetric(&form, 0.0) {
            return Err(invalid("form", "quadratic form must be symmetric"));
        }
        if !form.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            system: system.clone(),
            form,
        })
    }

    pub fn system(&self) -> &ModeSystem {
        &self.system
    }

    pub fn form(&self) -> &Matrix {
        &self.form
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            system: self.system.clone(),
            form: &self.form * factor,
        }
    }

    /// Heisenberg-picture generator `Omega F`.
    pub fn generator(&self) -> Matrix {
        self.system.symplectic_form() * &self.form
    }

    /// Propagator `r(t + duration) = S r(t)`, with `S = exp(Omega F duration)`.
    pub fn propagate(&self, duration: f64) -> Result<SymplecticPropagation> {
        if !duration.is_finite() {
            return Err(invalid("duration", format!("must be finite, got {duration}")));
        }
        let matrix = numerics::mat_exp(&(self.generator() * duration), DEFAULT_TOL)?;
        Ok(SymplecticPropagation {
            system: self.system.clone(),
            matrix,
        })
    }
}

/// Linear Heisenberg-picture map `r(t + tau) = S r(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticPropagation {
    system: ModeSystem,
    matrix: Matrix,
}

impl SymplecticPropagation {
    pub fn identity(system: &ModeSystem) -> Self {
        Self {
            system: system.clone(),
            matrix: Matrix::identity(system.dim(), system.dim()),
        }
    }

    /// Wraps an explicit matrix after checking it is symplectic within `tol`.
    pub fn from_matrix(system: &ModeSystem, matrix: Matrix, tol: f64) -> Result<Self> {
        if matrix.shape() != (system.dim(), system.dim()) {
            return Err(Error::DimensionMismatch {
                expected: format!("({0}, {0})", system.dim()),
                actual: format!("{:?}", matrix.shape()),
            });
        }
        let prop = Self {
            system: system.clone(),
            matrix,
        };
        let defect = prop.symplectic_defect();
        if defect > tol {
            return Err(invalid("matrix", format!("not symplectic, defect {defect:e}")));
        }
        Ok(prop)
    }

    pub fn system(&self) -> &ModeSystem {
        &self.system
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// `||S Omega S^T - Omega||_F`.
    pub fn symplectic_defect(&self) -> f64 {
        let omega = self.system.symplectic_form();
        let lhs = &self.matrix * &omega * self.matrix.transpose();
        numerics::frobenius_distance(&lhs, &omega).expect("shapes agree by construction")
    }

    pub fn is_symplectic(&self, tol: f64) -> bool {
        self.symplectic_defect() <= tol
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    /// Composition `self . other`: apply `other`'s unitary first, then `self`'s.
    ///
    /// For `U = U_a U_b` the Heisenberg map is `S_a S_b`.
    pub fn then_after(&self, other: &SymplecticPropagation) -> Result<Self> {
        if !self.system.compatible(&other.system) {
            return Err(Error::SystemMismatch);
        }
        Ok(Self {
            system: self.system.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// Heisenberg-picture image of an observable: coefficients become `S^T c`.
    pub fn heisenberg_apply(&self, obs: &LinearObservable) -> Result<LinearObservable> {
        if !self.system.compatible(obs.system()) {
            return Err(Error::SystemMismatch);
        }
        Ok(LinearObservable::from_parts(
            obs.system().clone(),
            self.matrix.transpose() * obs.coeffs(),
            obs.offset(),
        ))
    }

    /// Acts as `self` on the modes `mode_map[k]` of `target` and as the
    /// identity on every other mode.
    pub fn embed(&self, mode_map: &[usize], target: &ModeSystem) -> Result<Self> {
        if mode_map.len() != self.system.modes() {
            return Err(Error::InvalidModeMap(format!(
                "expected {} entries, got {}",
                self.system.modes(),
                mode_map.len()
            )));
        }
        if target.hbar() != self.system.hbar() {
            return Err(Error::SystemMismatch);
        }
        for (k, &m) in mode_map.iter().enumerate() {
            if m >= target.modes() {
                return Err(Error::InvalidModeMap(format!(
                    "mode {m} out of range for {} target modes",
                    target.modes()
                )));
            }
            if mode_map[..k].contains(&m) {
                return Err(Error::InvalidModeMap(format!("mode {m} mapped twice")));
            }
        }
        let mut matrix = Matrix::identity(target.dim(), target.dim());
        for (i, &ti) in mode_map.iter().enumerate() {
            for (j, &tj) in mode_map.iter().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        matrix[(2 * ti + a, 2 * tj + b)] = self.matrix[(2 * i + a, 2 * j + b)];
                    }
                }
            }
        }
        Ok(Self {
            system: target.clone(),
            matrix,
        })
    }
}

/// Real `c` with `[a, b] = i c`, i.e. `c = hbar a^T Omega b`.
pub fn commutator_constant(a: &LinearObservable, b: &LinearObservable) -> Result<f64> {
    if !a.system().compatible(b.system()) {
        return Err(Error::SystemMismatch);
    }
    let omega = a.system().symplectic_form();
    Ok(a.system().hbar() * a.coeffs().dot(&(omega * b.coeffs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_modes() -> ModeSystem {
        ModeSystem::natural(["object", "probe"]).unwrap()
    }

    #[test]
    fn von_neumann_form_is_direct_transcription() {
        let sys = two_modes();
        let k = 2.5;
        let h = QuadraticHamiltonian::build(&sys, &[(k, 0, 3)]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i, j) == (0, 3) || (i, j) == (3, 0) { k } else { 0.0 };
                assert_eq!(h.form()[(i, j)], expected);
            }
        }
    }

    #[test]
    fn ozawa_form_entries() {
        let sys = two_modes();
        let g = std::f64::consts::PI / (3.0 * 3f64.sqrt());
        let h = QuadraticHamiltonian::build(
            &sys,
            &[(2.0 * g, 0, 3), (-2.0 * g, 1, 2), (g, 0, 1), (-g, 2, 3)],
        )
        .unwrap();
        let f = h.form();
        assert_eq!(f[(0, 3)], 2.0 * g);
        assert_eq!(f[(3, 0)], 2.0 * g);
        assert_eq!(f[(1, 2)], -2.0 * g);
        assert_eq!(f[(2, 1)], -2.0 * g);
        assert_eq!(f[(0, 1)], g);
        assert_eq!(f[(1, 0)], g);
        assert_eq!(f[(2, 3)], -g);
        assert_eq!(f[(3, 2)], -g);
        assert_eq!(f[(0, 0)] + f[(1, 1)] + f[(2, 2)] + f[(3, 3)], 0.0);
        assert_eq!(f[(0, 2)], 0.0);
        assert_eq!(f[(1, 3)], 0.0);
    }

    #[test]
    fn empty_terms_give_zero_form() {
        let sys = two_modes();
        let h = QuadraticHamiltonian::build::<(f64, usize, usize)>(&sys, &[]).unwrap();
        assert_eq!(h.form(), &Matrix::zeros(4, 4));
    }

    #[test]
    fn build_rejects_bad_terms() {
        let sys = two_modes();
        assert!(matches!(
            QuadraticHamiltonian::build(&sys, &[(1.0, 0, 4)]),
            Err(Error::IndexOutOfRange { index: 4, dim: 4 })
        ));
        // x p alone carries an uncancelled i hbar / 2.
        assert!(matches!(
            QuadraticHamiltonian::build(&sys, &[(1.0, 0, 1)]),
            Err(Error::NonHermitianTerms { .. })
        ));
        // x p + p x is Hermitian.
        assert!(QuadraticHamiltonian::build(&sys, &[(1.0, 0, 1), (1.0, 1, 0)]).is_ok());
    }

    #[test]
    fn commutator_examples() {
        let sys = two_modes();
        let x = LinearObservable::position(&sys, 0);
        let p = LinearObservable::momentum(&sys, 0);
        let y = LinearObservable::position(&sys, 1);
        assert_eq!(commutator_constant(&x, &p).unwrap(), 1.0);
        assert_eq!(commutator_constant(&p, &x).unwrap(), -1.0);
        assert_eq!(commutator_constant(&x, &y).unwrap(), 0.0);
        let other = ModeSystem::new(["a", "b"], 2.0).unwrap();
        assert_eq!(
            commutator_constant(&x, &LinearObservable::position(&other, 0)),
            Err(Error::SystemMismatch)
        );
        let big = ModeSystem::new(["a"], 0.5).unwrap();
        let xb = LinearObservable::position(&big, 0);
        let pb = LinearObservable::momentum(&big, 0);
        assert_eq!(commutator_constant(&xb, &pb).unwrap(), 0.5);
    }

    #[test]
    fn von_neumann_generator_matches_closed_form() {
        let sys = two_modes();
        let k = 3.0;
        let h = QuadraticHamiltonian::build(&sys, &[(k, 0, 3)]).unwrap();
        let tau = 0.2;
        let s = h.propagate(tau).unwrap();
        // x -> x, y -> K tau x + y, p_x -> p_x - K tau p_y, p_y -> p_y
        let expected = Matrix::from_row_slice(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, -k * tau, //
                k * tau, 0.0, 1.0, 0.0, //
                0.0, 0.0, 0.0, 1.0,
            ],
        );
        assert!(numerics::max_abs_difference(s.matrix(), &expected).unwrap() <= 1e-14);
    }

    #[test]
    fn heisenberg_apply_identity() {
        let sys = two_modes();
        let obs = LinearObservable::new(&sys, vec![1.0, -2.0, 0.5, 3.0], 0.25).unwrap();
        let id = SymplecticPropagation::identity(&sys);
        assert_eq!(id.heisenberg_apply(&obs).unwrap(), obs);
    }

    #[test]
    fn embed_identity_and_errors() {
        let sys = two_modes();
        let three = ModeSystem::natural(["object", "probe1", "probe2"]).unwrap();
        let e = SymplecticPropagation::identity(&sys).embed(&[0, 2], &three).unwrap();
        assert_eq!(e.matrix(), &Matrix::identity(6, 6));
        let id = SymplecticPropagation::identity(&sys);
        assert!(matches!(id.embed(&[1, 1], &three), Err(Error::InvalidModeMap(_))));
        assert!(matches!(id.embed(&[0, 3], &three), Err(Error::InvalidModeMap(_))));
        assert!(matches!(id.embed(&[0], &three), Err(Error::InvalidModeMap(_))));
    }

    #[test]
    fn display_observable() {
        let sys = two_modes();
        let obs = LinearObservable::new(&sys, vec![1.0, 0.0, -1.0, 0.0], 0.0).unwrap();
        assert_eq!(obs.to_string(), "1*x[object] - 1*x[probe]");
        assert_eq!(LinearObservable::zero(&sys).to_string(), "0");
        let noisy = LinearObservable::new(&sys, vec![0.9999999999999993, 6e-16, -1e-17, 0.25], -3e-15).unwrap();
        assert_eq!(noisy.rounded(12).to_string(), "1*x[object] + 0.25*p[probe]");
    }

    fn random_hamiltonian(n: usize) -> impl Strategy<Value = QuadraticHamiltonian> {
        proptest::collection::vec(-1.0f64..1.0, n * 2 * n * 2).prop_map(move |v| {
            let d = 2 * n;
            let a = Matrix::from_row_slice(d, d, &v);
            let form = (&a + a.transpose()) * 0.5;
            let sys = ModeSystem::natural((0..n).map(|i| format!("m{i}"))).unwrap();
            QuadraticHamiltonian::from_form(&sys, form).unwrap()
        })
    }

    fn random_vector(d: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-3.0f64..3.0, d)
    }

    proptest! {
        #[test]
        fn propagation_is_symplectic_with_unit_determinant(h in random_hamiltonian(2), t in -1.5f64..1.5) {
            let s = h.propagate(t).unwrap();
            prop_assert!(s.symplectic_defect() <= 1e-12, "defect {:e}", s.symplectic_defect());
            prop_assert!((s.determinant() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn propagation_group_property(h in random_hamiltonian(2), s in -1.0f64..1.0, t in -1.0f64..1.0) {
            let a = h.propagate(s).unwrap();
            let b = h.propagate(t).unwrap();
            let c = h.propagate(s + t).unwrap();
            let ab = a.then_after(&b).unwrap();
            prop_assert!(numerics::frobenius_distance(ab.matrix(), c.matrix()).unwrap() <= 1e-12);
        }

        #[test]
        fn commutator_is_antisymmetric_and_bilinear(
            a in random_vector(4), b in random_vector(4), c in random_vector(4), s in -2.0f64..2.0
        ) {
            let sys = two_modes();
            let a = LinearObservable::new(&sys, a, 0.3).unwrap();
            let b = LinearObservable::new(&sys, b, -1.0).unwrap();
            let c = LinearObservable::new(&sys, c, 0.0).unwrap();
            let ab = commutator_constant(&a, &b).unwrap();
            prop_assert!((ab + commutator_constant(&b, &a).unwrap()).abs() <= 1e-12);
            let lhs = commutator_constant(&a.scaled(s).checked_add(&c).unwrap(), &b).unwrap();
            let rhs = s * ab + commutator_constant(&c, &b).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }

        #[test]
        fn commutators_survive_propagation(
            h in random_hamiltonian(2), t in -1.0f64..1.0, a in random_vector(4), b in random_vector(4)
        ) {
            let s = h.propagate(t).unwrap();
            let sys = h.system().clone();
            let a = LinearObservable::new(&sys, a, 0.0).unwrap();
            let b = LinearObservable::new(&sys, b, 0.0).unwrap();
            let before = commutator_constant(&a, &b).unwrap();
            let after = commutator_constant(
                &s.heisenberg_apply(&a).unwrap(),
                &s.heisenberg_apply(&b).unwrap(),
            ).unwrap();
            prop_assert!((before - after).abs() <= 1e-12 * (1.0 + before.abs()));
        }

        #[test]
        fn embedding_preserves_symplecticity(h in random_hamiltonian(2), t in -1.0f64..1.0, swap in any::<bool>()) {
            let s = h.propagate(t).unwrap();
            let three = ModeSystem::natural(["a", "b", "c"]).unwrap();
            let map = if swap { [2, 0] } else { [0, 2] };
            let e = s.embed(&map, &three).unwrap();
            prop_assert!(e.symplectic_defect() <= 1e-12);
        }
    }
}
