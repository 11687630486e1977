//! Small dense real-matrix kernel.
//!
//! Everything here is sized for phase-space matrices of a handful of modes
//! (at most 16x16). Storage, LU solves and symmetric eigenvalues come from
//! `nalgebra`; the matrix exponential is a scaling-and-squaring diagonal Padé
//! approximant.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Row/column matrix of reals.
pub type Matrix = DMatrix<f64>;

/// Default comparison tolerance, in natural units.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Scaled argument norm bound before the Padé approximant is evaluated.
const SCALING_THRESHOLD: f64 = 0.5;

/// Largest Padé degree considered.
const MAX_PADE_DEGREE: usize = 13;

fn check_square(m: &Matrix) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

fn check_finite(m: &Matrix) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}

/// Induced 1-norm (maximum absolute column sum).
pub fn one_norm(m: &Matrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Leading coefficient of the truncation error of the `[q/q]` Padé
/// approximant to `exp`: `(q!)^2 / ((2q)! (2q+1)!)`.
fn pade_error_constant(q: usize) -> f64 {
    let mut c = 1.0;
    for j in 1..=q {
        c *= j as f64 / (q + j) as f64;
    }
    for j in 1..=(2 * q + 1) {
        c /= j as f64;
    }
    c
}

fn pade_degree(tol: f64) -> usize {
    // Squaring amplifies the truncation error, so aim three decades below tol.
    let target = tol * 1e-3;
    (1..=MAX_PADE_DEGREE)
        .find(|&q| {
            pade_error_constant(q) * SCALING_THRESHOLD.powi(2 * q as i32 + 1) <= target
        })
        .unwrap_or(MAX_PADE_DEGREE)
}

/// Matrix exponential by scaling and squaring with a diagonal Padé approximant.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 1/2; the Padé
/// degree is the smallest whose truncation bound at that norm sits below
/// `tol / 1000`. The zero matrix maps to the identity exactly.
pub fn mat_exp(m: &Matrix, tol: f64) -> Result<Matrix> {
    check_square(m)?;
    check_finite(m)?;
    check_tol(tol)?;

    let n = m.nrows();
    if m.iter().all(|&v| v == 0.0) {
        return Ok(Matrix::identity(n, n));
    }

    let norm = one_norm(m);
    let squarings = if norm > SCALING_THRESHOLD {
        (norm / SCALING_THRESHOLD).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = m * 2f64.powi(-squarings);

    let q = pade_degree(tol);
    let mut numer = Matrix::identity(n, n);
    let mut denom = Matrix::identity(n, n);
    let mut power = Matrix::identity(n, n);
    let mut coeff = 1.0;
    for j in 1..=q {
        // c_j = c_{j-1} (q - j + 1) / (j (2q - j + 1))
        coeff *= (q - j + 1) as f64 / (j * (2 * q - j + 1)) as f64;
        power = &power * &scaled;
        numer += &power * coeff;
        if j % 2 == 0 {
            denom += &power * coeff;
        } else {
            denom -= &power * coeff;
        }
    }

    let mut result = denom
        .lu()
        .solve(&numer)
        .ok_or(Error::SingularApproximant)?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    check_finite(&result)?;
    Ok(result)
}

/// True when `m` is square and `|m_ij - m_ji| <= tol` for every pair.
pub fn is_symmetric(m: &Matrix, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let n = m.nrows();
    (0..n).all(|i| (i + 1..n).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= tol))
}

/// Frobenius norm of `a - b`.
pub fn frobenius_distance(a: &Matrix, b: &Matrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", a.shape()),
            actual: format!("{:?}", b.shape()),
        });
    }
    Ok(a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Largest absolute entrywise difference.
pub fn max_abs_difference(a: &Matrix, b: &Matrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", a.shape()),
            actual: format!("{:?}", b.shape()),
        });
    }
    Ok(a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Smallest eigenvalue of the Hermitian matrix `re + i*im`.
///
/// `re` must be symmetric and `im` antisymmetric. The complex matrix is
/// embedded as the real symmetric block matrix `[[re, -im], [im, re]]`, whose
/// spectrum is that of `re + i*im` with every eigenvalue doubled.
pub fn min_hermitian_eigenvalue(re: &Matrix, im: &Matrix) -> Result<f64> {
    check_square(re)?;
    if re.shape() != im.shape() {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", re.shape()),
            actual: format!("{:?}", im.shape()),
        });
    }
    check_finite(re)?;
    check_finite(im)?;
    let n = re.nrows();
    let mut big = Matrix::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(re);
    big.view_mut((n, n), (n, n)).copy_from(re);
    big.view_mut((n, 0), (n, n)).copy_from(im);
    big.view_mut((0, n), (n, n)).copy_from(&(-im));
    let eig = SymmetricEigen::new(big);
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}
