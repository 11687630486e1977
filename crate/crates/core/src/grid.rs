//! Wavefunction-level cross-check of the moment engine.
//!
//! A two-mode state `psi(x, y)` is sampled on a periodic rectangle
//! `[-lx, lx) x [-ly, ly)` with `hbar = 1`. The two bilinear unitaries act as
//! shears of the plane:
//!
//! * `exp(-i theta x p_y)`: `psi(x, y) -> psi(x, y - theta x)`,
//! * `exp( i theta p_x y)`: `psi(x, y) -> psi(x + theta y, y)`,
//!
//! each realized as a per-line translation by a Fourier phase ramp, which is
//! exact for band-limited periodic data and unitary to rounding. The position
//! swapping unitary is the `p_x y` shear followed by the `x p_y` shear.
//!
//! Noise and disturbance are computed from their operator definitions,
//! without going through moments:
//! `eps^2 = ||y U phi - U x phi||^2`, `eta^2 = ||p_x U phi - U p_x phi||^2`.
//!
//! Probability that has been translated into the outer 5% of either axis is
//! treated as aliasing and turns into a hard error.

use std::io::{self, Write};
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::canonical::ModeSystem;
use crate::error::{invalid, Error, Result};
use crate::measurement::ModelKind;
use crate::numerics::Matrix;
use crate::states::{ModeGaussian, MomentState};

pub const DEFAULT_GRID_POINTS: usize = 1024;
pub const DEFAULT_HALF_WIDTH_SIGMAS: f64 = 12.0;
pub const DEFAULT_BOUNDARY_THRESHOLD: f64 = 1e-8;
/// Fraction of each half-width counted as the boundary shell.
pub const BOUNDARY_SHELL: f64 = 0.05;

const PURITY_TOL: f64 = 1e-9;

/// Which canonical mode an axis of the grid carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridAxis {
    /// Object position `x`.
    Object,
    /// Probe position `y`.
    Probe,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub boundary_threshold: f64,
}

impl GridConfig {
    /// Square grid of `n x n` points on `[-l, l)^2`.
    pub fn square(n: usize, l: f64) -> Self {
        Self {
            nx: n,
            ny: n,
            lx: l,
            ly: l,
            boundary_threshold: DEFAULT_BOUNDARY_THRESHOLD,
        }
    }

    /// Square grid whose half-width is `half_width_sigmas` times the widest
    /// position spread a bilinear swap or shear can produce,
    /// `sqrt(sigma_x^2 + sigma_y^2)`.
    pub fn for_spreads(sigma_x: f64, sigma_y: f64, n: usize, half_width_sigmas: f64) -> Self {
        let spread = (sigma_x * sigma_x + sigma_y * sigma_y).sqrt();
        Self::square(n, half_width_sigmas * spread)
    }

    pub fn with_boundary_threshold(mut self, threshold: f64) -> Self {
        self.boundary_threshold = threshold;
        self
    }

    fn validate(&self) -> Result<()> {
        for (name, n) in [("nx", self.nx), ("ny", self.ny)] {
            if n < 4 || !n.is_power_of_two() {
                return Err(invalid(name, format!("grid size must be a power of two >= 4, got {n}")));
            }
        }
        for (name, l) in [("lx", self.lx), ("ly", self.ly)] {
            if !(l > 0.0 && l.is_finite()) {
                return Err(invalid(name, format!("half-width must be positive, got {l}")));
            }
        }
        if !(self.boundary_threshold > 0.0) {
            return Err(invalid("boundary_threshold", "must be positive"));
        }
        Ok(())
    }
}

fn coordinates(n: usize, l: f64) -> Vec<f64> {
    let d = 2.0 * l / n as f64;
    (0..n).map(|i| -l + i as f64 * d).collect()
}

/// Angular wavenumbers in FFT order.
fn wavenumbers(n: usize, l: f64) -> Vec<f64> {
    let dk = std::f64::consts::PI / l;
    (0..n)
        .map(|j| {
            let j = j as isize;
            let j = if j < n as isize / 2 { j } else { j - n as isize };
            j as f64 * dk
        })
        .collect()
}

/// Samples of a pure single-mode Gaussian (`hbar = 1`).
///
/// `psi(x) = exp(-(x - mu)^2 / (4 sigma^2) + i beta (x - mu)^2 + i p0 x)` with
/// `beta = cov_xp / (2 sigma^2)`. The preparation must be pure,
/// `sigma_x sigma_p sqrt(1 - rho^2) = 1/2`.
pub fn gaussian_profile(g: &ModeGaussian, n: usize, l: f64) -> Result<Vec<Complex64>> {
    g.check_admissible(0, 1.0)?;
    let excess = g.uncertainty_product() / 0.5 - 1.0;
    if excess > PURITY_TOL {
        return Err(Error::NotPure(format!(
            "sigma_x*sigma_p*sqrt(1-rho^2) exceeds 1/2 by a factor {excess:e}"
        )));
    }
    let s2 = g.sigma_x * g.sigma_x;
    let beta = g.covariance() / (2.0 * s2);
    Ok(coordinates(n, l)
        .into_iter()
        .map(|x| {
            let u = x - g.mean_x;
            let re = -u * u / (4.0 * s2);
            let im = beta * u * u + g.mean_p * x;
            Complex64::from_polar(re.exp(), im)
        })
        .collect())
}

/// Coherent superposition `sum_k w_k psi_k` of pure Gaussians (unnormalized).
pub fn superposition_profile(
    components: &[(f64, ModeGaussian)],
    n: usize,
    l: f64,
) -> Result<Vec<Complex64>> {
    if components.is_empty() {
        return Err(invalid("components", "superposition needs at least one component"));
    }
    let mut sum = vec![Complex64::new(0.0, 0.0); n];
    for (w, g) in components {
        for (acc, v) in sum.iter_mut().zip(gaussian_profile(g, n, l)?) {
            *acc += v * *w;
        }
    }
    Ok(sum)
}

struct LineFft {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    scale: f64,
}

impl LineFft {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); len],
            scale: 1.0 / n as f64,
        }
    }

    /// Replaces `line` by `IFFT(multiplier(k_index) * FFT(line))`.
    fn filter(&mut self, line: &mut [Complex64], multiplier: impl Fn(usize) -> Complex64) {
        self.forward.process_with_scratch(line, &mut self.scratch);
        for (j, v) in line.iter_mut().enumerate() {
            *v *= multiplier(j) * self.scale;
        }
        self.inverse.process_with_scratch(line, &mut self.scratch);
    }
}

fn transpose(src: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = src[r * cols + c];
        }
    }
    out
}

/// Complex field on the grid; index `ix * ny + iy`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    config: GridConfig,
    amps: Vec<Complex64>,
}

impl GridState {
    /// Separable state `fx(x) fy(y)`, normalized on the grid.
    pub fn from_profiles(config: GridConfig, fx: &[Complex64], fy: &[Complex64]) -> Result<Self> {
        config.validate()?;
        if fx.len() != config.nx || fy.len() != config.ny {
            return Err(Error::DimensionMismatch {
                expected: format!("{} x {}", config.nx, config.ny),
                actual: format!("{} x {}", fx.len(), fy.len()),
            });
        }
        let mut amps = Vec::with_capacity(config.nx * config.ny);
        for a in fx {
            amps.extend(fy.iter().map(|b| a * b));
        }
        let mut state = Self { config, amps };
        let norm = state.norm_sq();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(invalid("profile", "wavefunction has no mass on the grid"));
        }
        let scale = 1.0 / norm.sqrt();
        state.amps.iter_mut().for_each(|v| *v *= scale);
        state.check_boundary("initialization")?;
        Ok(state)
    }

    /// Product of pure Gaussians for object and probe.
    pub fn init_gaussian(object: &ModeGaussian, probe: &ModeGaussian, config: GridConfig) -> Result<Self> {
        config.validate()?;
        let fx = gaussian_profile(object, config.nx, config.lx)?;
        let fy = gaussian_profile(probe, config.ny, config.ly)?;
        Self::from_profiles(config, &fx, &fy)
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.config.lx / self.config.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.config.ly / self.config.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn x_coords(&self) -> Vec<f64> {
        coordinates(self.config.nx, self.config.lx)
    }

    pub fn y_coords(&self) -> Vec<f64> {
        coordinates(self.config.ny, self.config.ly)
    }

    /// `||psi||^2` including the cell area.
    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell_area()
    }

    /// `<self|other>` including the cell area.
    pub fn inner(&self, other: &GridState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.cell_area()
    }

    fn distance_sq(&self, other: &GridState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            * self.cell_area()
    }

    /// Fraction of `||psi||^2` lying in the outer shell of either axis.
    pub fn boundary_mass(&self) -> f64 {
        let (nx, ny) = (self.config.nx, self.config.ny);
        let xs = self.x_coords();
        let ys = self.y_coords();
        let x_cut = (1.0 - BOUNDARY_SHELL) * self.config.lx;
        let y_cut = (1.0 - BOUNDARY_SHELL) * self.config.ly;
        let mut shell = 0.0;
        let mut total = 0.0;
        for ix in 0..nx {
            let x_edge = xs[ix].abs() >= x_cut;
            for iy in 0..ny {
                let w = self.amps[ix * ny + iy].norm_sqr();
                total += w;
                if x_edge || ys[iy].abs() >= y_cut {
                    shell += w;
                }
            }
        }
        if total > 0.0 {
            shell / total
        } else {
            0.0
        }
    }

    fn check_boundary(&self, stage: &'static str) -> Result<()> {
        let mass = self.boundary_mass();
        if mass > self.config.boundary_threshold {
            return Err(Error::BoundaryMass {
                mass,
                threshold: self.config.boundary_threshold,
                stage,
            });
        }
        Ok(())
    }

    /// `psi(x, y) -> psi(x, y - theta x)`, i.e. `exp(-i theta x p_y)`.
    pub fn apply_shear_x_py(&mut self, theta: f64) -> Result<()> {
        let ny = self.config.ny;
        let k = wavenumbers(ny, self.config.ly);
        let mut fft = LineFft::new(ny);
        for (x, line) in self.x_coords().into_iter().zip(self.amps.chunks_exact_mut(ny)) {
            let shift = theta * x;
            fft.filter(line, |j| Complex64::cis(-k[j] * shift));
        }
        self.check_boundary("x p_y shear")
    }

    /// `psi(x, y) -> psi(x + theta y, y)`, i.e. `exp(i theta p_x y)`.
    pub fn apply_shear_px_y(&mut self, theta: f64) -> Result<()> {
        let (nx, ny) = (self.config.nx, self.config.ny);
        let k = wavenumbers(nx, self.config.lx);
        let mut fft = LineFft::new(nx);
        let mut t = transpose(&self.amps, nx, ny);
        for (y, line) in self.y_coords().into_iter().zip(t.chunks_exact_mut(nx)) {
            // translate by -theta y along x
            let shift = -theta * y;
            fft.filter(line, |j| Complex64::cis(-k[j] * shift));
        }
        self.amps = transpose(&t, ny, nx);
        self.check_boundary("p_x y shear")
    }

    fn map_positions(&self, f: impl Fn(f64, f64) -> f64) -> GridState {
        let ny = self.config.ny;
        let xs = self.x_coords();
        let ys = self.y_coords();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, v)| v * f(xs[i / ny], ys[i % ny]))
            .collect();
        GridState {
            config: self.config,
            amps,
        }
    }

    /// `x psi` (unnormalized).
    pub fn times_x(&self) -> GridState {
        self.map_positions(|x, _| x)
    }

    /// `y psi` (unnormalized).
    pub fn times_y(&self) -> GridState {
        self.map_positions(|_, y| y)
    }

    /// `p_x psi = -i d/dx psi`, spectrally.
    pub fn apply_px(&self) -> GridState {
        let (nx, ny) = (self.config.nx, self.config.ny);
        let k = wavenumbers(nx, self.config.lx);
        let mut fft = LineFft::new(nx);
        let mut t = transpose(&self.amps, nx, ny);
        for line in t.chunks_exact_mut(nx) {
            fft.filter(line, |j| Complex64::new(k[j], 0.0));
        }
        GridState {
            config: self.config,
            amps: transpose(&t, ny, nx),
        }
    }

    /// `p_y psi = -i d/dy psi`, spectrally.
    pub fn apply_py(&self) -> GridState {
        let ny = self.config.ny;
        let k = wavenumbers(ny, self.config.ly);
        let mut fft = LineFft::new(ny);
        let mut out = self.clone();
        for line in out.amps.chunks_exact_mut(ny) {
            fft.filter(line, |j| Complex64::new(k[j], 0.0));
        }
        out
    }

    /// First and symmetrized second moments of `(x, p_x, y, p_y)` by
    /// quadrature, `<{a, b}>/2 = Re <a psi | b psi>`.
    pub fn moments(&self) -> GridMoments {
        let norm = self.norm_sq();
        let vectors = [self.times_x(), self.apply_px(), self.times_y(), self.apply_py()];
        let mut mean = [0.0; 4];
        for (m, v) in mean.iter_mut().zip(&vectors) {
            *m = self.inner(v).re / norm;
        }
        let mut cov = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in i..4 {
                let c = vectors[i].inner(&vectors[j]).re / norm - mean[i] * mean[j];
                cov[i][j] = c;
                cov[j][i] = c;
            }
        }
        GridMoments { mean, cov }
    }

    /// Probability per grid cell of one position coordinate.
    pub fn marginal(&self, axis: GridAxis) -> Vec<f64> {
        let (nx, ny) = (self.config.nx, self.config.ny);
        let area = self.cell_area();
        match axis {
            GridAxis::Object => (0..nx)
                .map(|ix| self.amps[ix * ny..(ix + 1) * ny].iter().map(|v| v.norm_sqr()).sum::<f64>() * area)
                .collect(),
            GridAxis::Probe => {
                let mut out = vec![0.0; ny];
                for line in self.amps.chunks_exact(ny) {
                    for (o, v) in out.iter_mut().zip(line) {
                        *o += v.norm_sqr() * area;
                    }
                }
                out
            }
        }
    }

    /// Marginal grouped into `bins` equal bins spanning the axis.
    pub fn marginal_histogram(&self, axis: GridAxis, bins: usize) -> Result<Histogram> {
        let (n, l) = match axis {
            GridAxis::Object => (self.config.nx, self.config.lx),
            GridAxis::Probe => (self.config.ny, self.config.ly),
        };
        if bins == 0 || n % bins != 0 {
            return Err(invalid("bins", format!("{bins} bins do not divide {n} grid points")));
        }
        let per_bin = n / bins;
        let probabilities = self
            .marginal(axis)
            .chunks_exact(per_bin)
            .map(|c| c.iter().sum())
            .collect();
        Ok(Histogram {
            lo: -l,
            hi: l,
            probabilities,
        })
    }

    /// Both position marginals as CSV rows `axis,coordinate,probability`.
    pub fn write_marginals_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "axis,coordinate,probability")?;
        for (name, axis, coords) in [
            ("object", GridAxis::Object, self.x_coords()),
            ("probe", GridAxis::Probe, self.y_coords()),
        ] {
            for (c, p) in coords.iter().zip(self.marginal(axis)) {
                writeln!(out, "{name},{c:.10e},{p:.10e}")?;
            }
        }
        Ok(())
    }
}

/// Moments of `(x, p_x, y, p_y)` measured on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMoments {
    pub mean: [f64; 4],
    pub cov: [[f64; 4]; 4],
}

impl GridMoments {
    /// Second moment `<(c . r)^2>` of a linear combination.
    pub fn second_moment(&self, c: [f64; 4]) -> f64 {
        let mean: f64 = c.iter().zip(&self.mean).map(|(a, b)| a * b).sum();
        let mut var = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                var += c[i] * self.cov[i][j] * c[j];
            }
        }
        var + mean * mean
    }

    /// The same moments as a (generally non-Gaussian) two-mode moment state.
    pub fn moment_state(&self, system: &ModeSystem) -> Result<MomentState> {
        if system.modes() != 2 {
            return Err(invalid("system", "grid moments describe exactly two modes"));
        }
        let mean = DVector::from_column_slice(&self.mean);
        let cov = Matrix::from_fn(4, 4, |i, j| self.cov[i][j]);
        let cov = (&cov + cov.transpose()) * 0.5;
        MomentState::from_moments(system, mean, cov, false)
    }
}

/// Probability histogram over equal bins of `[lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub probabilities: Vec<f64>,
}

impl Histogram {
    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn bin_edges(&self) -> Vec<f64> {
        let n = self.probabilities.len();
        let w = (self.hi - self.lo) / n as f64;
        (0..=n).map(|i| self.lo + i as f64 * w).collect()
    }

    /// `1/2 sum |p_i - q_i|` over identical bins.
    pub fn total_variation(&self, other: &Histogram) -> Result<f64> {
        if self.probabilities.len() != other.probabilities.len()
            || self.lo != other.lo
            || self.hi != other.hi
        {
            return Err(invalid("histogram", "histograms have different bins"));
        }
        Ok(0.5
            * self
                .probabilities
                .iter()
                .zip(&other.probabilities)
                .map(|(p, q)| (p - q).abs())
                .sum::<f64>())
    }

    pub fn write_csv<W: Write>(&self, mut out: W, column: &str) -> io::Result<()> {
        writeln!(out, "bin_lo,bin_hi,{column}")?;
        let edges = self.bin_edges();
        for (i, p) in self.probabilities.iter().enumerate() {
            writeln!(out, "{:.10e},{:.10e},{p:.10e}", edges[i], edges[i + 1])?;
        }
        Ok(())
    }
}

/// Measuring unitaries with a shear realization on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridUnitary {
    /// `exp(-i x p_y)`.
    VonNeumann,
    /// `exp(-i x p_y) exp(i p_x y)`.
    Ozawa,
}

impl GridUnitary {
    pub fn for_model(kind: ModelKind) -> Result<Self> {
        match kind {
            ModelKind::VonNeumann => Ok(Self::VonNeumann),
            ModelKind::Ozawa => Ok(Self::Ozawa),
            ModelKind::Custom => Err(Error::UnsupportedModel("custom".into())),
        }
    }

    pub fn apply(self, state: &mut GridState) -> Result<()> {
        match self {
            Self::VonNeumann => state.apply_shear_x_py(1.0),
            Self::Ozawa => {
                state.apply_shear_px_y(1.0)?;
                state.apply_shear_x_py(1.0)
            }
        }
    }

    pub fn applied(self, state: &GridState) -> Result<GridState> {
        let mut out = state.clone();
        self.apply(&mut out)?;
        Ok(out)
    }
}

/// `eps(x) = ||y U phi - U x phi||`.
pub fn grid_noise(state: &GridState, unitary: GridUnitary) -> Result<f64> {
    let out = unitary.applied(state)?.times_y();
    let reference = unitary.applied(&state.times_x())?;
    Ok(out.distance_sq(&reference).sqrt())
}

/// `eta(p_x) = ||p_x U phi - U p_x phi||`.
pub fn grid_disturbance(state: &GridState, unitary: GridUnitary) -> Result<f64> {
    let out = unitary.applied(state)?.apply_px();
    let reference = unitary.applied(&state.apply_px())?;
    Ok(out.distance_sq(&reference).sqrt())
}

/// Distribution of the probe position after the interaction.
pub fn output_histogram(state: &GridState, unitary: GridUnitary, bins: usize) -> Result<Histogram> {
    unitary.applied(state)?.marginal_histogram(GridAxis::Probe, bins)
}
