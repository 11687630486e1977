//! Heisenberg maps at intermediate times against hand-written solutions of
//! the linear flow.

use std::f64::consts::PI;

use qmeas_core::measurement::{PX, PY, X, Y};
use qmeas_core::MeasurementModel;

const FRACTIONS: [f64; 4] = [0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0];
const COUPLINGS: [f64; 3] = [1.0, 2.5, 0.4];

/// Rows are `(x, p_x, y, p_y)` at time `tau`, columns the same coordinates at
/// time zero.
type Rows = [[f64; 4]; 4];

fn von_neumann_rows(s: f64) -> Rows {
    let mut m = [[0.0; 4]; 4];
    m[X][X] = 1.0;
    m[PX][PX] = 1.0;
    m[PX][PY] = -s;
    m[Y][X] = s;
    m[Y][Y] = 1.0;
    m[PY][PY] = 1.0;
    m
}

/// `theta = K tau pi / 3`, `c = 2 / sqrt 3`.
fn position_swap_rows(s: f64) -> Rows {
    let theta = s * PI / 3.0;
    let c = 2.0 / 3f64.sqrt();
    let lead = c * (theta + PI / 3.0).sin();
    let lag = c * (PI / 3.0 - theta).sin();
    let cross = c * theta.sin();
    let mut m = [[0.0; 4]; 4];
    m[X][X] = lead;
    m[X][Y] = -cross;
    m[PX][PX] = lag;
    m[PX][PY] = -cross;
    m[Y][X] = cross;
    m[Y][Y] = lag;
    m[PY][PX] = cross;
    m[PY][PY] = lead;
    m
}

fn max_deviation(model: &MeasurementModel, tau: f64, expected: &Rows) -> f64 {
    let s = model.propagation_at(tau).unwrap();
    let m = s.matrix();
    let mut worst: f64 = 0.0;
    for (i, row) in expected.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            worst = worst.max((m[(i, j)] - e).abs());
        }
    }
    worst
}

#[test]
fn von_neumann_flow_is_linear_in_time() {
    for k in COUPLINGS {
        let model = MeasurementModel::von_neumann(k).unwrap();
        for f in FRACTIONS.iter().copied().chain([0.0, 1.0]) {
            let d = max_deviation(&model, f / k, &von_neumann_rows(f));
            assert!(d <= 1e-12, "K={k} K tau={f}: {d:e}");
        }
    }
}

#[test]
fn position_swap_flow_follows_shifted_sines() {
    for k in COUPLINGS {
        let model = MeasurementModel::ozawa(k).unwrap();
        for f in FRACTIONS.iter().copied().chain([0.0, 1.0]) {
            let d = max_deviation(&model, f / k, &position_swap_rows(f));
            assert!(d <= 1e-12, "K={k} K tau={f}: {d:e}");
        }
    }
}

#[test]
fn sine_solution_reduces_to_identity_and_swap() {
    let id = position_swap_rows(0.0);
    let swap = position_swap_rows(1.0);
    for i in 0..4 {
        for j in 0..4 {
            let e = if i == j { 1.0 } else { 0.0 };
            assert!((id[i][j] - e).abs() <= 1e-15);
        }
    }
    let expected_swap = [
        [1.0, 0.0, -1.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 1.0],
    ];
    for i in 0..4 {
        for j in 0..4 {
            assert!((swap[i][j] - expected_swap[i][j]).abs() <= 1e-15);
        }
    }
}

#[test]
fn flipped_sign_on_diagonal_sine_fails_at_time_zero() {
    // Writing -c sin(pi/3 - theta) on the y -> y and p_x -> p_x entries
    // would map y to -y at tau = 0.
    let model = MeasurementModel::ozawa(1.0).unwrap();
    let mut flipped = position_swap_rows(0.0);
    flipped[Y][Y] = -flipped[Y][Y];
    flipped[PX][PX] = -flipped[PX][PX];
    assert!(max_deviation(&model, 0.0, &flipped) > 1.0);
    let mut flipped = position_swap_rows(0.5);
    flipped[Y][Y] = -flipped[Y][Y];
    assert!(max_deviation(&model, 0.5, &flipped) > 0.5);
}
