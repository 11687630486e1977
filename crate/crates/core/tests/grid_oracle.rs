//! The wavefunction simulator against the moment engine.

use qmeas_core::grid::{self, GridAxis, GridMoments};
use qmeas_core::{GridConfig, GridState, GridUnitary, MeasurementModel, ModeGaussian, MomentState};

fn gaussian_pair(object: ModeGaussian, probe: ModeGaussian, n: usize) -> GridState {
    let config = GridConfig::for_spreads(object.sigma_x, probe.sigma_x, n, 12.0);
    GridState::init_gaussian(&object, &probe, config).unwrap()
}

fn moment_pair(model: &MeasurementModel, object: ModeGaussian, probe: ModeGaussian) -> MomentState {
    let o = MomentState::single_mode("object", object, 1.0).unwrap();
    let p = MomentState::single_mode("probe", probe, 1.0).unwrap();
    model.joint_state(&o, &p).unwrap()
}

fn assert_moments_close(grid: &GridMoments, state: &MomentState, tol: f64) {
    for i in 0..4 {
        let d = (grid.mean[i] - state.mean()[i]).abs();
        assert!(d <= tol, "mean[{i}]: {} vs {}", grid.mean[i], state.mean()[i]);
        for j in 0..4 {
            let d = (grid.cov[i][j] - state.cov()[(i, j)]).abs();
            assert!(d <= tol, "cov[{i}][{j}]: {} vs {}", grid.cov[i][j], state.cov()[(i, j)]);
        }
    }
}

#[test]
fn shear_composition_moves_moments_like_the_symplectic_map() {
    let object = ModeGaussian::pure(0.3, -0.2, 1.0, 0.2, 1.0);
    let probe = ModeGaussian::pure(-0.1, 0.4, 0.7, -0.1, 1.0);
    let state = gaussian_pair(object, probe, 512);
    let norm_before = state.norm_sq();
    for (model, unitary) in [
        (MeasurementModel::ozawa(1.0).unwrap(), GridUnitary::Ozawa),
        (MeasurementModel::von_neumann(1.0).unwrap(), GridUnitary::VonNeumann),
    ] {
        let after = unitary.applied(&state).unwrap();
        assert!((after.norm_sq() - norm_before).abs() <= 1e-10);
        let expected = moment_pair(&model, object, probe).evolve(model.endpoint()).unwrap();
        assert_moments_close(&after.moments(), &expected, 1e-6);
    }
}

#[test]
fn von_neumann_noise_is_probe_width() {
    let object = ModeGaussian::minimum_uncertainty(1.0, 1.0);
    let probe = ModeGaussian::minimum_uncertainty(0.5, 1.0);
    let state = gaussian_pair(object, probe, 512);
    let eps = grid::grid_noise(&state, GridUnitary::VonNeumann).unwrap();
    assert!((eps - 0.5).abs() <= 1e-4, "{eps}");
    let eta = grid::grid_disturbance(&state, GridUnitary::VonNeumann).unwrap();
    assert!((eta - 1.0).abs() <= 1e-4, "{eta}");
}

#[test]
fn position_swap_on_a_cat_state() {
    let n = 512;
    let arm = |m: f64| ModeGaussian::pure(m, 0.0, 0.6, 0.0, 1.0);
    let probe = ModeGaussian::pure(0.2, -0.3, 0.4, 0.1, 1.0);
    let l = 12.0 * (2.5f64.powi(2) + 0.36 + 0.16).sqrt();
    let config = GridConfig::square(n, l);
    let fx = grid::superposition_profile(&[(1.0, arm(-2.5)), (0.8, arm(2.5))], n, l).unwrap();
    let fy = grid::gaussian_profile(&probe, n, l).unwrap();
    let state = GridState::from_profiles(config, &fx, &fy).unwrap();

    let eps = grid::grid_noise(&state, GridUnitary::Ozawa).unwrap();
    assert!(eps <= 1e-6, "{eps}");

    let model = MeasurementModel::ozawa(1.0).unwrap();
    let moments = state.moments().moment_state(model.system()).unwrap();
    let expected_eta = moments
        .rms(&model.disturbance_operator(&model.object_momentum()).unwrap())
        .unwrap();
    let eta = grid::grid_disturbance(&state, GridUnitary::Ozawa).unwrap();
    assert!((eta - expected_eta).abs() <= 1e-4, "{eta} vs {expected_eta}");

    let output = grid::output_histogram(&state, GridUnitary::Ozawa, 64).unwrap();
    let born = state.marginal_histogram(GridAxis::Object, 64).unwrap();
    assert!((output.total() - 1.0).abs() <= 1e-10);
    let tv = output.total_variation(&born).unwrap();
    assert!(tv <= 1e-3, "{tv}");
    // both humps survive
    let left: f64 = output.probabilities[..32].iter().sum();
    assert!((left - 1.0 / 1.64).abs() <= 1e-3, "{left}");
}

#[test]
fn gaussian_output_matches_normal_cdf() {
    let object = ModeGaussian::pure(0.4, 0.1, 0.8, 0.3, 1.0);
    let probe = ModeGaussian::minimum_uncertainty(0.3, 1.0);
    let state = gaussian_pair(object, probe, 512);
    let hist = grid::output_histogram(&state, GridUnitary::Ozawa, 128).unwrap();
    let model = MeasurementModel::ozawa(1.0).unwrap();
    let after = moment_pair(&model, object, probe).evolve(model.endpoint()).unwrap();
    let dist = after
        .observable_distribution(&qmeas_core::LinearObservable::position(model.system(), 1))
        .unwrap();
    let edges = hist.bin_edges();
    // grid samples sit at the left edge of each cell; shift by half a cell
    let half = 0.5 * (edges[1] - edges[0]) / (512 / 128) as f64;
    for (i, p) in hist.probabilities.iter().enumerate() {
        let q = dist.interval_probability(edges[i] - half, edges[i + 1] - half);
        assert!((p - q).abs() <= 1e-4, "bin {i}: {p} vs {q}");
    }
}
