//! Finite-difference oracles for the analytic gradients.
//!
//! Central differences with step 1e-5 are the independent route: the
//! log-amplitude gradient is checked per parameter against direct
//! perturbation of `log_psi`, and the energy gradient against perturbation
//! of `variational_energy`. Complex parameters are perturbed along both the
//! real and imaginary axes; for the holomorphic log-derivative both
//! directional quotients must reproduce the same complex derivative, and for
//! the energy the real/imaginary slopes are 2·Re g and 2·Im g of the
//! reported (conjugate-holomorphic) gradient.

use nqs_core::rbm::RbmParameters;
use nqs_core::scalar::Field;
use nqs_core::spin::{build_j1j2, build_tfim, Boundary, HamiltonianOperator, SpinConfiguration};
use nqs_core::train::{energy_gradient, variational_energy};
use nqs_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FD_STEP: f64 = 1e-5;
const REL_TOL: f64 = 1e-6;

/// Random parameters with spread wide enough to leave the linear regime.
fn random_params<F: Field<Real = f64>>(
    n_visible: usize,
    alpha: usize,
    scale: f64,
    rng: &mut ChaCha8Rng,
) -> RbmParameters<F> {
    let n_hidden = alpha * n_visible;
    let count = n_hidden * n_visible + n_hidden;
    let data: Vec<F> = (0..count)
        .map(|_| F::sample_normal(rng, scale))
        .collect();
    let weights = data[..n_hidden * n_visible].to_vec();
    let bias = data[n_hidden * n_visible..].to_vec();
    RbmParameters::from_parts(n_visible, n_hidden, weights, bias).unwrap()
}

fn perturbed<F: Field<Real = f64>>(params: &RbmParameters<F>, k: usize, delta: F) -> RbmParameters<F> {
    let mut data = params.data().to_vec();
    data[k] += delta;
    let nw = params.n_hidden() * params.n_visible();
    RbmParameters::from_parts(
        params.n_visible(),
        params.n_hidden(),
        data[..nw].to_vec(),
        data[nw..].to_vec(),
    )
    .unwrap()
}

fn rel_vec_error(analytic: &[f64], reference: &[f64]) -> f64 {
    let diff: f64 = analytic
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let norm: f64 = reference.iter().map(|b| b * b).sum::<f64>().sqrt();
    diff / norm.max(1e-8)
}

#[test]
fn log_psi_gradient_matches_central_differences_real() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let params = random_params::<f64>(8, 1, 0.4, &mut rng);
        let config = SpinConfiguration::new(rng.random_range(0..256), 8).unwrap();
        let grad = params.grad_log_psi(&config).unwrap();
        let mut analytic = Vec::new();
        let mut fd = Vec::new();
        for k in 0..params.param_count() {
            analytic.push(grad.data()[k]);
            let plus = perturbed(&params, k, FD_STEP).log_psi(&config).unwrap();
            let minus = perturbed(&params, k, -FD_STEP).log_psi(&config).unwrap();
            fd.push((plus - minus) / (2.0 * FD_STEP));
        }
        let err = rel_vec_error(&analytic, &fd);
        assert!(err < REL_TOL, "relative error {err}");
    }
}

#[test]
fn log_psi_gradient_matches_wirtinger_differences_complex() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let params = random_params::<Complex64>(8, 1, 0.4, &mut rng);
        let config = SpinConfiguration::new(rng.random_range(0..256), 8).unwrap();
        let grad = params.grad_log_psi(&config).unwrap();
        let mut analytic = Vec::new();
        let mut fd = Vec::new();
        for k in 0..params.param_count() {
            let g = grad.data()[k];
            // Real-axis quotient of the holomorphic function.
            let h_re = Complex64::new(FD_STEP, 0.0);
            let d_re = (perturbed(&params, k, h_re).log_psi(&config).unwrap()
                - perturbed(&params, k, -h_re).log_psi(&config).unwrap())
                / (2.0 * FD_STEP);
            // Imaginary-axis quotient: (f(θ+ih) − f(θ−ih)) / (2ih).
            let h_im = Complex64::new(0.0, FD_STEP);
            let d_im = (perturbed(&params, k, h_im).log_psi(&config).unwrap()
                - perturbed(&params, k, -h_im).log_psi(&config).unwrap())
                / Complex64::new(0.0, 2.0 * FD_STEP);
            analytic.extend([g.re, g.im, g.re, g.im]);
            fd.extend([d_re.re, d_re.im, d_im.re, d_im.im]);
        }
        let err = rel_vec_error(&analytic, &fd);
        assert!(err < REL_TOL, "relative error {err}");
    }
}

fn check_energy_gradient_real(op: &HamiltonianOperator<f64>, alpha: usize, seed: u64, trials: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = op.n_sites();
    for _ in 0..trials {
        let params = random_params::<f64>(n, alpha, 0.3, &mut rng);
        let grad = energy_gradient(&params, op).unwrap();
        let mut analytic = Vec::new();
        let mut fd = Vec::new();
        for k in 0..params.param_count() {
            analytic.push(grad.data()[k]);
            let plus = variational_energy(&perturbed(&params, k, FD_STEP), op).unwrap();
            let minus = variational_energy(&perturbed(&params, k, -FD_STEP), op).unwrap();
            fd.push((plus - minus) / (2.0 * FD_STEP));
        }
        let err = rel_vec_error(&analytic, &fd);
        assert!(err < REL_TOL, "relative error {err}");
    }
}

fn check_energy_gradient_complex(
    op: &HamiltonianOperator<f64>,
    alpha: usize,
    seed: u64,
    trials: usize,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = op.n_sites();
    for _ in 0..trials {
        let params = random_params::<Complex64>(n, alpha, 0.3, &mut rng);
        let grad = energy_gradient(&params, op).unwrap();
        let mut analytic = Vec::new();
        let mut fd = Vec::new();
        for k in 0..params.param_count() {
            let g = grad.data()[k];
            // Slopes of the real energy along the two real lanes are 2·Re g
            // and 2·Im g of the conjugate-holomorphic gradient.
            let h_re = Complex64::new(FD_STEP, 0.0);
            let slope_re = (variational_energy(&perturbed(&params, k, h_re), op).unwrap()
                - variational_energy(&perturbed(&params, k, -h_re), op).unwrap())
                / (2.0 * FD_STEP);
            let h_im = Complex64::new(0.0, FD_STEP);
            let slope_im = (variational_energy(&perturbed(&params, k, h_im), op).unwrap()
                - variational_energy(&perturbed(&params, k, -h_im), op).unwrap())
                / (2.0 * FD_STEP);
            analytic.extend([2.0 * g.re, 2.0 * g.im]);
            fd.extend([slope_re, slope_im]);
        }
        let err = rel_vec_error(&analytic, &fd);
        assert!(err < REL_TOL, "relative error {err}");
    }
}

#[test]
fn energy_gradient_matches_central_differences_tfim_real() {
    let op = build_tfim::<f64>(4, 1.0, 0.7, Boundary::Periodic).unwrap();
    check_energy_gradient_real(&op, 1, 21, 100);
}

#[test]
fn energy_gradient_matches_central_differences_j1j2_complex() {
    let op = build_j1j2::<f64>(6, 1.0, 0.3, Boundary::Periodic).unwrap();
    check_energy_gradient_complex(&op, 2, 23, 100);
}

#[test]
fn energy_gradient_crossed_model_field_pairs() {
    // The Table-inverse pairings, at reduced volume: complex weights on the
    // Ising chain and real weights on the Heisenberg chain.
    let tfim = build_tfim::<f64>(4, -1.0, 1.1, Boundary::Periodic).unwrap();
    check_energy_gradient_complex(&tfim, 1, 31, 20);
    let j1j2 = build_j1j2::<f64>(6, 1.0, 0.8, Boundary::Open).unwrap();
    check_energy_gradient_real(&j1j2, 1, 37, 20);
}
