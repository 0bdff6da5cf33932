use nqs_core::rbm::RbmParameters;
use nqs_core::scalar::Field;
use nqs_core::spin::{build_j1j2, Boundary};
use nqs_core::train::{train, OptimizerKind, TrainingConfig};
use nqs_core::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params_with_sigma(n: usize, alpha: usize, sigma: f64, seed: u64) -> RbmParameters<Complex64> {
    let m = alpha * n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<Complex64> = (0..m * n + m)
        .map(|_| Field::sample_normal(&mut rng, sigma))
        .collect();
    RbmParameters::from_parts(n, m, data[..m * n].to_vec(), data[m * n..].to_vec()).unwrap()
}

#[test]
#[ignore]
fn probe_j1j2_single_points() {
    let cfg = TrainingConfig {
        optimizer: OptimizerKind::default_adam(),
        ..TrainingConfig::default()
    };
    for &c in &[0.0_f64, 0.2, 0.5, 1.0] {
        let op = build_j1j2::<f64>(12, 1.0, c, Boundary::Periodic).unwrap();
        let exact = op.exact_ground_state().unwrap();
        for &sigma in &[0.01_f64, 0.05, 0.1, 0.3] {
            for seed in [1u64, 2] {
                let params = params_with_sigma(12, 2, sigma, seed);
                let rec = train(params, &op, &cfg, &exact).unwrap();
                println!(
                    "c={c:.1} sigma={sigma:.2} seed={seed}: err={:.4} inf={:.4}",
                    rec.energy_error, rec.infidelity
                );
            }
        }
    }
}
