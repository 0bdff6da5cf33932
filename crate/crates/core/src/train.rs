//! Full-basis variational training of the ansatz.
//!
//! Expectations are evaluated exactly over all 2^N configurations, so the
//! energy landscape carries no sampling noise; the optimizer sees the true
//! gradient at every step. Gradients come from the standard variational
//! estimator: with weights p(x) ∝ |ψ(x)|², log-derivatives O_k(x) and local
//! energies E_loc(x) = (Hψ)(x)/ψ(x),
//!
//!   g_k = 2·Re[ E_p[conj(O_k)·E_loc] − E_p[conj(O_k)]·E_p[E_loc] ]
//!
//! with the complex-parameter variant omitting the enclosing 2·Re; the
//! complex g_k is then the conjugate of the holomorphic derivative, which is
//! exactly the steepest-descent direction for the (real) energy.

use crate::error::{Error, Result};
use crate::rbm::{RbmGradient, RbmParameters};
use crate::scalar::{Field, RealScalar};
use crate::spin::{GroundStateSolution, HamiltonianOperator};
use num_traits::{Float, One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Relative weights below this fraction of the maximum are dropped from the
/// p-weighted gradient sums; their measure is zero at double precision.
const WEIGHT_FLOOR: f64 = 1e-300;

/// Allowed imaginary residue on the energy, relative to its magnitude.
const IMAG_RESIDUE_TOL: f64 = 1e-12;

/// Basis rows per work unit. Fixed so the reduction order (and therefore
/// the result, bit for bit) does not depend on the thread count.
const CHUNK: usize = 256;

/// Hyperparameters of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    pub steps: usize,
    pub optimizer: OptimizerKind,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            steps: 200,
            optimizer: OptimizerKind::default_adam(),
            seed: 0,
        }
    }
}

/// Gradient-descent flavor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OptimizerKind {
    Sgd,
    Adam {
        #[serde(default = "default_beta1")]
        beta1: f64,
        #[serde(default = "default_beta2")]
        beta2: f64,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
}

fn default_beta1() -> f64 {
    0.9
}
fn default_beta2() -> f64 {
    0.999
}
fn default_epsilon() -> f64 {
    1e-8
}

impl OptimizerKind {
    pub fn default_adam() -> Self {
        OptimizerKind::Adam {
            beta1: default_beta1(),
            beta2: default_beta2(),
            epsilon: default_epsilon(),
        }
    }
}

/// Everything recorded about one training run at one coupling value.
#[derive(Debug, Clone)]
pub struct TrainingRecord<F: Field> {
    /// Control-parameter value; NaN when `train` is called outside a sweep.
    pub coupling: F::Real,
    /// Variational energy before the first update and after each update.
    pub energy_history: Vec<F::Real>,
    /// Exact ground energy the run was measured against.
    pub exact_energy: F::Real,
    pub final_params: RbmParameters<F>,
    /// |last energy − exact energy|.
    pub energy_error: F::Real,
    /// 1 − ‖P_gs ψ‖² against the (possibly degenerate) ground space.
    pub infidelity: F::Real,
    /// Step index at which a numeric overflow halted the run, if any.
    pub failed_at_step: Option<usize>,
}

impl<F: Field> TrainingRecord<F> {
    pub fn succeeded(&self) -> bool {
        self.failed_at_step.is_none()
    }

    /// |energy_history[0] − exact energy|.
    pub fn initial_energy_error(&self) -> F::Real {
        Float::abs(self.energy_history[0] - self.exact_energy)
    }
}

/// |E_NQS − E_exact|.
pub fn energy_error<R: RealScalar>(e_nqs: R, e_exact: R) -> R {
    Float::abs(e_nqs - e_exact)
}

/// 1 − ‖P_gs·ψ‖² with P_gs the projector onto the ground space. The input
/// need not be normalized; the metric is invariant under global phase and
/// scale. Reduces to 1 − |⟨ψ_exact|ψ⟩|² for a non-degenerate ground state.
pub fn infidelity<F: Field>(psi: &[F], exact: &GroundStateSolution<F::Real>) -> Result<F::Real> {
    let dim = exact.amplitudes().len();
    if psi.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: psi.len(),
        });
    }
    let norm_sqr: F::Real = psi.iter().map(|a| a.norm_sqr()).sum();
    if !(norm_sqr > F::Real::zero()) || !Float::is_finite(norm_sqr) {
        return Err(Error::DegenerateState(
            "infidelity of a zero or non-finite state".into(),
        ));
    }
    let mut projected = F::Real::zero();
    for basis_vec in exact.ground_space() {
        // Ground vectors are real; ⟨u|ψ⟩ = Σ u(x)·ψ(x).
        let overlap: F = basis_vec
            .iter()
            .zip(psi)
            .map(|(&u, &a)| a.scale(u))
            .sum();
        projected += overlap.norm_sqr();
    }
    let result = F::Real::one() - projected / norm_sqr;
    Ok(Float::max(result, F::Real::zero()))
}

/// Re ⟨ψ|H|ψ⟩ / ⟨ψ|ψ⟩ for the wavefunction the parameters define.
/// The imaginary part must be round-off (≤ 1e-12 relative) and is discarded
/// after that check.
pub fn variational_energy<F: Field>(
    params: &RbmParameters<F>,
    op: &HamiltonianOperator<F::Real>,
) -> Result<F::Real> {
    let psi = params.psi_vector(&op.basis())?;
    let hpsi = op.apply(psi.amplitudes())?;
    let mut num = F::zero();
    let mut den = F::Real::zero();
    for (a, h) in psi.amplitudes().iter().zip(&hpsi) {
        num += a.conj() * *h;
        den += a.norm_sqr();
    }
    real_energy(num, den)
}

fn real_energy<F: Field>(num: F, den: F::Real) -> Result<F::Real> {
    if !(den > F::Real::zero()) {
        return Err(Error::DegenerateState(
            "expectation over a zero-norm state".into(),
        ));
    }
    let e = num.scale(F::Real::one() / den);
    let tol = Float::max(
        F::Real::of(IMAG_RESIDUE_TOL),
        F::Real::epsilon() * F::Real::of(100.0),
    );
    let scale = Float::max(Float::abs(e.re()), F::Real::one());
    if Float::abs(e.im()) > tol * scale {
        return Err(Error::ImaginaryResidue {
            residue: RealScalar::as_f64(Float::abs(e.im())),
            tolerance: RealScalar::as_f64(tol * scale),
        });
    }
    Ok(e.re())
}

/// Energy gradient with respect to the parameters, in parameter layout.
pub fn energy_gradient<F: Field>(
    params: &RbmParameters<F>,
    op: &HamiltonianOperator<F::Real>,
) -> Result<RbmGradient<F>> {
    let mut ws = Workspace::new(params, op)?;
    let spin_table = op.basis().spin_table::<F::Real>();
    let (_, grad) = energy_and_gradient(params, op, &spin_table, &mut ws)?;
    Ok(RbmGradient::from_data_unchecked(
        params.n_visible(),
        params.n_hidden(),
        grad,
    ))
}

/// Scratch buffers reused across training steps.
struct Workspace<F: Field> {
    logs: Vec<F>,
    tanh: Vec<F>,
    amps: Vec<F>,
    eloc: Vec<F>,
    weights: Vec<F::Real>,
}

impl<F: Field> Workspace<F> {
    fn new(params: &RbmParameters<F>, op: &HamiltonianOperator<F::Real>) -> Result<Self> {
        if params.n_visible() != op.n_sites() {
            return Err(Error::DimensionMismatch {
                expected: op.n_sites(),
                got: params.n_visible(),
            });
        }
        let dim = op.dimension();
        Ok(Self {
            logs: vec![F::zero(); dim],
            tanh: vec![F::zero(); dim * params.n_hidden()],
            amps: vec![F::zero(); dim],
            eloc: vec![F::zero(); dim],
            weights: vec![F::Real::zero(); dim],
        })
    }
}

/// One fused evaluation of the variational energy and its gradient over the
/// full basis. Chunked with a fixed chunk size and reduced in chunk order,
/// so results are bit-identical at any thread count.
fn energy_and_gradient<F: Field>(
    params: &RbmParameters<F>,
    op: &HamiltonianOperator<F::Real>,
    spin_table: &[F::Real],
    ws: &mut Workspace<F>,
) -> Result<(F::Real, Vec<F>)> {
    let dim = op.dimension();
    let n = params.n_visible();
    let m = params.n_hidden();
    let w_rows = params.weights();
    let biases = params.hidden_bias();

    // Pass 1: pre-activations → log ψ and tanh table.
    let fill = |chunk_idx: usize, logs: &mut [F], tanh: &mut [F]| {
        let x0 = chunk_idx * CHUNK;
        for (local, log_slot) in logs.iter_mut().enumerate() {
            let x = x0 + local;
            let spins = &spin_table[x * n..(x + 1) * n];
            let mut total = F::zero();
            for i in 0..m {
                let row = &w_rows[i * n..(i + 1) * n];
                let mut theta = biases[i];
                for (w, s) in row.iter().zip(spins) {
                    theta += w.scale(*s);
                }
                let (lc, th) = theta.logcosh_tanh();
                total += lc;
                tanh[local * m + i] = th;
            }
            *log_slot = total;
        }
    };
    if dim > CHUNK {
        ws.logs
            .par_chunks_mut(CHUNK)
            .zip(ws.tanh.par_chunks_mut(CHUNK * m))
            .enumerate()
            .for_each(|(ci, (logs, tanh))| fill(ci, logs, tanh));
    } else {
        let (logs, tanh) = (&mut ws.logs[..], &mut ws.tanh[..]);
        fill(0, logs, tanh);
    }
    if let Some(bad) = ws.logs.iter().position(|l| !l.is_finite()) {
        return Err(Error::NumericOverflow {
            context: format!("log_psi at basis index {bad}"),
        });
    }

    // Max-shift and exponentiate.
    let shift = ws
        .logs
        .iter()
        .map(|l| l.re())
        .fold(F::Real::neg_infinity(), Float::max);
    let shift_f = F::from_real(shift);
    for (a, l) in ws.amps.iter_mut().zip(&ws.logs) {
        *a = (*l - shift_f).exp();
    }

    let hpsi = op.apply(&ws.amps)?;

    // Pass 2a: norms and energy numerators (all and floor-included).
    let floor = F::Real::of(WEIGHT_FLOOR);
    #[derive(Clone, Copy)]
    struct Sums<F: Field> {
        z_all: F::Real,
        num_all: F,
        z_inc: F::Real,
        num_inc: F,
    }
    let part_a = |range: std::ops::Range<usize>,
                  amps: &[F],
                  hpsi: &[F],
                  weights: &mut [F::Real],
                  eloc: &mut [F]| {
        let mut s = Sums::<F> {
            z_all: F::Real::zero(),
            num_all: F::zero(),
            z_inc: F::Real::zero(),
            num_inc: F::zero(),
        };
        for x in range {
            let a = amps[x];
            let w = a.norm_sqr();
            let c = a.conj() * hpsi[x];
            weights[x] = w;
            s.z_all += w;
            s.num_all += c;
            if w >= floor {
                eloc[x] = hpsi[x] / a;
                s.z_inc += w;
                s.num_inc += c;
            } else {
                weights[x] = F::Real::zero();
                eloc[x] = F::zero();
            }
        }
        s
    };
    let sums: Vec<Sums<F>> = if dim > CHUNK {
        ws.weights
            .par_chunks_mut(CHUNK)
            .zip(ws.eloc.par_chunks_mut(CHUNK))
            .enumerate()
            .map(|(ci, (wts, el))| {
                let x0 = ci * CHUNK;
                let mut shifted_w = vec![F::Real::zero(); wts.len()];
                let mut shifted_e = vec![F::zero(); el.len()];
                let s = part_a(
                    0..wts.len(),
                    &ws.amps[x0..x0 + wts.len()],
                    &hpsi[x0..x0 + wts.len()],
                    &mut shifted_w,
                    &mut shifted_e,
                );
                wts.copy_from_slice(&shifted_w);
                el.copy_from_slice(&shifted_e);
                s
            })
            .collect()
    } else {
        vec![part_a(0..dim, &ws.amps, &hpsi, &mut ws.weights, &mut ws.eloc)]
    };
    let mut z_all = F::Real::zero();
    let mut num_all = F::zero();
    let mut z_inc = F::Real::zero();
    let mut num_inc = F::zero();
    for s in sums {
        z_all += s.z_all;
        num_all += s.num_all;
        z_inc += s.z_inc;
        num_inc += s.num_inc;
    }
    let energy = real_energy(num_all, z_all)?;
    if !(z_inc > F::Real::zero()) {
        return Err(Error::DegenerateState(
            "all-zero amplitude vector in gradient evaluation".into(),
        ));
    }
    let e_bar = num_inc.scale(F::Real::one() / z_inc);

    // Pass 2b: centered moment C_k = Σ_x p(x)·conj(O_k(x))·(E_loc(x) − Ē),
    // which equals E_p[conj O·E_loc] − E_p[conj O]·E_p[E_loc].
    let p = m * n + m;
    let part_b = |range: std::ops::Range<usize>| {
        let mut acc = vec![F::zero(); p];
        for x in range {
            let w = ws.weights[x];
            if !(w > F::Real::zero()) {
                continue;
            }
            let centered = (ws.eloc[x] - e_bar).scale(w);
            let spins = &spin_table[x * n..(x + 1) * n];
            let tanh_row = &ws.tanh[x * m..(x + 1) * m];
            for i in 0..m {
                let u = tanh_row[i].conj() * centered;
                let row = &mut acc[i * n..(i + 1) * n];
                for (slot, s) in row.iter_mut().zip(spins) {
                    *slot += u.scale(*s);
                }
                acc[m * n + i] += u;
            }
        }
        acc
    };
    let partials: Vec<Vec<F>> = if dim > CHUNK {
        (0..dim.div_ceil(CHUNK))
            .into_par_iter()
            .map(|ci| part_b(ci * CHUNK..((ci + 1) * CHUNK).min(dim)))
            .collect()
    } else {
        vec![part_b(0..dim)]
    };
    let mut grad = vec![F::zero(); p];
    for partial in partials {
        for (g, c) in grad.iter_mut().zip(partial) {
            *g += c;
        }
    }
    let inv_z = F::Real::one() / z_inc;
    let two_for_real = if F::COMPLEX {
        F::Real::one()
    } else {
        F::Real::of(2.0)
    };
    for g in grad.iter_mut() {
        *g = g.scale(inv_z * two_for_real);
    }
    Ok((energy, grad))
}

/// Per-parameter optimizer state. Complex parameters are treated as two real
/// lanes, which makes Adam exactly textbook Adam on the underlying real
/// parameterization.
enum OptimizerState<R> {
    Sgd,
    Adam {
        beta1: R,
        beta2: R,
        epsilon: R,
        t: u32,
        m: Vec<R>,
        v: Vec<R>,
    },
}

impl<R: RealScalar> OptimizerState<R> {
    fn new(kind: OptimizerKind, param_count: usize) -> Self {
        match kind {
            OptimizerKind::Sgd => OptimizerState::Sgd,
            OptimizerKind::Adam {
                beta1,
                beta2,
                epsilon,
            } => OptimizerState::Adam {
                beta1: R::of(beta1),
                beta2: R::of(beta2),
                epsilon: R::of(epsilon),
                t: 0,
                m: vec![R::zero(); 2 * param_count],
                v: vec![R::zero(); 2 * param_count],
            },
        }
    }

    fn step<F: Field<Real = R>>(&mut self, data: &mut [F], grad: &[F], lr: R) {
        match self {
            OptimizerState::Sgd => {
                for (d, g) in data.iter_mut().zip(grad) {
                    *d -= g.scale(lr);
                }
            }
            OptimizerState::Adam {
                beta1,
                beta2,
                epsilon,
                t,
                m,
                v,
            } => {
                *t += 1;
                let b1 = *beta1;
                let b2 = *beta2;
                let corr1 = R::one() - Float::powi(b1, *t as i32);
                let corr2 = R::one() - Float::powi(b2, *t as i32);
                let mut lane = |idx: usize, g: R| -> R {
                    m[idx] = b1 * m[idx] + (R::one() - b1) * g;
                    v[idx] = b2 * v[idx] + (R::one() - b2) * g * g;
                    let m_hat = m[idx] / corr1;
                    let v_hat = v[idx] / corr2;
                    lr * m_hat / (Float::sqrt(v_hat) + *epsilon)
                };
                for (k, (d, g)) in data.iter_mut().zip(grad).enumerate() {
                    let dr = lane(2 * k, g.re());
                    let di = lane(2 * k + 1, g.im());
                    *d -= F::from_components(dr, di);
                }
            }
        }
    }
}

/// Runs `cfg.steps` optimizer updates, recording the energy before the first
/// update and after each one. A numeric overflow halts the run and marks the
/// record failed at that step; the record keeps the last finite state.
pub fn train<F: Field>(
    initial: RbmParameters<F>,
    op: &HamiltonianOperator<F::Real>,
    cfg: &TrainingConfig,
    exact: &GroundStateSolution<F::Real>,
) -> Result<TrainingRecord<F>> {
    if cfg.steps == 0 {
        return Err(Error::Config("steps must be at least 1".into()));
    }
    if !(cfg.learning_rate > 0.0) {
        return Err(Error::Config("learning_rate must be positive".into()));
    }
    if exact.amplitudes().len() != op.dimension() {
        return Err(Error::DimensionMismatch {
            expected: op.dimension(),
            got: exact.amplitudes().len(),
        });
    }
    let basis = op.basis();
    let spin_table = basis.spin_table::<F::Real>();
    let mut ws = Workspace::new(&initial, op)?;
    let lr = F::Real::of(cfg.learning_rate);
    let mut optimizer = OptimizerState::new(cfg.optimizer, initial.param_count());

    let mut params = initial;
    let (e0, mut grad) = energy_and_gradient(&params, op, &spin_table, &mut ws)?;
    let mut history = Vec::with_capacity(cfg.steps + 1);
    history.push(e0);
    let mut failed_at_step = None;

    for step in 1..=cfg.steps {
        let mut new_data = params.data().to_vec();
        optimizer.step(&mut new_data, &grad, lr);
        let candidate =
            RbmParameters::from_data_unchecked(params.n_visible(), params.n_hidden(), new_data);
        if !candidate.all_finite() {
            failed_at_step = Some(step);
            break;
        }
        match energy_and_gradient(&candidate, op, &spin_table, &mut ws) {
            Ok((e, g)) => {
                params = candidate;
                grad = g;
                history.push(e);
            }
            Err(Error::NumericOverflow { .. }) => {
                failed_at_step = Some(step);
                break;
            }
            Err(other) => return Err(other),
        }
    }

    let psi = params.psi_vector(&basis)?;
    let infid = infidelity(psi.amplitudes(), exact)?;
    let last = *history.last().expect("history holds the initial energy");
    Ok(TrainingRecord {
        coupling: F::Real::nan(),
        energy_history: history,
        exact_energy: exact.energy(),
        energy_error: energy_error(last, exact.energy()),
        final_params: params,
        infidelity: infid,
        failed_at_step,
    })
}
