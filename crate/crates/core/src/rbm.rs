//! Restricted Boltzmann machine wavefunction.
//!
//! A single hidden layer over ±1 spin inputs with no visible bias:
//!
//!   log ψ(x) = Σ_i logcosh(W_i·x + b_i)
//!
//! with W an M×N matrix and b the M hidden biases, both real- or
//! complex-valued. The hidden layer size is an integer multiple of the
//! visible size, M = α·N. Parameters flatten into a real vector in a fixed
//! order (W row-major with the hidden index outer, then b; complex
//! parameters contribute their real parts only), which is the layout the
//! weight-space analysis and the on-disk weight matrix share.

use crate::error::{Error, Result};
use crate::scalar::{Field, FieldKind, RealScalar};
use crate::spin::{HilbertBasis, SpinConfiguration};
use num_traits::{Float, One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Initialization scale: keeps every logcosh near its quadratic regime.
const INIT_SIGMA: f64 = 0.01;

/// Weights and hidden biases of the ansatz, stored contiguously in the
/// flattening order (W row-major, then b).
#[derive(Debug, Clone, PartialEq)]
pub struct RbmParameters<F: Field> {
    n_visible: usize,
    n_hidden: usize,
    data: Vec<F>,
}

/// Analytic derivatives of log ψ, shaped exactly like the parameters.
pub type RbmGradient<F> = RbmParameters<F>;

impl<F: Field> RbmParameters<F> {
    /// Random initialization: every real component i.i.d. N(0, 0.01²),
    /// drawn in data order from a counter-based generator, so one seed gives
    /// bit-identical parameters on every run.
    pub fn random(n_visible: usize, alpha: usize, seed: u64) -> Result<Self> {
        if n_visible == 0 {
            return Err(Error::Parameter("n_visible must be positive".into()));
        }
        if alpha == 0 {
            return Err(Error::Parameter("alpha must be a positive integer".into()));
        }
        let n_hidden = alpha * n_visible;
        let count = n_hidden * n_visible + n_hidden;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = F::Real::of(INIT_SIGMA);
        let data = (0..count)
            .map(|_| F::sample_normal(&mut rng, sigma))
            .collect();
        Self::from_data(n_visible, n_hidden, data)
    }

    /// Assembles parameters from an explicit weight matrix (row-major,
    /// hidden index outer) and bias vector.
    pub fn from_parts(
        n_visible: usize,
        n_hidden: usize,
        weights: Vec<F>,
        hidden_bias: Vec<F>,
    ) -> Result<Self> {
        if weights.len() != n_hidden * n_visible || hidden_bias.len() != n_hidden {
            return Err(Error::Parameter(format!(
                "shape mismatch: W has {} entries (need {}), b has {} (need {})",
                weights.len(),
                n_hidden * n_visible,
                hidden_bias.len(),
                n_hidden
            )));
        }
        let mut data = weights;
        data.extend(hidden_bias);
        Self::from_data(n_visible, n_hidden, data)
    }

    fn from_data(n_visible: usize, n_hidden: usize, data: Vec<F>) -> Result<Self> {
        if n_visible == 0 || n_hidden == 0 || n_hidden % n_visible != 0 {
            return Err(Error::Parameter(format!(
                "hidden size {n_hidden} is not a positive integer multiple of visible size {n_visible}"
            )));
        }
        debug_assert_eq!(data.len(), n_hidden * n_visible + n_hidden);
        let params = Self {
            n_visible,
            n_hidden,
            data,
        };
        if !params.all_finite() {
            return Err(Error::NumericOverflow {
                context: "parameter construction".into(),
            });
        }
        Ok(params)
    }

    /// Same-shape construction without the finiteness check; the trainer
    /// validates after each update so it can report the failing step.
    pub(crate) fn from_data_unchecked(n_visible: usize, n_hidden: usize, data: Vec<F>) -> Self {
        Self {
            n_visible,
            n_hidden,
            data,
        }
    }

    pub fn n_visible(&self) -> usize {
        self.n_visible
    }

    pub fn n_hidden(&self) -> usize {
        self.n_hidden
    }

    pub fn alpha(&self) -> usize {
        self.n_hidden / self.n_visible
    }

    /// Total parameter count M·N + M.
    pub fn param_count(&self) -> usize {
        self.data.len()
    }

    /// W entries, row-major with the hidden index outer.
    pub fn weights(&self) -> &[F] {
        &self.data[..self.n_hidden * self.n_visible]
    }

    pub fn hidden_bias(&self) -> &[F] {
        &self.data[self.n_hidden * self.n_visible..]
    }

    pub fn weight(&self, hidden: usize, visible: usize) -> F {
        self.data[hidden * self.n_visible + visible]
    }

    pub fn bias(&self, hidden: usize) -> F {
        self.data[self.n_hidden * self.n_visible + hidden]
    }

    /// The contiguous parameter vector in flattening order.
    pub fn data(&self) -> &[F] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [F] {
        &mut self.data
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Pre-activations θ_i = W_i·x + b_i for one configuration.
    pub fn pre_activations(&self, config: &SpinConfiguration) -> Result<Vec<F>> {
        if config.n_sites() != self.n_visible {
            return Err(Error::DimensionMismatch {
                expected: self.n_visible,
                got: config.n_sites(),
            });
        }
        let n = self.n_visible;
        let bits = config.bits();
        let mut theta = Vec::with_capacity(self.n_hidden);
        for i in 0..self.n_hidden {
            let row = &self.data[i * n..(i + 1) * n];
            let mut acc = self.bias(i);
            for (j, &w) in row.iter().enumerate() {
                if bits >> j & 1 == 1 {
                    acc += w;
                } else {
                    acc -= w;
                }
            }
            theta.push(acc);
        }
        Ok(theta)
    }

    /// log ψ(x) = Σ_i logcosh(θ_i).
    pub fn log_psi(&self, config: &SpinConfiguration) -> Result<F> {
        let total: F = self
            .pre_activations(config)?
            .into_iter()
            .map(Field::logcosh)
            .sum();
        if !total.is_finite() {
            return Err(Error::NumericOverflow {
                context: format!("log_psi at basis index {}", config.bits()),
            });
        }
        Ok(total)
    }

    /// Amplitudes over the whole basis, max-shifted so the largest magnitude
    /// is exactly one before normalization.
    pub fn psi_vector(&self, basis: &HilbertBasis) -> Result<PsiVector<F>> {
        if basis.n_sites() != self.n_visible {
            return Err(Error::DimensionMismatch {
                expected: self.n_visible,
                got: basis.n_sites(),
            });
        }
        let logs: Vec<F> = basis
            .iter()
            .map(|config| self.log_psi(&config))
            .collect::<Result<_>>()?;
        Ok(PsiVector::from_logs(logs))
    }

    /// ∂ log ψ / ∂W_ij = tanh(θ_i)·x_j and ∂ log ψ / ∂b_i = tanh(θ_i).
    /// Complex parameters are differentiated holomorphically.
    pub fn grad_log_psi(&self, config: &SpinConfiguration) -> Result<RbmGradient<F>> {
        let theta = self.pre_activations(config)?;
        let n = self.n_visible;
        let m = self.n_hidden;
        let mut data = vec![F::zero(); m * n + m];
        for (i, &t) in theta.iter().enumerate() {
            let tanh = t.tanh_stable();
            if !tanh.is_finite() {
                return Err(Error::NumericOverflow {
                    context: format!("grad_log_psi at basis index {}", config.bits()),
                });
            }
            for j in 0..n {
                data[i * n + j] = if config.spin(j) > 0 { tanh } else { -tanh };
            }
            data[m * n + i] = tanh;
        }
        Ok(RbmGradient::from_data_unchecked(n, m, data))
    }

    /// Real flattening: W row-major then b, complex entries contributing
    /// their real parts only.
    pub fn flatten(&self) -> FlatWeightVector<F::Real> {
        FlatWeightVector {
            values: self.data.iter().map(|v| v.re()).collect(),
            layout: FlatLayout {
                n_visible: self.n_visible,
                n_hidden: self.n_hidden,
                field: FieldKind::of::<F>(),
                ordering: FlatOrdering::WeightsRowMajorThenBias,
            },
        }
    }

    /// Rebuilds parameters from a flat vector. Exact round-trip for the real
    /// field; for complex layouts only the real parts are recoverable, and
    /// the imaginary parts come back zero.
    pub fn unflatten(flat: &FlatWeightVector<F::Real>) -> Result<Self> {
        if flat.layout.field != FieldKind::of::<F>() {
            return Err(Error::Parameter(format!(
                "flat vector holds a {} layout, requested field is {}",
                flat.layout.field,
                FieldKind::of::<F>()
            )));
        }
        let expected = flat.layout.n_hidden * flat.layout.n_visible + flat.layout.n_hidden;
        if flat.values.len() != expected {
            return Err(Error::Parameter(format!(
                "flat vector has {} values, layout implies {expected}",
                flat.values.len()
            )));
        }
        let data = flat.values.iter().map(|&v| F::from_real(v)).collect();
        Self::from_data(flat.layout.n_visible, flat.layout.n_hidden, data)
    }
}

/// Basis-ordered amplitudes exp(log ψ(x) − c), c = max Re log ψ.
#[derive(Debug, Clone)]
pub struct PsiVector<F: Field> {
    amplitudes: Vec<F>,
    log_shift: F::Real,
}

impl<F: Field> PsiVector<F> {
    pub(crate) fn from_logs(logs: Vec<F>) -> Self {
        let shift = logs
            .iter()
            .map(|l| l.re())
            .fold(F::Real::neg_infinity(), |acc, x| if x > acc { x } else { acc });
        let amplitudes = logs
            .into_iter()
            .map(|l| (l - F::from_real(shift)).exp())
            .collect();
        Self {
            amplitudes,
            log_shift: shift,
        }
    }

    pub fn amplitudes(&self) -> &[F] {
        &self.amplitudes
    }

    /// The subtracted overflow guard c.
    pub fn log_shift(&self) -> F::Real {
        self.log_shift
    }

    pub fn norm_sqr(&self) -> F::Real {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Unit-norm copy of the amplitudes.
    pub fn normalized(&self) -> Result<Vec<F>> {
        let n2 = self.norm_sqr();
        if n2 <= F::Real::zero() {
            return Err(Error::DegenerateState(
                "amplitude vector has zero norm".into(),
            ));
        }
        let inv = F::Real::one() / Float::sqrt(n2);
        Ok(self.amplitudes.iter().map(|a| a.scale(inv)).collect())
    }
}

/// Fixed parameter ordering used by the flat layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlatOrdering {
    /// W row-major (hidden index outer, visible inner), then hidden biases.
    WeightsRowMajorThenBias,
}

/// Shape and field metadata carried alongside a flat weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatLayout {
    pub n_visible: usize,
    pub n_hidden: usize,
    pub field: FieldKind,
    pub ordering: FlatOrdering,
}

impl FlatLayout {
    /// Number of real values in the flat vector.
    pub fn len(&self) -> usize {
        self.n_hidden * self.n_visible + self.n_hidden
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Column names in flat order: W_i_j then b_i.
    pub fn column_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.len());
        for i in 0..self.n_hidden {
            for j in 0..self.n_visible {
                names.push(format!("W_{i}_{j}"));
            }
        }
        for i in 0..self.n_hidden {
            names.push(format!("b_{i}"));
        }
        names
    }
}

/// A parameter vector flattened to reals in the fixed layout order.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatWeightVector<R> {
    pub values: Vec<R>,
    pub layout: FlatLayout,
}
