//! Sweeps a training run across a coupling grid.
//!
//! Two strategies: independent training re-initializes every grid point from
//! its own seed (`base_seed + index`), so the points are statistically
//! decorrelated and may train in parallel; adiabatic fine-tuning trains the
//! chain endpoint from scratch and warm-starts every subsequent point from
//! its neighbor's final parameters, forming a connected trajectory in weight
//! space. All parameters are fine-tuned, none are frozen.

use crate::error::{Error, Result};
use crate::rbm::RbmParameters;
use crate::scalar::{Field, RealScalar};
use crate::spin::{build_j1j2, build_tfim, Boundary, HamiltonianOperator};
use crate::train::{train, TrainingConfig, TrainingRecord};
use nalgebra::{DMatrix, RealField};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Uniformity tolerance on the coupling grid spacing.
const GRID_STEP_TOL: f64 = 1e-12;

/// Which chain model the sweep trains, with its fixed coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SweepModel {
    /// Transverse-field Ising chain; the swept coupling is the field h.
    Tfim { j: f64 },
    /// J1-J2 Heisenberg chain; the swept coupling is the ratio J2/J1.
    J1j2 { j1: f64 },
}

impl fmt::Display for SweepModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepModel::Tfim { .. } => write!(f, "tfim"),
            SweepModel::J1j2 { .. } => write!(f, "j1j2"),
        }
    }
}

/// An ascending, uniformly spaced coupling grid over one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub model: SweepModel,
    pub n_sites: usize,
    pub boundary: Boundary,
    couplings: Vec<f64>,
}

impl SweepGrid {
    /// Grid from an explicit coupling list; must be strictly increasing with
    /// a uniform step (within 1e-12).
    pub fn from_couplings(
        model: SweepModel,
        n_sites: usize,
        boundary: Boundary,
        couplings: Vec<f64>,
    ) -> Result<Self> {
        if couplings.is_empty() {
            return Err(Error::Parameter("empty coupling grid".into()));
        }
        if couplings.len() > 1 {
            let step = couplings[1] - couplings[0];
            if !(step > 0.0) {
                return Err(Error::Parameter(
                    "grid couplings must be strictly increasing".into(),
                ));
            }
            for pair in couplings.windows(2) {
                let d = pair[1] - pair[0];
                if !(d > 0.0) || (d - step).abs() > GRID_STEP_TOL {
                    return Err(Error::Parameter(format!(
                        "non-uniform grid step {d} (expected {step})"
                    )));
                }
            }
        }
        let grid = Self {
            model,
            n_sites,
            boundary,
            couplings,
        };
        // Fail early if the model cannot be built at this size.
        grid.hamiltonian_at::<f64>(0)?;
        Ok(grid)
    }

    /// Uniform grid min..=max with the given step. A zero-width range gives
    /// the single-point grid.
    pub fn uniform(
        model: SweepModel,
        n_sites: usize,
        boundary: Boundary,
        min: f64,
        max: f64,
        step: f64,
    ) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() || !(step > 0.0) {
            return Err(Error::Parameter(format!(
                "invalid grid spec {min}:{max}:{step}"
            )));
        }
        if max < min {
            return Err(Error::Parameter(format!(
                "grid maximum {max} below minimum {min}"
            )));
        }
        let count = ((max - min) / step + 1e-9).floor() as usize + 1;
        let couplings = (0..count).map(|i| min + i as f64 * step).collect();
        Self::from_couplings(model, n_sites, boundary, couplings)
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn len(&self) -> usize {
        self.couplings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.couplings.is_empty()
    }

    /// The Hamiltonian at one grid point.
    pub fn hamiltonian_at<R: RealScalar>(&self, index: usize) -> Result<HamiltonianOperator<R>> {
        let coupling = self.couplings[index];
        match self.model {
            SweepModel::Tfim { j } => build_tfim(
                self.n_sites,
                R::of(j),
                R::of(coupling),
                self.boundary,
            ),
            SweepModel::J1j2 { j1 } => build_j1j2(
                self.n_sites,
                R::of(j1),
                R::of(j1 * coupling),
                self.boundary,
            ),
        }
    }
}

/// How grid points are initialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Independent,
    AdiabaticForward,
    AdiabaticBackward,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Independent => write!(f, "independent"),
            Strategy::AdiabaticForward => write!(f, "adiabatic-forward"),
            Strategy::AdiabaticBackward => write!(f, "adiabatic-backward"),
        }
    }
}

/// Traversal direction of an adiabatic chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainDirection {
    /// Start at the lowest coupling and walk up.
    Forward,
    /// Start at the highest coupling and walk down.
    Backward,
}

/// Everything one sweep produced, in grid order. `None` marks grid points an
/// aborted adiabatic chain never reached.
#[derive(Debug, Clone)]
pub struct SweepResult<F: Field> {
    pub grid: SweepGrid,
    pub strategy: Strategy,
    pub alpha: usize,
    pub base_seed: u64,
    pub training: TrainingConfig,
    pub records: Vec<Option<TrainingRecord<F>>>,
    /// Grid indices in the order they were actually trained.
    pub chain_order: Vec<usize>,
}

impl<F: Field> SweepResult<F> {
    /// Couplings whose records failed or never ran.
    pub fn missing_couplings(&self) -> Vec<f64> {
        self.grid
            .couplings()
            .iter()
            .zip(&self.records)
            .filter(|(_, r)| !matches!(r, Some(rec) if rec.succeeded()))
            .map(|(&c, _)| c)
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.missing_couplings().is_empty()
    }

    /// Records in chain-traversal order (skipping not-run entries).
    pub fn records_in_chain_order(&self) -> impl Iterator<Item = &TrainingRecord<F>> {
        self.chain_order
            .iter()
            .filter_map(|&idx| self.records[idx].as_ref())
    }
}

fn train_point<F>(
    grid: &SweepGrid,
    index: usize,
    initial: RbmParameters<F>,
    cfg: &TrainingConfig,
) -> Result<TrainingRecord<F>>
where
    F: Field,
    F::Real: RealField,
{
    let op = grid.hamiltonian_at::<F::Real>(index)?;
    let exact = op.exact_ground_state()?;
    let mut record = train(initial, &op, cfg, &exact)?;
    record.coupling = F::Real::of(grid.couplings()[index]);
    Ok(record)
}

/// Trains every grid point from its own random initialization with seed
/// `base_seed + index`. Points are mutually independent; failed points mark
/// their record and the sweep continues.
pub fn run_independent<F>(
    grid: &SweepGrid,
    alpha: usize,
    cfg: &TrainingConfig,
    base_seed: u64,
) -> Result<SweepResult<F>>
where
    F: Field,
    F::Real: RealField,
{
    let records: Vec<Option<TrainingRecord<F>>> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let seed = base_seed.wrapping_add(idx as u64);
            let params = RbmParameters::<F>::random(grid.n_sites, alpha, seed)?;
            train_point(grid, idx, params, cfg).map(Some)
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        grid: grid.clone(),
        strategy: Strategy::Independent,
        alpha,
        base_seed,
        training: cfg.clone(),
        records,
        chain_order: (0..grid.len()).collect(),
    })
}

/// Trains the chain endpoint from a random initialization (seed `base_seed`)
/// and warm-starts each subsequent point from the previous final parameters.
/// A failed link aborts the chain beyond it; the remaining records stay
/// not-run since their warm starts are unavailable.
pub fn run_adiabatic<F>(
    grid: &SweepGrid,
    alpha: usize,
    cfg: &TrainingConfig,
    direction: ChainDirection,
    base_seed: u64,
) -> Result<SweepResult<F>>
where
    F: Field,
    F::Real: RealField,
{
    let order: Vec<usize> = match direction {
        ChainDirection::Forward => (0..grid.len()).collect(),
        ChainDirection::Backward => (0..grid.len()).rev().collect(),
    };
    let mut records: Vec<Option<TrainingRecord<F>>> = vec![None; grid.len()];
    let mut chain_order = Vec::with_capacity(grid.len());
    let mut warm_start: Option<RbmParameters<F>> = None;

    for &idx in &order {
        let initial = match warm_start.take() {
            Some(params) => params,
            None => RbmParameters::<F>::random(grid.n_sites, alpha, base_seed)?,
        };
        let record = train_point(grid, idx, initial, cfg)?;
        chain_order.push(idx);
        let ok = record.succeeded();
        if ok {
            warm_start = Some(record.final_params.clone());
        }
        records[idx] = Some(record);
        if !ok {
            break;
        }
    }

    Ok(SweepResult {
        grid: grid.clone(),
        strategy: match direction {
            ChainDirection::Forward => Strategy::AdiabaticForward,
            ChainDirection::Backward => Strategy::AdiabaticBackward,
        },
        alpha,
        base_seed,
        training: cfg.clone(),
        records,
        chain_order,
    })
}

/// Stacks the flattened final parameters row by row in grid order.
/// Every record must have succeeded.
pub fn collect_flat_weights<F: Field>(result: &SweepResult<F>) -> Result<DMatrix<F::Real>> {
    let missing = result.missing_couplings();
    if !missing.is_empty() {
        return Err(Error::IncompleteSweep { missing });
    }
    let rows = result.records.len();
    let flats: Vec<_> = result
        .records
        .iter()
        .map(|r| r.as_ref().expect("completeness checked").final_params.flatten())
        .collect();
    let p = flats[0].values.len();
    Ok(DMatrix::from_fn(rows, p, |r, c| flats[r].values[c]))
}
