//! PCA over a sweep's flat weight matrix, and localization of the phase
//! transition as the interior extremum of a principal-component projection
//! curve.
//!
//! Directions come from the SVD of the mean-centered matrix with no
//! per-feature scaling (the weights share units). Principal directions are
//! sign-ambiguous, so each component row is oriented to make the first grid
//! row's projection nonnegative, ties broken toward the next row; that makes
//! repeated runs bit-identical. The transition detector looks for the global
//! minimum of the chosen projection curve over interior grid points, trying
//! the negated curve as well before declaring the signature absent.

use crate::error::{Error, Result};
use crate::scalar::RealScalar;
use nalgebra::{DMatrix, RealField};
use num_traits::Float;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Mean, principal directions, explained variances and per-row projections.
#[derive(Debug, Clone)]
pub struct PcaResult<R> {
    /// Column means of the input matrix, length P.
    pub mean: Vec<R>,
    /// k×P orthonormal rows, descending explained variance.
    pub components: DMatrix<R>,
    /// Variance along each component (singular value² / (rows − 1)).
    pub explained_variance: Vec<R>,
    /// rows×k scores: (input − mean)·componentsᵀ.
    pub projections: DMatrix<R>,
}

impl<R: RealScalar> PcaResult<R> {
    pub fn n_components(&self) -> usize {
        self.components.nrows()
    }

    /// Projection curve of one component (1-based index) across grid rows.
    pub fn projection_curve(&self, component_index: usize) -> Vec<R> {
        self.projections
            .column(component_index - 1)
            .iter()
            .copied()
            .collect()
    }

    /// Total mean-centered variance captured by all retained components.
    pub fn total_explained(&self) -> R {
        self.explained_variance.iter().copied().sum()
    }
}

/// Principal component analysis of a rows×P matrix (rows = grid points).
pub fn pca<R: RealScalar + RealField>(weights: &DMatrix<R>, k: usize) -> Result<PcaResult<R>> {
    let rows = weights.nrows();
    let p = weights.ncols();
    if rows < 2 {
        return Err(Error::Parameter(format!(
            "PCA needs at least 2 rows, got {rows}"
        )));
    }
    let k_max = (rows - 1).min(p);
    if k == 0 || k > k_max {
        return Err(Error::Parameter(format!(
            "component count {k} outside 1..={k_max} for a {rows}×{p} matrix"
        )));
    }

    let mean: Vec<R> = (0..p)
        .map(|j| weights.column(j).iter().copied().sum::<R>() / R::of(rows as f64))
        .collect();
    let mut centered = weights.clone();
    for mut row in centered.row_iter_mut() {
        for (value, mu) in row.iter_mut().zip(&mean) {
            *value -= *mu;
        }
    }

    let svd = centered.clone().svd(false, true);
    let v_t = svd.v_t.expect("V requested");
    let mut components = DMatrix::zeros(k, p);
    for j in 0..k {
        components.set_row(j, &v_t.row(j));
    }

    // Deterministic orientation: first nonzero projection down the grid
    // rows must be nonnegative.
    for j in 0..k {
        let direction = components.row(j).transpose();
        let mut flip = false;
        for r in 0..rows {
            let score = centered.row(r).transpose().dot(&direction);
            if score != R::zero() {
                flip = score < R::zero();
                break;
            }
        }
        if flip {
            for value in components.row_mut(j).iter_mut() {
                *value = -*value;
            }
        }
    }

    let projections = &centered * components.transpose();

    let denom = R::of((rows - 1) as f64);
    let explained_variance: Vec<R> = (0..k)
        .map(|j| {
            let sigma = svd.singular_values[j];
            sigma * sigma / denom
        })
        .collect();

    Ok(PcaResult {
        mean,
        components,
        explained_variance,
        projections,
    })
}

/// Orientation under which the detector read the projection curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveOrientation {
    /// The sign-convention curve as produced by [`pca`].
    AsIs,
    /// The negated curve (the signature appeared as an interior maximum).
    Negated,
}

impl fmt::Display for CurveOrientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveOrientation::AsIs => write!(f, "as-is"),
            CurveOrientation::Negated => write!(f, "negated"),
        }
    }
}

/// A located interior extremum of a projection curve.
#[derive(Debug, Clone)]
pub struct TransitionEstimate<R> {
    pub coupling_at_extremum: R,
    pub grid_index: usize,
    /// 1-based component index the curve came from.
    pub component_index: usize,
    pub orientation: CurveOrientation,
    /// The oriented curve the minimum was located on.
    pub curve: Vec<R>,
    /// Gap between the extremum and the next-smallest local minimum of the
    /// oriented curve; the full curve range when that minimum is unique.
    pub margin: R,
}

/// Locates the global minimum of the chosen component's projection curve
/// over interior grid points. If the as-is curve bottoms out at an endpoint,
/// the negated curve is tried before reporting the signature absent.
pub fn detect_transition<R: RealScalar>(
    pca: &PcaResult<R>,
    couplings: &[R],
    component_index: usize,
) -> Result<TransitionEstimate<R>> {
    if component_index == 0 || component_index > pca.n_components() {
        return Err(Error::Parameter(format!(
            "component index {component_index} outside 1..={}",
            pca.n_components()
        )));
    }
    if couplings.len() != pca.projections.nrows() {
        return Err(Error::DimensionMismatch {
            expected: pca.projections.nrows(),
            got: couplings.len(),
        });
    }
    if couplings.len() < 3 {
        return Err(Error::Parameter(
            "interior extremum needs at least 3 grid points".into(),
        ));
    }
    let curve = pca.projection_curve(component_index);
    for orientation in [CurveOrientation::AsIs, CurveOrientation::Negated] {
        let oriented: Vec<R> = match orientation {
            CurveOrientation::AsIs => curve.clone(),
            CurveOrientation::Negated => curve.iter().map(|&v| -v).collect(),
        };
        let argmin = oriented
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite projections"))
            .expect("non-empty curve")
            .0;
        if argmin == 0 || argmin == oriented.len() - 1 {
            continue;
        }
        let margin = extremum_margin(&oriented, argmin);
        return Ok(TransitionEstimate {
            coupling_at_extremum: couplings[argmin],
            grid_index: argmin,
            component_index,
            orientation,
            curve: oriented,
            margin,
        });
    }
    Err(Error::NoInteriorExtremum { component_index })
}

/// Distance from the global minimum to the next-smallest local minimum
/// (endpoints count as boundary local minima); falls back to the full curve
/// range when the minimum is the only one.
fn extremum_margin<R: RealScalar>(curve: &[R], argmin: usize) -> R {
    let g = curve.len();
    let is_local_min = |i: usize| -> bool {
        let left_ok = i == 0 || curve[i] <= curve[i - 1];
        let right_ok = i == g - 1 || curve[i] <= curve[i + 1];
        left_ok && right_ok
    };
    let best = curve[argmin];
    let mut second: Option<R> = None;
    for i in 0..g {
        if i == argmin || !is_local_min(i) {
            continue;
        }
        second = Some(match second {
            Some(s) => Float::min(s, curve[i]),
            None => curve[i],
        });
    }
    match second {
        Some(s) => s - best,
        None => {
            let max = curve.iter().copied().fold(R::neg_infinity(), Float::max);
            max - best
        }
    }
}

/// Per-coupling projection rows ready for tabular export (PC1..PCk).
pub fn export_projection_tracks<R: RealScalar>(
    pca: &PcaResult<R>,
    couplings: &[R],
) -> Result<Vec<ProjectionRow<R>>> {
    if couplings.len() != pca.projections.nrows() {
        return Err(Error::DimensionMismatch {
            expected: pca.projections.nrows(),
            got: couplings.len(),
        });
    }
    Ok(couplings
        .iter()
        .enumerate()
        .map(|(r, &coupling)| ProjectionRow {
            coupling,
            values: pca.projections.row(r).iter().copied().collect(),
        })
        .collect())
}

/// One row of the projection-track table.
#[derive(Debug, Clone)]
pub struct ProjectionRow<R> {
    pub coupling: R,
    pub values: Vec<R>,
}
