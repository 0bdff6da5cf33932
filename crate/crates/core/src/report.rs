//! Run configuration, the on-disk file set, and the provenance manifest.
//!
//! A sweep directory holds:
//!   - `results.csv` — one row per grid point with the headline metrics;
//!   - `weights.csv` — the grid×P flat weight matrix (complete sweeps only);
//!   - `history_<coupling>.csv` — per-step energies for each trained point;
//!   - `manifest.json` — the fully resolved config plus a content hash.
//!
//! Analysis adds `pca.csv`, `components.csv` and `transition.json`.
//!
//! Numeric CSV fields use 17-significant-digit decimal text, so re-reading
//! reproduces the binary values exactly. Every file is written to a
//! temporary sibling and renamed into place.

use crate::error::{Error, Result};
use crate::pca::{PcaResult, TransitionEstimate};
use crate::rbm::FlatLayout;
use crate::scalar::{Field, FieldKind, RealScalar};
use crate::spin::Boundary;
use crate::sweep::{SweepGrid, SweepModel, SweepResult, Strategy};
use crate::train::TrainingConfig;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Manifest schema identifier.
const MANIFEST_SCHEMA: &str = "nqs-sweep-manifest/1";

/// 17 significant digits: enough decimal text to round-trip an f64.
pub fn format_value<R: RealScalar>(x: R) -> String {
    format!("{:.16e}", x.as_f64())
}

/// Uniform grid specification `min..=max` in steps of `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

/// A fully resolved sweep configuration. Serializing this (in declaration
/// order, via JSON) is the canonical byte stream the content hash covers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: SweepModel,
    pub n_sites: usize,
    pub boundary: Boundary,
    pub grid: GridSpec,
    pub alpha: usize,
    pub field: FieldKind,
    pub training: TrainingConfig,
    pub strategy: Strategy,
    pub base_seed: u64,
}

impl RunConfig {
    /// Ising-chain reference configuration: N=8, α=1, real weights,
    /// J=−1, h ∈ [0,3] in steps of 0.025, lr 0.01, 200 steps.
    pub fn tfim_defaults() -> Self {
        Self {
            model: SweepModel::Tfim { j: -1.0 },
            n_sites: 8,
            boundary: Boundary::Periodic,
            grid: GridSpec {
                min: 0.0,
                max: 3.0,
                step: 0.025,
            },
            alpha: 1,
            field: FieldKind::Real,
            training: TrainingConfig::default(),
            strategy: Strategy::Independent,
            base_seed: 1,
        }
    }

    /// Heisenberg-chain reference configuration: N=12, α=2, complex
    /// weights, J1=1, J2/J1 ∈ [0,1] in steps of 0.01, lr 0.01, 200 steps.
    pub fn j1j2_defaults() -> Self {
        Self {
            model: SweepModel::J1j2 { j1: 1.0 },
            n_sites: 12,
            boundary: Boundary::Periodic,
            grid: GridSpec {
                min: 0.0,
                max: 1.0,
                step: 0.01,
            },
            alpha: 2,
            field: FieldKind::Complex,
            training: TrainingConfig::default(),
            strategy: Strategy::Independent,
            base_seed: 1,
        }
    }

    pub fn build_grid(&self) -> Result<SweepGrid> {
        SweepGrid::uniform(
            self.model,
            self.n_sites,
            self.boundary,
            self.grid.min,
            self.grid.max,
            self.grid.step,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha == 0 {
            return Err(Error::Config("alpha must be a positive integer".into()));
        }
        if self.training.steps == 0 {
            return Err(Error::Config("training.steps must be at least 1".into()));
        }
        if !(self.training.learning_rate > 0.0) {
            return Err(Error::Config("training.learning_rate must be positive".into()));
        }
        self.build_grid()?;
        Ok(())
    }

    /// SHA-256 over the canonical JSON serialization, hex-encoded.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Provenance record embedded in every sweep directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub generator: String,
    pub config: RunConfig,
    pub content_hash: String,
    /// Grid indices in the order they were trained.
    pub chain_order: Vec<usize>,
    pub failed_couplings: Vec<f64>,
    pub not_run_couplings: Vec<f64>,
}

impl Manifest {
    pub fn for_sweep<F: Field>(config: &RunConfig, result: &SweepResult<F>) -> Self {
        let mut failed = Vec::new();
        let mut not_run = Vec::new();
        for (record, &coupling) in result.records.iter().zip(result.grid.couplings()) {
            match record {
                Some(rec) if rec.succeeded() => {}
                Some(_) => failed.push(coupling),
                None => not_run.push(coupling),
            }
        }
        Self {
            schema: MANIFEST_SCHEMA.to_string(),
            generator: format!("nqs-core {}", env!("CARGO_PKG_VERSION")),
            config: config.clone(),
            content_hash: config.content_hash(),
            chain_order: result.chain_order.clone(),
            failed_couplings: failed,
            not_run_couplings: not_run,
        }
    }
}

/// Writes bytes to a temporary sibling, then renames into place so readers
/// never observe a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn csv_bytes(header: &[String], rows: Vec<Vec<String>>) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    Ok(writer
        .into_inner()
        .map_err(|e| Error::Input(format!("CSV buffer: {e}")))?)
}

/// File name of the per-step history at one coupling value.
pub fn history_file_name(coupling: f64) -> String {
    format!("history_{coupling:.6}.csv")
}

/// Emits the sweep file set into `dir` (created if missing). `weights.csv`
/// is only written for complete sweeps; failed or truncated sweeps still get
/// `results.csv`, the per-point histories, and the manifest.
pub fn write_sweep_outputs<F: Field>(
    dir: &Path,
    config: &RunConfig,
    result: &SweepResult<F>,
) -> Result<()> {
    fs::create_dir_all(dir)?;

    let header = vec![
        "coupling".to_string(),
        "initial_energy".to_string(),
        "final_energy".to_string(),
        "exact_energy".to_string(),
        "energy_error".to_string(),
        "infidelity".to_string(),
        "status".to_string(),
    ];
    let mut rows = Vec::with_capacity(result.records.len());
    for (record, &coupling) in result.records.iter().zip(result.grid.couplings()) {
        let row = match record {
            Some(rec) => vec![
                format_value(coupling),
                format_value(RealScalar::as_f64(rec.energy_history[0])),
                format_value(RealScalar::as_f64(
                    *rec.energy_history.last().expect("non-empty history"),
                )),
                format_value(RealScalar::as_f64(rec.exact_energy)),
                format_value(RealScalar::as_f64(rec.energy_error)),
                format_value(RealScalar::as_f64(rec.infidelity)),
                match rec.failed_at_step {
                    None => "ok".to_string(),
                    Some(step) => format!("failed@{step}"),
                },
            ],
            None => vec![
                format_value(coupling),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                "not-run".to_string(),
            ],
        };
        rows.push(row);
    }
    write_atomic(&dir.join("results.csv"), &csv_bytes(&header, rows)?)?;

    for (record, &coupling) in result.records.iter().zip(result.grid.couplings()) {
        let Some(rec) = record else { continue };
        let header = vec![
            "step".to_string(),
            "energy".to_string(),
            "energy_error".to_string(),
        ];
        let rows = rec
            .energy_history
            .iter()
            .enumerate()
            .map(|(step, &e)| {
                vec![
                    step.to_string(),
                    format_value(RealScalar::as_f64(e)),
                    format_value(RealScalar::as_f64(e - rec.exact_energy).abs()),
                ]
            })
            .collect();
        write_atomic(&dir.join(history_file_name(coupling)), &csv_bytes(&header, rows)?)?;
    }

    if result.is_complete() {
        let flat = crate::sweep::collect_flat_weights(result)?;
        let layout = result.records[0]
            .as_ref()
            .expect("complete sweep")
            .final_params
            .flatten()
            .layout;
        write_atomic(&dir.join("weights.csv"), &weights_csv_bytes(&flat, &layout)?)?;
    }

    let manifest = Manifest::for_sweep(config, result);
    write_atomic(
        &dir.join("manifest.json"),
        &serde_json::to_vec_pretty(&manifest)?,
    )?;
    Ok(())
}

fn weights_csv_bytes<R: RealScalar + nalgebra::Scalar>(
    flat: &DMatrix<R>,
    layout: &FlatLayout,
) -> Result<Vec<u8>> {
    let header = layout.column_names();
    if header.len() != flat.ncols() {
        return Err(Error::Input(format!(
            "layout names {} columns, matrix has {}",
            header.len(),
            flat.ncols()
        )));
    }
    let rows = (0..flat.nrows())
        .map(|r| (0..flat.ncols()).map(|c| format_value(flat[(r, c)])).collect())
        .collect();
    csv_bytes(&header, rows)
}

/// Reads `manifest.json` from a sweep directory.
pub fn load_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join("manifest.json");
    let bytes = fs::read(&path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let manifest: Manifest = serde_json::from_slice(&bytes)?;
    if manifest.schema != MANIFEST_SCHEMA {
        return Err(Error::Input(format!(
            "unsupported manifest schema {:?}",
            manifest.schema
        )));
    }
    Ok(manifest)
}

/// Parses a config file that is either a bare [`RunConfig`] or a manifest
/// with an embedded one (so a sweep can be reproduced from its manifest).
pub fn load_config_file(path: &Path) -> Result<RunConfig> {
    let bytes = fs::read(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    if let Ok(manifest) = serde_json::from_slice::<Manifest>(&bytes) {
        return Ok(manifest.config);
    }
    serde_json::from_slice::<RunConfig>(&bytes)
        .map_err(|e| Error::Config(format!("{} is not a run config or manifest: {e}", path.display())))
}

/// Reads `weights.csv`; returns the matrix and its column names. Ragged or
/// non-numeric content is an input error.
pub fn load_weights_csv(dir: &Path) -> Result<(DMatrix<f64>, Vec<String>)> {
    let path = dir.join("weights.csv");
    if !path.exists() {
        return Err(Error::Input(format!("{} is missing", path.display())));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(&path)?;
    let columns: Vec<String> = reader
        .headers()?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut data: Vec<f64> = Vec::new();
    let mut rows = 0usize;
    for record in reader.records() {
        let record = record?;
        for field in record.iter() {
            let value: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("non-numeric weight field {field:?}")))?;
            data.push(value);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::Input("weights.csv has no data rows".into()));
    }
    Ok((
        DMatrix::from_row_slice(rows, columns.len(), &data),
        columns,
    ))
}

/// Analysis summary destined for `transition.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionReport {
    pub status: String,
    pub component_index: usize,
    pub extremum_kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    pub explained_variance: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl TransitionReport {
    pub fn detected(estimate: &TransitionEstimate<f64>, explained: &[f64]) -> Self {
        Self {
            status: "detected".into(),
            component_index: estimate.component_index,
            extremum_kind: "minimum".into(),
            coupling: Some(estimate.coupling_at_extremum),
            grid_index: Some(estimate.grid_index),
            orientation: Some(estimate.orientation.to_string()),
            margin: Some(estimate.margin),
            explained_variance: explained.to_vec(),
            message: None,
        }
    }

    pub fn absent(component_index: usize, explained: &[f64], message: String) -> Self {
        Self {
            status: "no-interior-extremum".into(),
            component_index,
            extremum_kind: "minimum".into(),
            coupling: None,
            grid_index: None,
            orientation: None,
            margin: None,
            explained_variance: explained.to_vec(),
            message: Some(message),
        }
    }
}

/// Emits `pca.csv`, `components.csv` and `transition.json` into `dir`.
pub fn write_analysis_outputs(
    dir: &Path,
    pca: &PcaResult<f64>,
    couplings: &[f64],
    weight_columns: &[String],
    report: &TransitionReport,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let k = pca.n_components();

    let mut header = vec!["coupling".to_string()];
    header.extend((1..=k).map(|j| format!("pc{j}")));
    let rows = couplings
        .iter()
        .enumerate()
        .map(|(r, &c)| {
            let mut row = vec![format_value(c)];
            row.extend((0..k).map(|j| format_value(pca.projections[(r, j)])));
            row
        })
        .collect();
    write_atomic(&dir.join("pca.csv"), &csv_bytes(&header, rows)?)?;

    let rows = (0..k)
        .map(|j| {
            (0..pca.components.ncols())
                .map(|c| format_value(pca.components[(j, c)]))
                .collect()
        })
        .collect();
    write_atomic(
        &dir.join("components.csv"),
        &csv_bytes(&weight_columns.to_vec(), rows)?,
    )?;

    write_atomic(
        &dir.join("transition.json"),
        &serde_json::to_vec_pretty(report)?,
    )?;
    Ok(())
}

/// Convenience: directory path helper used by the CLI tests.
pub fn sweep_file_paths(dir: &Path) -> Vec<PathBuf> {
    ["results.csv", "weights.csv", "manifest.json"]
        .iter()
        .map(|name| dir.join(name))
        .collect()
}
