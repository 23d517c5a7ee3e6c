//! Matrix and factor dumps, and CSV/JSON report writers.
//!
//! A dump is a JSON document with a small header and a row-major `values`
//! array, so that files can be diffed across implementations.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::factorization::{FactorMatrix, FactorizedPotential};
use crate::hamiltonian::{CoefficientMatrices, SystemSpec};
use crate::resources::ResourceEstimate;

pub const ORDERING_TAG: &str = "spin-blocked/row-major";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixHeader {
    pub name: String,
    pub n: usize,
    pub dimension: usize,
    pub sides: Vec<usize>,
    pub wigner_seitz: f64,
    pub eta: usize,
    pub ordering: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDump {
    pub header: MatrixHeader,
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl MatrixDump {
    pub fn new(name: &str, spec: &SystemSpec, m: &DMatrix<f64>) -> Self {
        Self {
            header: MatrixHeader {
                name: name.to_string(),
                n: spec.n_modes(),
                dimension: spec.dimension,
                sides: spec.sides.clone(),
                wigner_seitz: spec.wigner_seitz,
                eta: spec.eta,
                ordering: ORDERING_TAG.to_string(),
            },
            rows: m.nrows(),
            cols: m.ncols(),
            values: (0..m.nrows())
                .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
                .map(|(i, j)| m[(i, j)])
                .collect(),
        }
    }

    pub fn matrix(&self) -> Result<DMatrix<f64>> {
        if self.values.len() != self.rows * self.cols {
            return Err(Error::Format(format!(
                "{} values for a {}×{} matrix",
                self.values.len(),
                self.rows,
                self.cols
            )));
        }
        Ok(DMatrix::from_row_slice(self.rows, self.cols, &self.values))
    }
}

/// T, U (as an N×1 column) and V of a spec.
pub fn dump_coefficients(spec: &SystemSpec, m: &CoefficientMatrices) -> Vec<MatrixDump> {
    vec![
        MatrixDump::new("T", spec, &m.t),
        MatrixDump::new("U", spec, &DMatrix::from_column_slice(m.n, 1, m.u.as_slice())),
        MatrixDump::new("V", spec, &m.v),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactorPayload {
    Diagonal { values: Vec<f64> },
    Dense { rows: usize, values: Vec<f64> },
}

impl From<&FactorMatrix> for FactorPayload {
    fn from(m: &FactorMatrix) -> Self {
        match m {
            FactorMatrix::Diagonal(d) => FactorPayload::Diagonal {
                values: d.iter().copied().collect(),
            },
            FactorMatrix::Dense(m) => FactorPayload::Dense {
                rows: m.nrows(),
                values: m.transpose().iter().copied().collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorEntry {
    pub weight: f64,
    pub x: FactorPayload,
    pub y: Option<FactorPayload>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorDump {
    pub method: String,
    pub n: usize,
    pub shift: f64,
    pub dropped_constant: f64,
    pub ordering: String,
    pub factors: Vec<FactorEntry>,
}

impl From<&FactorizedPotential> for FactorDump {
    fn from(f: &FactorizedPotential) -> Self {
        Self {
            method: f.method.to_string(),
            n: f.n(),
            shift: f.shift,
            dropped_constant: f.dropped_constant,
            ordering: ORDERING_TAG.to_string(),
            factors: f
                .factors
                .iter()
                .map(|x| FactorEntry {
                    weight: x.weight,
                    x: (&x.x).into(),
                    y: x.y.as_ref().map(Into::into),
                })
                .collect(),
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), value)?;
    Ok(())
}

/// Reproducible columns of a bound report; timing goes to telemetry files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub size: String,
    pub r_s: f64,
    pub eta: usize,
    pub method: String,
    pub n: usize,
    pub shift: Option<f64>,
    pub first_order: Option<f64>,
    pub w1: Option<f64>,
    pub tvt: Option<f64>,
    pub tvv: Option<f64>,
    pub w2_vtv: Option<f64>,
    pub w2_tvt: Option<f64>,
    pub w2_best: Option<f64>,
    pub error: Option<String>,
}

impl BoundRow {
    pub fn from_report(spec: &SystemSpec, r: &BoundReport) -> Self {
        Self {
            size: size_label(&spec.sides),
            r_s: spec.wigner_seitz,
            eta: r.eta,
            method: r.method.to_string(),
            n: r.n,
            shift: Some(r.shift),
            first_order: r.first_order_seminorm,
            w1: r.w1,
            tvt: Some(r.tvt),
            tvv: Some(r.tvv),
            w2_vtv: Some(r.w2_vtv),
            w2_tvt: Some(r.w2_tvt),
            w2_best: Some(r.w2_best),
            error: None,
        }
    }

    pub fn failed(spec: &SystemSpec, eta: usize, method: &str, message: &str) -> Self {
        Self {
            size: size_label(&spec.sides),
            r_s: spec.wigner_seitz,
            eta,
            method: method.to_string(),
            n: spec.n_modes(),
            shift: None,
            first_order: None,
            w1: None,
            tvt: None,
            tvv: None,
            w2_vtv: None,
            w2_tvt: None,
            w2_best: None,
            error: Some(message.to_string()),
        }
    }

    /// Identity of a row within a sweep.
    pub fn key(&self) -> String {
        row_key(&self.size, self.r_s, self.eta, &self.method)
    }
}

pub fn row_key(size: &str, r_s: f64, eta: usize, method: &str) -> String {
    format!("{size}|{r_s}|{eta}|{method}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelemetryRow {
    pub key: String,
    pub method: String,
    pub wall_time_s: f64,
    pub peak_mem_bytes: usize,
}

/// Resource row mirroring the columns of the paper-style tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceRow {
    pub r_s: f64,
    pub eta: usize,
    pub filling: f64,
    pub size: String,
    pub method: String,
    pub w2: f64,
    pub n_pe: u64,
    pub rotations_per_step: u64,
    pub toffolis_per_step: u64,
    pub n_tof: u64,
    pub n_t: u64,
    pub aggregated: u64,
    pub ts_fraction: f64,
    pub syn_fraction: f64,
    pub lambda: Option<f64>,
    pub qubitization_t: Option<f64>,
    pub qubitization_ancilla: Option<u64>,
}

impl ResourceRow {
    pub fn new(spec: &SystemSpec, method: &str, e: &ResourceEstimate) -> Self {
        Self {
            r_s: spec.wigner_seitz,
            eta: spec.eta,
            filling: spec.filling(),
            size: size_label(&spec.sides),
            method: method.to_string(),
            w2: e.w2,
            n_pe: e.n_pe,
            rotations_per_step: e.rotations_per_step,
            toffolis_per_step: e.toffolis_per_step,
            n_tof: e.n_tof,
            n_t: e.n_t,
            aggregated: e.aggregated,
            ts_fraction: e.ts_fraction,
            syn_fraction: e.syn_fraction,
            lambda: e.lambda,
            qubitization_t: e.qubitization_t,
            qubitization_ancilla: e.qubitization_ancilla,
        }
    }
}

pub fn size_label(sides: &[usize]) -> String {
    sides
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join("x")
}

/// Writes serializable rows as CSV with a header.
pub fn write_csv<T: Serialize, W: Write>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
