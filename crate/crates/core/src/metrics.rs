//! Error metrics, pole reports and fit reports.
//!
//! The main figure of merit is the grid-approximated relative L∞ error
//!
//! ```text
//! ε = max_i ‖H(s_i) - Ĥ(s_i)‖₂ / max_i ‖H(s_i)‖₂
//! ```
//!
//! over the sample points of the reference data, with matrix 2-norms per point.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::barycentric::{StateSpaceModel, TransferFunction};
use crate::dataset::FrequencyDataset;
use crate::error::{Error, Result};
use crate::linalg::{self, pencil_eigen, C64};
use crate::pole_place::dominance;
use crate::serde_complex::complex;

/// Relative distance under which a sample point counts as an interpolation node.
pub const NODE_MATCH_TOL: f64 = 1e-12;

fn is_node(s: C64, nodes: &[C64]) -> bool {
    nodes.iter().any(|&l| (s - l).norm() <= NODE_MATCH_TOL * (1.0 + l.norm()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointError {
    #[serde(with = "complex")]
    pub s: C64,
    /// `‖H(s) - Ĥ(s)‖₂`
    pub abs_err: f64,
    /// `abs_err / ‖H(s)‖₂` (the absolute error where `H(s) = 0`)
    pub rel_err: f64,
    /// `‖H(s)‖₂`
    pub ref_norm: f64,
    pub node: bool,
}

/// Per-point errors, flagging samples that coincide with one of `nodes`.
pub fn pointwise_errors_with_nodes(
    reference: &FrequencyDataset,
    model: &dyn TransferFunction,
    nodes: &[C64],
) -> Result<Vec<PointError>> {
    if (model.outputs(), model.inputs()) != (reference.outputs(), reference.inputs()) {
        return Err(Error::Validation(format!(
            "model is {}x{}, data is {}x{}",
            model.outputs(),
            model.inputs(),
            reference.outputs(),
            reference.inputs()
        )));
    }
    reference
        .points()
        .iter()
        .zip(reference.values())
        .map(|(&s, h)| {
            let hh = model.eval(s)?;
            let abs_err = linalg::norm2(&(h - hh));
            let ref_norm = linalg::norm2(h);
            let rel_err = if ref_norm > 0.0 { abs_err / ref_norm } else { abs_err };
            Ok(PointError { s, abs_err, rel_err, ref_norm, node: is_node(s, nodes) })
        })
        .collect()
}

/// Per-point errors; with `skip_nodes` the model's interpolation nodes are left out.
pub fn pointwise_errors(
    reference: &FrequencyDataset,
    model: &dyn TransferFunction,
    skip_nodes: bool,
) -> Result<Vec<PointError>> {
    let all = pointwise_errors_with_nodes(reference, model, &model.nodes())?;
    Ok(if skip_nodes { all.into_iter().filter(|p| !p.node).collect() } else { all })
}

/// `max abs_err / max ref_norm` over a full list of point errors.
pub fn epsilon_from_points(points: &[PointError]) -> f64 {
    let num = points.iter().map(|p| p.abs_err).fold(0.0, f64::max);
    let den = points.iter().map(|p| p.ref_norm).fold(0.0, f64::max);
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

/// Grid-approximated relative L∞ error over the reference sample points.
pub fn linf_error(reference: &FrequencyDataset, model: &dyn TransferFunction) -> Result<f64> {
    Ok(epsilon_from_points(&pointwise_errors_with_nodes(reference, model, &[])?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleEntry {
    pub re: f64,
    pub im: f64,
    pub stable: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dominance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleReport {
    /// Finite poles in ascending real part.
    pub poles: Vec<PoleEntry>,
    /// Infinite generalized eigenvalues; they do not affect `stable`.
    pub infinite: usize,
    /// Every finite pole has negative real part.
    pub stable: bool,
}

impl PoleReport {
    pub fn unstable_count(&self) -> usize {
        self.poles.iter().filter(|p| !p.stable).count()
    }
}

/// Finite eigenvalues of `(A, E)` with stability flags (stable iff `Re < 0`) and, on
/// request, their dominance.
pub fn pole_report(mdl: &StateSpaceModel, with_dominance: bool) -> Result<PoleReport> {
    let eg = pencil_eigen(&mdl.a, mdl.e.as_ref())?;
    let table = if with_dominance { Some(dominance(mdl)?) } else { None };
    let mut poles: Vec<PoleEntry> = eg
        .values
        .iter()
        .map(|&a| PoleEntry {
            re: a.re,
            im: a.im,
            stable: a.re < 0.0,
            dominance: table.as_ref().map(|t| {
                t.entries
                    .iter()
                    .find(|e| e.eigenvalue == a)
                    .map_or(f64::INFINITY, |e| e.dominance)
            }),
        })
        .collect();
    poles.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let stable = poles.iter().all(|p| p.stable);
    Ok(PoleReport { poles, infinite: eg.infinite, stable })
}

/// Everything recorded about one fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub method: String,
    pub order: usize,
    pub epsilon: f64,
    /// Errors at every sample point of the data used for the report.
    pub points: Vec<PointError>,
    pub poles: PoleReport,
    /// Singular values of `[L Ls]` when a Loewner pencil was involved.
    #[serde(default)]
    pub loewner_singular_values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cauchy_cond: Option<f64>,
    #[serde(default)]
    pub rank_deficient: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub converged: Option<bool>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl FitReport {
    /// Errors and poles of `model` against `data`; diagnostic fields start empty.
    pub fn new(
        method: &str,
        data: &FrequencyDataset,
        model: &dyn TransferFunction,
        state_space: &StateSpaceModel,
        nodes: &[C64],
    ) -> Result<Self> {
        let points = pointwise_errors_with_nodes(data, model, nodes)?;
        Ok(Self {
            method: method.to_string(),
            order: state_space.order(),
            epsilon: epsilon_from_points(&points),
            points,
            poles: pole_report(state_space, false)?,
            loewner_singular_values: Vec::new(),
            cauchy_cond: None,
            rank_deficient: false,
            converged: None,
            warnings: Vec::new(),
        })
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, self)?;
        w.flush()?;
        Ok(())
    }

    /// `omega,abs_err,rel_err` rows (omega = Im s), nodes optionally left out.
    pub fn write_csv<W: Write>(&self, writer: W, skip_nodes: bool) -> Result<()> {
        write_error_csv(writer, &self.points, skip_nodes)
    }
}

pub fn write_error_csv<W: Write>(writer: W, points: &[PointError], skip_nodes: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["omega", "abs_err", "rel_err"]).map_err(csv_err)?;
    for p in points.iter().filter(|p| !(skip_nodes && p.node)) {
        w.write_record([
            format!("{:.16e}", p.s.im),
            format!("{:.16e}", p.abs_err),
            format!("{:.16e}", p.rel_err),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
