//! CSV artifacts. Every number is written with 12 significant digits.

use std::path::Path;

use qnute::{FidelityStats, Matrix, StepSummary, C};

use crate::error::AppError;

pub fn num(v: f64) -> String {
    format!("{v:.11e}")
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>, AppError> {
    csv::Writer::from_path(path).map_err(|e| AppError::csv(path, e))
}

fn finish(path: &Path, mut w: csv::Writer<std::fs::File>) -> Result<(), AppError> {
    w.flush().map_err(|e| AppError::io(path, e))
}

pub struct PriceRow {
    pub x: f64,
    pub qnute: f64,
    pub reference: f64,
    pub analytic: f64,
}

pub fn write_prices(path: &Path, rows: &[PriceRow]) -> Result<(), AppError> {
    let mut w = writer(path)?;
    let mut put = |rec: &[String]| w.write_record(rec).map_err(|e| AppError::csv(path, e));
    put(&["x", "qnute_price", "reference_pde_price", "analytic_price"].map(String::from))?;
    for r in rows {
        put(&[num(r.x), num(r.qnute), num(r.reference), num(r.analytic)])?;
    }
    finish(path, w)
}

pub fn write_trajectory(path: &Path, steps: &[StepSummary<f64>]) -> Result<(), AppError> {
    let mut w = writer(path)?;
    let mut put = |rec: &[String]| w.write_record(rec).map_err(|e| AppError::csv(path, e));
    put(&["step", "tau", "c", "cumulative_scale", "residual", "step_fidelity"].map(String::from))?;
    for s in steps {
        put(&[
            s.step.to_string(),
            num(s.tau),
            num(s.c),
            num(s.cumulative_scale),
            num(s.residual),
            s.step_fidelity.map(num).unwrap_or_default(),
        ])?;
    }
    finish(path, w)
}

pub struct FidelityRow {
    pub option: String,
    pub n: usize,
    pub d: usize,
    pub stats: FidelityStats<f64>,
}

pub fn write_fidelity(path: &Path, rows: &[FidelityRow]) -> Result<(), AppError> {
    let mut w = writer(path)?;
    let mut put = |rec: &[String]| w.write_record(rec).map_err(|e| AppError::csv(path, e));
    put(&["option", "n", "D", "mu_F", "sigma_F"].map(String::from))?;
    for r in rows {
        put(&[r.option.clone(), r.n.to_string(), r.d.to_string(), num(r.stats.mean), num(r.stats.std)])?;
    }
    finish(path, w)
}

/// One `(row, col, real, imag)` record per matrix entry.
pub fn write_dense(path: &Path, m: &Matrix<C<f64>>) -> Result<(), AppError> {
    let mut w = writer(path)?;
    let mut put = |rec: &[String]| w.write_record(rec).map_err(|e| AppError::csv(path, e));
    put(&["row", "col", "real", "imag"].map(String::from))?;
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            put(&[i.to_string(), j.to_string(), num(v.re), num(v.im)])?;
        }
    }
    finish(path, w)
}
