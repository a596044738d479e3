//! Calibration dataset CSV and coefficient JSON.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use paoi_core::calibration::{CalibrationCoefficients, CalibrationDataset, CalibrationRow};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    rho: f64,
    sigma_a: f64,
    sigma_s: f64,
    gamma_s_star: f64,
    kind_a: String,
    kind_s: String,
    seed: u64,
}

pub fn write_dataset<W: Write>(dataset: &CalibrationDataset, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if dataset.is_empty() {
        w.write_record([
            "rho",
            "sigma_a",
            "sigma_s",
            "gamma_s_star",
            "kind_a",
            "kind_s",
            "seed",
        ])?;
    }
    for r in &dataset.rows {
        w.serialize(Record {
            rho: r.rho,
            sigma_a: r.sigma_a,
            sigma_s: r.sigma_s,
            gamma_s_star: r.gamma_s_star,
            kind_a: r.kind_a.clone(),
            kind_s: r.kind_s.clone(),
            seed: r.seed,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dataset<R: Read>(input: R) -> csv::Result<CalibrationDataset> {
    let mut rows = Vec::new();
    for rec in csv::Reader::from_reader(input).deserialize() {
        let r: Record = rec?;
        rows.push(CalibrationRow {
            rho: r.rho,
            sigma_a: r.sigma_a,
            sigma_s: r.sigma_s,
            gamma_s_star: r.gamma_s_star,
            kind_a: r.kind_a,
            kind_s: r.kind_s,
            seed: r.seed,
        });
    }
    Ok(CalibrationDataset { rows })
}

pub fn save_dataset(dataset: &CalibrationDataset, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_dataset(dataset, file).map_err(|e| csv_error(path, e))
}

pub fn load_dataset(path: &Path) -> Result<CalibrationDataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset(file).map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        }
    } else {
        Error::parse(path, e)
    }
}

/// Coefficients plus a free-text note on where they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaDocument {
    #[serde(flatten)]
    pub coefficients: CalibrationCoefficients,
    #[serde(default)]
    pub provenance: String,
}

pub fn read_theta(path: &Path) -> Result<ThetaDocument> {
    let doc: ThetaDocument = crate::config::read_json(path)?;
    let c = &doc.coefficients;
    if ![c.theta0, c.theta1, c.theta2].iter().all(|t| t.is_finite()) {
        return Err(Error::parse(path, "coefficients must be finite"));
    }
    Ok(doc)
}

pub fn write_theta(doc: &ThetaDocument, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc).expect("plain data serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
