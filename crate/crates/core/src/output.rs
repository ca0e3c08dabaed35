//! CSV schemas for every data file the pipeline writes.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Degree histogram: `bin_lo,bin_hi,density`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub density: f64,
}

/// Power-law fit summary: `epsilon,n,beta,k_min,ks,n_tail,favored`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub epsilon: f64,
    pub n: usize,
    pub beta: f64,
    pub k_min: f64,
    pub ks: f64,
    pub n_tail: usize,
    pub favored: String,
}

/// Average degree per domain-wall class: `epsilon,walls,mean_degree,std_degree,realizations`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallDegreeRow {
    pub epsilon: f64,
    pub walls: usize,
    pub mean_degree: f64,
    pub std_degree: f64,
    pub realizations: usize,
}

/// Gap-ratio histogram: `r_lo,r_hi,density,reference_poisson,reference_coe`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRatioRow {
    pub r_lo: f64,
    pub r_hi: f64,
    pub density: f64,
    pub reference_poisson: f64,
    pub reference_coe: f64,
}

/// Fidelity heat map: `config,epsilon,fidelity`. Empty fidelity marks a
/// configuration whose reference spectrum vanishes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityRow {
    pub config: usize,
    pub epsilon: f64,
    pub fidelity: Option<f64>,
}

/// Walk populations: `period,config,population`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationRow {
    pub period: usize,
    pub config: usize,
    pub population: f64,
}

/// Participation ratios: `config,pr`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrRow {
    pub config: usize,
    pub pr: f64,
}

/// Semiclassical fixed points: `bits,energy,min_eigenvalue,max_eigenvalue,classification`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalRow {
    pub bits: String,
    pub energy: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub classification: String,
}

/// Dense complex matrix entry: `row,col,re,im`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixEntryRow {
    pub row: usize,
    pub col: usize,
    pub re: f64,
    pub im: f64,
}

/// Quasienergy list: `index,quasienergy`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasienergyRow {
    pub index: usize,
    pub quasienergy: f64,
}

/// Magnetization series: `period,magnetization`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub period: usize,
    pub magnetization: f64,
}

/// Power spectrum: `k,omega,power`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub k: usize,
    pub omega: f64,
    pub power: f64,
}

/// Level-statistics summary: `epsilon,mean_ratio,samples,excluded_degenerate,realizations`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSummaryRow {
    pub epsilon: f64,
    pub mean_ratio: f64,
    pub samples: usize,
    pub excluded_degenerate: usize,
    pub realizations: usize,
}

/// Cluster summary: `epsilon,realization,components,largest,largest_fraction`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterRow {
    pub epsilon: f64,
    pub realization: u64,
    pub components: usize,
    pub largest: usize,
    pub largest_fraction: f64,
}

fn csv_error(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Parse(format!("{other:?}")),
        }
    } else {
        Error::Parse(e.to_string())
    }
}

pub fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Error::Parse(e.to_string()))
}

pub fn csv_from_bytes<T: DeserializeOwned>(bytes: &[u8]) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(bytes);
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = File::create(path)?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

/// Reads the `degree` column of any CSV that has one (node tables included).
pub fn read_degree_column(path: &Path) -> Result<Vec<usize>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    let headers = r.headers().map_err(csv_error)?.clone();
    let col = headers
        .iter()
        .position(|h| h.trim() == "degree")
        .ok_or_else(|| Error::Parse(format!("{} has no `degree` column", path.display())))?;
    let mut out = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_error)?;
        let field = record.get(col).unwrap_or("").trim();
        let value = field
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad degree value `{field}`")))?;
        out.push(value);
    }
    Ok(out)
}
