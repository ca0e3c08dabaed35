//! Quantum walks on the configuration graph: populations and participation
//! ratios.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::{floquet_for, stroboscopic_evolve, FloquetOperator};
use crate::output::{PopulationRow, PrRow};
use crate::spin::{Configuration, DisorderRealization, SpinChainParams};
use crate::{CMatrix, C64};

const NORM_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct WalkRecord {
    /// `ρ_ii(nT)`; row `n` is the period, column `i` the configuration.
    pub populations: DMatrix<f64>,
    pub initial: Configuration,
}

impl WalkRecord {
    pub fn num_periods(&self) -> usize {
        self.populations.nrows() - 1
    }

    /// Largest `|Σ_i ρ_ii(nT) − 1|` over periods.
    pub fn normalization_defect(&self) -> f64 {
        self.populations
            .row_iter()
            .map(|r| (r.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Populations in long form, zeros omitted when `skip_zero` is set.
    pub fn rows(&self, skip_zero: bool) -> Vec<PopulationRow> {
        let mut rows = Vec::new();
        for period in 0..self.populations.nrows() {
            for config in 0..self.populations.ncols() {
                let population = self.populations[(period, config)];
                if !(skip_zero && population == 0.0) {
                    rows.push(PopulationRow {
                        period,
                        config,
                        population,
                    });
                }
            }
        }
        rows
    }
}

pub fn walk_populations(u: &FloquetOperator, initial: Configuration, num_periods: usize) -> Result<WalkRecord> {
    let states = stroboscopic_evolve(u, initial, num_periods)?;
    let dim = u.dim();
    let populations = DMatrix::from_fn(states.len(), dim, |n, i| states[n][i].norm_sqr());
    Ok(WalkRecord { populations, initial })
}

/// `1 / Σ_i |A_i|⁴`.
pub fn participation_ratio(state: &DVector<C64>) -> Result<f64> {
    let norm2: f64 = state.iter().map(|a| a.norm_sqr()).sum();
    if (norm2 - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::InvalidParameter(format!("state norm² {norm2} is not 1")));
    }
    Ok(1.0 / state.iter().map(|a| a.norm_sqr().powi(2)).sum::<f64>())
}

/// Tunneling time in whole periods, `round(1/(g·ε·T1))`, at least one.
pub fn tunneling_periods(params: &SpinChainParams) -> Result<usize> {
    if params.epsilon == 0.0 {
        return Err(Error::InvalidParameter("tunneling time diverges at zero rotation error".into()));
    }
    let periods = (1.0 / (params.g() * params.epsilon.abs() * params.t1)).round();
    Ok((periods as usize).max(1))
}

fn matrix_power(m: &CMatrix, mut exp: usize) -> CMatrix {
    let dim = m.nrows();
    let mut result = CMatrix::identity(dim, dim);
    let mut base = m.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            result = &result * &base;
        }
        exp >>= 1;
        if exp > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Participation ratio after one tunneling time for every initial
/// configuration, indexed by configuration.
pub fn pr_distribution(params: &SpinChainParams, disorder: &DisorderRealization) -> Result<Vec<f64>> {
    let tau = tunneling_periods(params)?;
    let u = floquet_for(params, disorder)?;
    pr_after(&u, tau)
}

/// Participation ratio of `U^periods |i⟩` for every `i`.
pub fn pr_after(u: &FloquetOperator, periods: usize) -> Result<Vec<f64>> {
    let evolved = matrix_power(&u.matrix, periods);
    (0..u.dim())
        .into_par_iter()
        .map(|i| participation_ratio(&evolved.column(i).into_owned()))
        .collect()
}

pub fn pr_rows(prs: &[f64]) -> Vec<PrRow> {
    prs.iter().enumerate().map(|(config, &pr)| PrRow { config, pr }).collect()
}

/// Summary of one participation-ratio distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrSummary {
    pub tau_periods: usize,
    pub mean: f64,
    pub skewness: f64,
}

pub fn pr_summary(prs: &[f64], tau_periods: usize) -> PrSummary {
    let mean = prs.iter().sum::<f64>() / prs.len() as f64;
    PrSummary {
        tau_periods,
        mean,
        skewness: crate::netfit::skewness(prs),
    }
}
