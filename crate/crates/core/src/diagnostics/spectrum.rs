//! Stroboscopic magnetization, its power spectrum, and spectral fidelity.

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::{stroboscopic_evolve, FloquetOperator};
use crate::output::{SeriesRow, SpectrumRow};
use crate::spin::{pauli_string, site_bit, Axis, Configuration};
use crate::{CMatrix, C64};

/// Largest allowed disagreement between the two magnetization routes.
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-10;

/// Samples `M(0), M(T), …, M(N·T)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub values: Vec<f64>,
    pub period: f64,
}

impl TimeSeries {
    /// Number of periods `N` (one less than the sample count).
    pub fn num_periods(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn rows(&self) -> Vec<SeriesRow> {
        self.values
            .iter()
            .enumerate()
            .map(|(period, &magnetization)| SeriesRow { period, magnetization })
            .collect()
    }
}

/// `(1/n) Σ_r σ^z_r` as a dense matrix.
pub fn total_magnetization_operator(n: usize) -> Result<CMatrix> {
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for site in 1..=n {
        m += pauli_string(&[(site, Axis::Z)], n)?.matrix;
    }
    Ok(m / C64::new(n as f64, 0.0))
}

/// `⟨ψ|O|ψ⟩` for the total magnetization operator.
pub fn magnetization_expectation(op: &CMatrix, psi: &DVector<C64>) -> f64 {
    psi.dotc(&(op * psi)).re
}

/// Magnetization from the configuration populations,
/// `−(1/n) Σ_r Σ_j (−1)^{j_r} |A_j|²` with `j_r` the bit of site `r`.
pub fn magnetization_from_populations(psi: &DVector<C64>, n: usize) -> f64 {
    let mut total = 0.0;
    for (j, a) in psi.iter().enumerate() {
        let p = a.norm_sqr();
        for r in 1..=n {
            let sign = if site_bit(j, r, n) { -1.0 } else { 1.0 };
            total += sign * p;
        }
    }
    -total / n as f64
}

/// Stroboscopic magnetization starting from `initial`, computed as an
/// expectation value and cross-checked against the population formula.
pub fn magnetization_series(u: &FloquetOperator, initial: Configuration, num_periods: usize) -> Result<TimeSeries> {
    if num_periods == 0 {
        return Err(Error::InvalidParameter("need at least one period".into()));
    }
    let n = u.n();
    let op = total_magnetization_operator(n)?;
    let states = stroboscopic_evolve(u, initial, num_periods)?;
    let mut values = Vec::with_capacity(states.len());
    for (m, psi) in states.iter().enumerate() {
        let direct = magnetization_expectation(&op, psi);
        let populations = magnetization_from_populations(psi, n);
        if (direct - populations).abs() > CROSS_CHECK_TOLERANCE {
            return Err(Error::Eigen(format!(
                "magnetization routes disagree at period {m}: {direct} vs {populations}"
            )));
        }
        values.push(direct);
    }
    Ok(TimeSeries { values, period: u.period })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSpectrum {
    /// `V_k = |𝓜(k)|²`, `k = 0 … N−1`.
    pub power: Vec<f64>,
    pub num_periods: usize,
    pub period: f64,
}

impl PowerSpectrum {
    pub fn omega(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / (self.num_periods as f64 * self.period)
    }

    pub fn total(&self) -> f64 {
        self.power.iter().sum()
    }

    pub fn rows(&self) -> Vec<SpectrumRow> {
        self.power
            .iter()
            .enumerate()
            .map(|(k, &power)| SpectrumRow {
                k,
                omega: self.omega(k),
                power,
            })
            .collect()
    }
}

/// `𝓜(k) = (1/N) Σ_{m=1}^{N} e^{−2πikm/N} M(mT)` by direct summation.
/// The `m = 0` sample does not enter.
pub fn power_spectrum(series: &TimeSeries) -> Result<PowerSpectrum> {
    let n = series.num_periods();
    if n < 2 {
        return Err(Error::InsufficientData(format!("power spectrum needs N >= 2, got {n}")));
    }
    let nf = n as f64;
    let power = (0..n)
        .map(|k| {
            let mut acc = C64::new(0.0, 0.0);
            for m in 1..=n {
                // Reduce km mod N first so the phase stays exact for large products.
                let phase = -2.0 * PI * ((k * m) % n) as f64 / nf;
                acc += C64::from_polar(series.values[m], phase);
            }
            (acc / nf).norm_sqr()
        })
        .collect();
    Ok(PowerSpectrum {
        power,
        num_periods: n,
        period: series.period,
    })
}

/// `(1/N) Σ_{m=1}^{N} |M(mT)|²`, the Parseval partner of [`PowerSpectrum::total`].
pub fn series_energy(series: &TimeSeries) -> f64 {
    let n = series.num_periods();
    series.values[1..].iter().map(|v| v * v).sum::<f64>() / n as f64
}

/// `sqrt(V_ref·V / (‖V_ref‖‖V‖))`, clamped to `[0, 1]`.
pub fn spectral_fidelity(reference: &PowerSpectrum, perturbed: &PowerSpectrum) -> Result<f64> {
    if reference.power.len() != perturbed.power.len() {
        return Err(Error::DimensionMismatch {
            expected: reference.power.len(),
            found: perturbed.power.len(),
        });
    }
    let dot: f64 = reference.power.iter().zip(&perturbed.power).map(|(a, b)| a * b).sum();
    let na = reference.power.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nb = perturbed.power.iter().map(|b| b * b).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Degenerate("zero-norm power spectrum".into()));
    }
    Ok((dot / (na * nb)).clamp(0.0, 1.0).sqrt())
}

/// Magnetization series for every initial configuration at once, from the
/// populations of the columns of `U^m`.
pub fn all_magnetization_series(u: &FloquetOperator, num_periods: usize) -> Result<Vec<TimeSeries>> {
    if num_periods == 0 {
        return Err(Error::InvalidParameter("need at least one period".into()));
    }
    let n = u.n();
    let dim = u.dim();
    let weights: Vec<f64> = (0..dim)
        .map(|j| (1..=n).map(|r| if site_bit(j, r, n) { 1.0 } else { -1.0 }).sum::<f64>() / n as f64)
        .collect();
    let mut values = vec![Vec::with_capacity(num_periods + 1); dim];
    let mut power = CMatrix::identity(dim, dim);
    for m in 0..=num_periods {
        if m > 0 {
            power = &u.matrix * &power;
        }
        for (i, series) in values.iter_mut().enumerate() {
            let col = power.column(i);
            series.push(col.iter().zip(&weights).map(|(a, w)| w * a.norm_sqr()).sum());
        }
    }
    Ok(values
        .into_iter()
        .map(|values| TimeSeries { values, period: u.period })
        .collect())
}

/// Fidelity of each configuration's spectrum against its reference.
/// `None` where either spectrum vanishes identically.
pub fn fidelity_by_config(reference: &[PowerSpectrum], perturbed: &[PowerSpectrum]) -> Result<Vec<Option<f64>>> {
    if reference.len() != perturbed.len() {
        return Err(Error::DimensionMismatch {
            expected: reference.len(),
            found: perturbed.len(),
        });
    }
    reference
        .iter()
        .zip(perturbed)
        .map(|(a, b)| match spectral_fidelity(a, b) {
            Ok(f) => Ok(Some(f)),
            Err(Error::Degenerate(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries { values, period: 1.0 }
    }

    #[test]
    fn constant_series_peaks_at_zero() {
        let s = power_spectrum(&series(vec![0.7; 9])).unwrap();
        assert!((s.power[0] - 0.49).abs() < 1e-15);
        assert!(s.power[1..].iter().all(|&v| v < 1e-28));
    }

    #[test]
    fn alternating_series_peaks_at_half() {
        let n = 16;
        let s = power_spectrum(&series((0..=n).map(|m| if m % 2 == 0 { 1.0 } else { -1.0 }).collect())).unwrap();
        assert!((s.power[n / 2] - 1.0).abs() < 1e-14);
        for (k, &v) in s.power.iter().enumerate() {
            if k != n / 2 {
                assert!(v < 1e-20, "{k}: {v}");
            }
        }
        assert!((s.omega(n / 2) - PI).abs() < 1e-15);
    }

    #[test]
    fn zero_series_zero_spectrum() {
        let s = power_spectrum(&series(vec![0.0; 5])).unwrap();
        assert!(s.power.iter().all(|&v| v == 0.0));
        assert!(power_spectrum(&series(vec![1.0, 2.0])).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let a = PowerSpectrum {
            power: vec![1.0, 0.0, 2.0],
            num_periods: 3,
            period: 1.0,
        };
        let b = PowerSpectrum {
            power: vec![0.0, 3.0, 0.0],
            ..a.clone()
        };
        assert!((spectral_fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(spectral_fidelity(&a, &b).unwrap(), 0.0);
        let z = PowerSpectrum {
            power: vec![0.0; 3],
            ..a.clone()
        };
        assert!(spectral_fidelity(&a, &z).is_err());
    }

    #[test]
    fn population_formula_basis_states() {
        let n = 3;
        let mut psi = DVector::zeros(8);
        psi[7] = C64::new(1.0, 0.0);
        assert_eq!(magnetization_from_populations(&psi, n), 1.0);
        psi[7] = C64::new(0.0, 0.0);
        psi[0] = C64::new(1.0, 0.0);
        assert_eq!(magnetization_from_populations(&psi, n), -1.0);
    }
}
