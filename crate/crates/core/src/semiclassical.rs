//! Classical limit of the two-period dynamics at zero rotation error:
//! energy surface over polar angles, its second derivatives and the
//! stability of the corner fixed points.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;
use crate::output::ClassicalRow;
use crate::spin::{Configuration, SpinChainParams};

/// Eigenvalues smaller than this in magnitude make a fixed point marginal.
pub const MARGINAL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalConfiguration {
    /// Polar angles in `[0, π]`, one per site.
    pub thetas: Vec<f64>,
}

impl ClassicalConfiguration {
    pub fn new(thetas: Vec<f64>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::InvalidParameter("no sites".into()));
        }
        if let Some(bad) = thetas.iter().find(|t| !(0.0..=PI).contains(*t)) {
            return Err(Error::InvalidParameter(format!("angle {bad} outside [0, π]")));
        }
        Ok(Self { thetas })
    }

    /// Up spins sit at `θ = 0`, down spins at `θ = π`.
    pub fn from_configuration(c: Configuration) -> Self {
        let thetas = (1..=c.n()).map(|site| if c.is_up(site) { 0.0 } else { PI }).collect();
        Self { thetas }
    }

    pub fn n(&self) -> usize {
        self.thetas.len()
    }

    /// Whether every angle is exactly 0 or π.
    pub fn is_fixed_point(&self) -> bool {
        self.thetas.iter().all(|&t| t == 0.0 || t == PI)
    }

    /// `0`/`1` string with `1` for `θ = 0`; empty for non-corner points.
    pub fn bits(&self) -> String {
        if !self.is_fixed_point() {
            return String::new();
        }
        self.thetas.iter().map(|&t| if t == 0.0 { '1' } else { '0' }).collect()
    }
}

fn check_sites(config: &ClassicalConfiguration, params: &SpinChainParams) -> Result<()> {
    if config.n() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            found: config.n(),
        });
    }
    Ok(())
}

/// `sin_cos` with exact values at the corner angles 0 and π.
fn exact_sin_cos(t: f64) -> (f64, f64) {
    if t == 0.0 {
        (0.0, 1.0)
    } else if t == PI {
        (0.0, -1.0)
    } else {
        t.sin_cos()
    }
}

/// `(T2/T) Σ_{l<m} J_lm cos θ_l cos θ_m`.
pub fn classical_energy(config: &ClassicalConfiguration, params: &SpinChainParams) -> Result<f64> {
    check_sites(config, params)?;
    let cos: Vec<f64> = config.thetas.iter().map(|&t| exact_sin_cos(t).1).collect();
    let mut e = 0.0;
    for l in 0..cos.len() {
        for m in (l + 1)..cos.len() {
            e += params.coupling(l + 1, m + 1) * cos[l] * cos[m];
        }
    }
    Ok(params.t2 / params.period() * e)
}

/// Second-derivative matrix with `𝓙_ii = −Σ_m J_im cos θ_i cos θ_m` and
/// `𝓙_ij = J_ij sin θ_i sin θ_j`. Equal to the Hessian of
/// [`classical_energy`] scaled by `T/T2`.
pub fn jacobian(config: &ClassicalConfiguration, params: &SpinChainParams) -> Result<DMatrix<f64>> {
    check_sites(config, params)?;
    let n = config.n();
    let (sin, cos): (Vec<f64>, Vec<f64>) = config.thetas.iter().map(|&t| exact_sin_cos(t)).unzip();
    let mut j = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let coupling = params.coupling(a + 1, b + 1);
            j[(a, a)] -= coupling * cos[a] * cos[b];
            j[(a, b)] = coupling * sin[a] * sin[b];
        }
    }
    Ok(j)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    /// All eigenvalues share one sign.
    Stable,
    UnstableSaddle,
    Marginal,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::UnstableSaddle => "unstable_saddle",
            Stability::Marginal => "marginal",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub jacobian: DMatrix<f64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub classification: Stability,
}

pub fn classify_fixed_point(j: &DMatrix<f64>) -> Result<StabilityReport> {
    if !j.is_square() {
        return Err(Error::DimensionMismatch {
            expected: j.nrows(),
            found: j.ncols(),
        });
    }
    let eigenvalues = symmetric_eigenvalues(j);
    let classification = if eigenvalues.iter().any(|l| l.abs() < MARGINAL_TOLERANCE) {
        Stability::Marginal
    } else if eigenvalues.iter().all(|&l| l < 0.0) || eigenvalues.iter().all(|&l| l > 0.0) {
        Stability::Stable
    } else {
        Stability::UnstableSaddle
    };
    Ok(StabilityReport {
        jacobian: j.clone(),
        eigenvalues,
        classification,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPoint {
    pub configuration: Configuration,
    pub energy: f64,
    pub report: StabilityReport,
}

impl FixedPoint {
    pub fn row(&self) -> ClassicalRow {
        ClassicalRow {
            bits: self.configuration.label(),
            energy: self.energy,
            min_eigenvalue: self.report.eigenvalues.first().copied().unwrap_or(f64::NAN),
            max_eigenvalue: self.report.eigenvalues.last().copied().unwrap_or(f64::NAN),
            classification: self.report.classification.to_string(),
        }
    }
}

/// Energy and stability of all `2^n` corner configurations.
pub fn fixed_point_sweep(params: &SpinChainParams) -> Result<Vec<FixedPoint>> {
    params.validate()?;
    (0..params.dim())
        .map(|index| {
            let configuration = Configuration::new(index, params.n)?;
            let point = ClassicalConfiguration::from_configuration(configuration);
            Ok(FixedPoint {
                configuration,
                energy: classical_energy(&point, params)?,
                report: classify_fixed_point(&jacobian(&point, params)?)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize) -> SpinChainParams {
        SpinChainParams::new(n, 0.0).unwrap()
    }

    fn angles(t: &[f64]) -> ClassicalConfiguration {
        ClassicalConfiguration::new(t.to_vec()).unwrap()
    }

    #[test]
    fn two_site_energies() {
        let p = params(2);
        assert!((classical_energy(&angles(&[0.0, 0.0]), &p).unwrap() - 0.03).abs() < 1e-15);
        assert!((classical_energy(&angles(&[0.0, PI]), &p).unwrap() + 0.03).abs() < 1e-15);
        assert!(classical_energy(&angles(&[PI / 2.0; 2]), &p).unwrap().abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_angles() {
        assert!(ClassicalConfiguration::new(vec![0.0, 4.0]).is_err());
        assert!(classical_energy(&angles(&[0.0; 3]), &params(2)).is_err());
    }

    #[test]
    fn all_up_jacobian() {
        let p = params(4);
        let j = jacobian(&angles(&[0.0; 4]), &p).unwrap();
        let expected = -(p.coupling(1, 2) + p.coupling(1, 3) + p.coupling(1, 4));
        assert!((j[(0, 0)] - expected).abs() < 1e-15);
        assert!((j[(0, 0)] + 0.09245).abs() < 1e-4);
        assert!(j.iter().enumerate().all(|(k, &v)| k % 5 == 0 || v == 0.0));
    }

    #[test]
    fn classification_examples() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, -1.0, -1.0]));
        assert_eq!(classify_fixed_point(&d).unwrap().classification, Stability::Stable);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 1.0]));
        assert_eq!(classify_fixed_point(&d).unwrap().classification, Stability::UnstableSaddle);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 0.0]));
        assert_eq!(classify_fixed_point(&d).unwrap().classification, Stability::Marginal);
    }

    #[test]
    fn domain_pair_diagonal() {
        let p = params(4);
        let j = jacobian(&angles(&[0.0, 0.0, PI, PI]), &p).unwrap();
        let c = |a, b| p.coupling(a, b);
        assert!((j[(0, 0)] - (-c(1, 2) + c(1, 3) + c(1, 4))).abs() < 1e-15);
        assert!((j[(1, 1)] - (-c(1, 2) + c(2, 3) + c(2, 4))).abs() < 1e-15);
        assert!((j[(2, 2)] - (c(1, 3) + c(2, 3) - c(3, 4))).abs() < 1e-15);
        assert!((j[(3, 3)] - (c(1, 4) + c(2, 4) - c(3, 4))).abs() < 1e-15);
        // Equal nearest-neighbour couplings leave the inner sites with positive curvature.
        assert!(j[(1, 1)] > 0.0 && j[(0, 0)] < 0.0);
        let r = classify_fixed_point(&j).unwrap();
        assert_eq!(r.classification, Stability::UnstableSaddle);
    }

    #[test]
    fn sweep_covers_all_corners() {
        let sweep = fixed_point_sweep(&params(3)).unwrap();
        assert_eq!(sweep.len(), 8);
        assert_eq!(sweep[7].row().bits, "111");
        let point = ClassicalConfiguration::from_configuration(sweep[6].configuration);
        assert_eq!(point.bits(), "110");
        assert!(point.is_fixed_point());
    }
}
