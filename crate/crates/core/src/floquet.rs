//! Floquet operators, quasienergy spectra and effective Hamiltonians.

use std::collections::hash_map::DefaultHasher;
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{
    self, eigen_residual, hermiticity_defect, max_abs_diff, spectral_sum, symmetrize, unitarity_defect,
};
use crate::spin::{ising_energies, Axis, Configuration, DenseOperator, DisorderRealization, SpinChainParams};
use crate::{CMatrix, C64};

/// Unitarity tolerance for Floquet operators.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;
/// Eigenpair residual tolerance for Floquet spectra.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Eigenphases closer than this to the branch cut at ±π are flagged.
pub const BRANCH_MARGIN: f64 = 1e-10;

/// One-period (or two-period) propagator of the driven chain.
#[derive(Clone, Debug)]
pub struct FloquetOperator {
    pub matrix: CMatrix,
    pub period: f64,
    /// Hash of the parameters and fields the operator was built from.
    pub provenance: String,
}

impl FloquetOperator {
    /// Wraps an arbitrary unitary, checking unitarity.
    pub fn from_matrix(matrix: CMatrix, period: f64) -> Result<Self> {
        if !(period > 0.0) {
            return Err(Error::InvalidParameter(format!("period must be positive, got {period}")));
        }
        let defect = unitarity_defect(&matrix);
        if defect > UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self {
            matrix,
            period,
            provenance: String::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Site count, recovered from the dimension.
    pub fn n(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }
}

pub(crate) fn provenance_tag(params: &SpinChainParams, fields: &[f64]) -> String {
    let mut hasher = DefaultHasher::new();
    params.n.hash(&mut hasher);
    for x in [params.j0, params.alpha, params.disorder_w, params.epsilon, params.t1, params.t2]
        .iter()
        .chain(fields)
    {
        x.to_bits().hash(&mut hasher);
    }
    format!("{:016x}", hasher.finish())
}

/// `U = exp(−i·H2·T2)·exp(−i·H1·T1)`.
///
/// When `H1` is a uniform transverse field `a·Σσ^x` its exponential is the
/// tensor product of single-spin rotations, and a diagonal `H2` exponentiates
/// to a phase map. Other inputs fall back to Hermitian eigendecomposition.
pub fn floquet_operator(h1: &DenseOperator, h2: &DenseOperator, params: &SpinChainParams) -> Result<FloquetOperator> {
    params.validate()?;
    let dim = params.dim();
    for op in [h1, h2] {
        if op.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: op.dim(),
            });
        }
        let defect = hermiticity_defect(&op.matrix);
        if defect > 1e-12 {
            return Err(Error::InvalidParameter(format!("drive term is not Hermitian (defect {defect:e})")));
        }
    }

    let pulse = match transverse_amplitude(h1, params.n) {
        Some(amplitude) => transverse_rotation(params, amplitude),
        None => linalg::hermitian_propagator(&h1.matrix, params.t1),
    };

    let matrix = if h2.is_diagonal() {
        let mut m = pulse;
        for i in 0..dim {
            let phase = C64::from_polar(1.0, -h2.matrix[(i, i)].re * params.t2);
            let mut row = m.row_mut(i);
            row *= phase;
        }
        m
    } else {
        linalg::hermitian_propagator(&h2.matrix, params.t2) * pulse
    };

    let fields: Vec<f64> = (0..dim).map(|i| h2.matrix[(i, i)].re).collect();
    let mut op = FloquetOperator::from_matrix(matrix, params.period())?;
    op.provenance = provenance_tag(params, &fields);
    Ok(op)
}

/// `a` if `h1 == a·Σ_l σ^x_l`, otherwise `None`.
fn transverse_amplitude(h1: &DenseOperator, n: usize) -> Option<f64> {
    let dim = h1.dim();
    let a = h1.matrix[(0, 1)].re;
    for col in 0..dim {
        for row in 0..dim {
            let flips = (row ^ col).count_ones();
            let expected = if flips == 1 { a } else { 0.0 };
            if (h1.matrix[(row, col)] - C64::new(expected, 0.0)).norm() > 1e-14 * a.abs().max(1.0) {
                return None;
            }
        }
    }
    debug_assert!(n >= 1);
    Some(a)
}

/// `⊗_l exp(−i·a·T1·σ^x)`.
///
/// The angle is written relative to the ideal π pulse so that `ε = 0`
/// produces an exact global spin flip with no rounding residue.
fn transverse_rotation(params: &SpinChainParams, amplitude: f64) -> CMatrix {
    let dim = params.dim();
    // a = g(1 − δ) ⇒ a·T1 = π/2 − (π/2)·δ
    let delta = 1.0 - amplitude / params.g();
    let half_error = 0.5 * PI * delta;
    let (c, s) = (half_error.sin(), half_error.cos());
    let n = params.n;

    // entry = c^(n−d)·(−i·s)^d with d the Hamming distance
    let mut by_distance = Vec::with_capacity(n + 1);
    for d in 0..=n {
        let mag = c.powi((n - d) as i32) * s.powi(d as i32);
        let phase = match d % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, -1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, 1.0),
        };
        by_distance.push(phase * mag);
    }
    CMatrix::from_fn(dim, dim, |i, j| by_distance[(i ^ j).count_ones() as usize])
}

/// `exp(−i·t·Σ_{l<m} J_lm σ^z_l σ^z_m)` as a dense diagonal matrix.
pub fn ising_propagator(params: &SpinChainParams, t: f64) -> CMatrix {
    let phases: Vec<C64> = ising_energies(params)
        .into_iter()
        .map(|e| C64::from_polar(1.0, -e * t))
        .collect();
    CMatrix::from_diagonal(&DVector::from_vec(phases))
}

/// Quasienergies and Floquet states of a unitary.
#[derive(Clone, Debug)]
pub struct FloquetSpectrum {
    /// `λ_s ∈ (−π/period, π/period]`.
    pub quasienergies: Vec<f64>,
    /// Columns are the orthonormal Floquet states `|Φ_s⟩`.
    pub states: CMatrix,
    pub period: f64,
    /// Indices of eigenphases within [`BRANCH_MARGIN`] of the branch cut.
    pub branch_warnings: Vec<usize>,
}

impl FloquetSpectrum {
    pub fn len(&self) -> usize {
        self.quasienergies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quasienergies.is_empty()
    }

    /// Eigenvalues `e^{−iλ_s·period}` on the unit circle.
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.quasienergies
            .iter()
            .map(|&lam| C64::from_polar(1.0, -lam * self.period))
            .collect()
    }
}

/// Diagonalizes a Floquet operator and maps eigenphases to quasienergies.
pub fn floquet_spectrum(u: &FloquetOperator) -> Result<FloquetSpectrum> {
    let defect = unitarity_defect(&u.matrix);
    if defect > UNITARITY_TOLERANCE {
        return Err(Error::NotUnitary(defect));
    }
    let (values, states) = linalg::unitary_eigen(&u.matrix)?;

    let mut branch_warnings = Vec::new();
    let quasienergies: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(k, mu)| {
            // −arg(μ) taken in (−π, π]
            let mut theta = -mu.im.atan2(mu.re);
            if theta <= -PI {
                theta += 2.0 * PI;
            }
            if PI - theta.abs() < BRANCH_MARGIN {
                branch_warnings.push(k);
            }
            theta / u.period
        })
        .collect();

    let spectrum = FloquetSpectrum {
        quasienergies,
        states,
        period: u.period,
        branch_warnings,
    };
    let residual = eigen_residual(&u.matrix, &spectrum.eigenvalues(), &spectrum.states);
    if residual > RESIDUAL_TOLERANCE {
        return Err(Error::Eigen(format!("eigenpair residual {residual:e} exceeds tolerance")));
    }
    Ok(spectrum)
}

/// Time-independent generator of the stroboscopic dynamics in the
/// configuration basis. Diagonal entries are on-site energies `E_i`,
/// off-diagonal entries the couplings `K_ij`.
#[derive(Clone, Debug)]
pub struct EffectiveHamiltonian {
    pub matrix: CMatrix,
    pub period: f64,
}

impl EffectiveHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn onsite(&self, i: usize) -> f64 {
        self.matrix[(i, i)].re
    }

    pub fn coupling(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    /// `exp(−i·H·period)`, computed from a fresh Hermitian eigendecomposition.
    pub fn propagator(&self) -> CMatrix {
        linalg::hermitian_propagator(&self.matrix, self.period)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    /// `‖exp(−i·H·period) − U‖_max`.
    pub fn reconstruction_error(&self, u: &FloquetOperator) -> f64 {
        max_abs_diff(&self.propagator(), &u.matrix)
    }

    /// Adds `c·I`.
    pub fn shifted(&self, c: f64) -> Self {
        let dim = self.dim();
        Self {
            matrix: &self.matrix + CMatrix::identity(dim, dim) * C64::new(c, 0.0),
            period: self.period,
        }
    }
}

/// `H_eff = Σ_s λ_s |Φ_s⟩⟨Φ_s|`, the principal-branch `(i/T)·log U`.
pub fn effective_hamiltonian(spectrum: &FloquetSpectrum) -> EffectiveHamiltonian {
    let lambdas: Vec<C64> = spectrum.quasienergies.iter().map(|&l| C64::new(l, 0.0)).collect();
    let mut matrix = spectral_sum(&spectrum.states, &lambdas);
    symmetrize(&mut matrix);
    EffectiveHamiltonian {
        matrix,
        period: spectrum.period,
    }
}

/// `U²` with the period doubled.
pub fn squared_floquet(u: &FloquetOperator) -> FloquetOperator {
    FloquetOperator {
        matrix: &u.matrix * &u.matrix,
        period: 2.0 * u.period,
        provenance: u.provenance.clone(),
    }
}

/// First-order Baker–Campbell–Hausdorff effective Hamiltonian over two
/// periods:
///
/// `(T2/T)·Σ_{l<m} J_lm σ^z_l σ^z_m − (g·ε·T1 / 2T)·Σ_l [(cos(2·B_l·T2) + 1)·σ^x_l + sin(2·B_l·T2)·σ^y_l]`
pub fn bch_effective_2t(params: &SpinChainParams, disorder: &DisorderRealization) -> Result<EffectiveHamiltonian> {
    params.validate()?;
    if disorder.n() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            found: disorder.n(),
        });
    }
    let n = params.n;
    let dim = params.dim();
    let period = params.period();
    let ising_scale = params.t2 / period;
    let mut matrix = CMatrix::zeros(dim, dim);
    for (i, e) in ising_energies(params).into_iter().enumerate() {
        matrix[(i, i)] = C64::new(ising_scale * e, 0.0);
    }

    let transverse = params.g() * params.epsilon * params.t1 / (2.0 * period);
    if transverse != 0.0 {
        for (k, &b) in disorder.fields.iter().enumerate() {
            let angle = 2.0 * b * params.t2;
            let cx = -transverse * (angle.cos() + 1.0);
            let cy = -transverse * angle.sin();
            let x = crate::spin::pauli_string(&[(k + 1, Axis::X)], n)?;
            let y = crate::spin::pauli_string(&[(k + 1, Axis::Y)], n)?;
            matrix += x.matrix * C64::new(cx, 0.0) + y.matrix * C64::new(cy, 0.0);
        }
    }
    Ok(EffectiveHamiltonian {
        matrix,
        period: 2.0 * period,
    })
}

/// `ψ(0), ψ(T), …, ψ(N·T)` by repeated application of `U`.
pub fn stroboscopic_evolve(u: &FloquetOperator, initial: Configuration, num_periods: usize) -> Result<Vec<DVector<C64>>> {
    if initial.n() != u.n() {
        return Err(Error::DimensionMismatch {
            expected: u.n(),
            found: initial.n(),
        });
    }
    let mut state = DVector::zeros(u.dim());
    state[initial.index()] = C64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(num_periods + 1);
    out.push(state.clone());
    for _ in 0..num_periods {
        state = &u.matrix * &state;
        out.push(state.clone());
    }
    Ok(out)
}

/// Convenience pipeline: drive → Floquet operator for one realization.
pub fn floquet_for(params: &SpinChainParams, disorder: &DisorderRealization) -> Result<FloquetOperator> {
    let (h1, h2) = crate::spin::build_drive(params, disorder)?;
    floquet_operator(&h1, &h2, params)
}
