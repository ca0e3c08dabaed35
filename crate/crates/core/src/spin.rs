//! Configuration-space primitives for an open spin-1/2 chain.
//!
//! Basis states are indexed by integers `0..2^n`. Site 1 is the most
//! significant bit of the index; a set bit is spin up (`σ^z = +1`), a clear
//! bit is spin down.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{CMatrix, C64};

/// Largest chain handled by the dense pipeline.
pub const MAX_SITES: usize = 14;

/// Drive and disorder parameters of the two-step Floquet protocol.
///
/// Units take `ħ = 1`; the defaults set `T2 = 1`, so `j0` and `disorder_w`
/// are the products `J0·T2` and `W·T2`. The chain is always open.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpinChainParams {
    pub n: usize,
    pub j0: f64,
    pub alpha: f64,
    pub disorder_w: f64,
    pub epsilon: f64,
    pub t1: f64,
    pub t2: f64,
}

impl Default for SpinChainParams {
    fn default() -> Self {
        Self {
            n: 8,
            j0: 0.06,
            alpha: 1.51,
            disorder_w: PI,
            epsilon: 0.0,
            t1: 1.0,
            t2: 1.0,
        }
    }
}

impl SpinChainParams {
    pub fn new(n: usize, epsilon: f64) -> Result<Self> {
        let params = Self {
            n,
            epsilon,
            ..Self::default()
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self {
            epsilon,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.n > MAX_SITES {
            return bad(format!("n = {} exceeds the dense limit {MAX_SITES}", self.n));
        }
        if !(self.t1 > 0.0 && self.t1.is_finite()) {
            return bad(format!("t1 must be positive, got {}", self.t1));
        }
        if !(self.t2 > 0.0 && self.t2.is_finite()) {
            return bad(format!("t2 must be positive, got {}", self.t2));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.disorder_w >= 0.0 && self.disorder_w.is_finite()) {
            return bad(format!("disorder strength must be non-negative, got {}", self.disorder_w));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be non-negative, got {}", self.epsilon));
        }
        if !self.j0.is_finite() {
            return bad(format!("j0 must be finite, got {}", self.j0));
        }
        Ok(())
    }

    /// Pulse amplitude fixed by the π-pulse condition `2·g·T1 = π`.
    pub fn g(&self) -> f64 {
        PI / (2.0 * self.t1)
    }

    /// Drive period `T = T1 + T2`.
    pub fn period(&self) -> f64 {
        self.t1 + self.t2
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Ising coupling `J0 / |l - m|^α` between 1-based sites.
    pub fn coupling(&self, l: usize, m: usize) -> f64 {
        debug_assert!(l != m);
        self.j0 / (l.abs_diff(m) as f64).powf(self.alpha)
    }
}

/// A computational-basis product state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration {
    index: usize,
    n: usize,
}

impl Configuration {
    pub fn new(index: usize, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_SITES {
            return Err(Error::InvalidParameter(format!("site count {n} out of range")));
        }
        if index >= 1 << n {
            return Err(Error::InvalidParameter(format!(
                "configuration index {index} out of range for n = {n}"
            )));
        }
        Ok(Self { index, n })
    }

    /// All spins up, `|2^n - 1⟩`.
    pub fn all_up(n: usize) -> Self {
        Self {
            index: (1 << n) - 1,
            n,
        }
    }

    pub fn all_down(n: usize) -> Self {
        Self { index: 0, n }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Whether 1-based `site` is spin up.
    pub fn is_up(&self, site: usize) -> bool {
        site_bit(self.index, site, self.n)
    }

    /// `σ^z` eigenvalue (+1 or -1) of 1-based `site`.
    pub fn spin(&self, site: usize) -> f64 {
        if self.is_up(site) {
            1.0
        } else {
            -1.0
        }
    }

    /// Number of adjacent site pairs with opposite spins.
    pub fn domain_walls(&self) -> usize {
        domain_walls(self.index, self.n)
    }

    /// Image under the global spin flip `Π_l σ^x_l`.
    pub fn parity_partner(&self) -> Self {
        Self {
            index: (1 << self.n) - 1 - self.index,
            n: self.n,
        }
    }

    /// Binary label, site 1 first.
    pub fn label(&self) -> String {
        format!("{:0width$b}", self.index, width = self.n)
    }

    pub fn up_count(&self) -> usize {
        self.index.count_ones() as usize
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}⟩", self.label())
    }
}

pub(crate) fn site_bit(index: usize, site: usize, n: usize) -> bool {
    (index >> (n - site)) & 1 == 1
}

/// Adjacent unequal bits of `index` on an open chain of `n` sites.
pub fn domain_walls(index: usize, n: usize) -> usize {
    if n < 2 {
        return 0;
    }
    let mask = (1usize << (n - 1)) - 1;
    ((index ^ (index >> 1)) & mask).count_ones() as usize
}

/// Per-site random longitudinal fields for one disorder realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderRealization {
    pub fields: Vec<f64>,
    pub seed: u64,
    pub realization_index: u64,
}

impl DisorderRealization {
    /// A realization with all fields zero.
    pub fn clean(n: usize) -> Self {
        Self {
            fields: vec![0.0; n],
            seed: 0,
            realization_index: 0,
        }
    }

    pub fn from_fields(fields: Vec<f64>) -> Self {
        Self {
            fields,
            seed: 0,
            realization_index: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.fields.len()
    }
}

/// Draws `B_l` uniformly on `[0, W]`.
///
/// The generator is a ChaCha stream keyed by `seed` with the realization
/// index selecting the stream, so every realization is independent and
/// reproducible regardless of evaluation order.
pub fn sample_disorder(params: &SpinChainParams, seed: u64, realization_index: u64) -> DisorderRealization {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(realization_index);
    let fields = (0..params.n)
        .map(|_| params.disorder_w * rng.random::<f64>())
        .collect();
    DisorderRealization {
        fields,
        seed,
        realization_index,
    }
}

/// A dense operator on the `2^n`-dimensional chain Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    pub matrix: CMatrix,
    pub n: usize,
    pub hermitian: bool,
}

impl DenseOperator {
    pub fn zeros(n: usize) -> Self {
        let dim = 1 << n;
        Self {
            matrix: CMatrix::zeros(dim, dim),
            n,
            hermitian: true,
        }
    }

    pub fn identity(n: usize) -> Self {
        let dim = 1 << n;
        Self {
            matrix: CMatrix::identity(dim, dim),
            n,
            hermitian: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Diagonal operator with the given real entries.
    pub fn diagonal(n: usize, entries: &[f64]) -> Self {
        let diag = DVector::from_iterator(entries.len(), entries.iter().map(|&e| C64::new(e, 0.0)));
        Self {
            matrix: DMatrix::from_diagonal(&diag),
            n,
            hermitian: true,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        let m = &self.matrix;
        (0..m.ncols()).all(|j| (0..m.nrows()).all(|i| i == j || m[(i, j)] == C64::new(0.0, 0.0)))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: &self.matrix * C64::new(factor, 0.0),
            n: self.n,
            hermitian: self.hermitian,
        }
    }
}

/// Single-site Pauli axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Tensor product of Pauli matrices on the listed 1-based sites, identity
/// elsewhere.
pub fn pauli_string(axes: &[(usize, Axis)], n: usize) -> Result<DenseOperator> {
    if n == 0 || n > MAX_SITES {
        return Err(Error::InvalidParameter(format!("site count {n} out of range")));
    }
    let mut seen = 0usize;
    for &(site, _) in axes {
        if site == 0 || site > n {
            return Err(Error::SiteOutOfRange { site, n });
        }
        let bit = 1 << (n - site);
        if seen & bit != 0 {
            return Err(Error::DuplicateSite(site));
        }
        seen |= bit;
    }

    let dim = 1usize << n;
    let mut matrix = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let (row, phase) = apply_pauli_string(axes, n, col);
        matrix[(row, col)] = phase;
    }
    Ok(DenseOperator {
        matrix,
        n,
        hermitian: true,
    })
}

/// Image `phase·|row⟩` of the basis state `|col⟩`.
fn apply_pauli_string(axes: &[(usize, Axis)], n: usize, col: usize) -> (usize, C64) {
    let mut row = col;
    let mut phase = C64::new(1.0, 0.0);
    for &(site, axis) in axes {
        let bit = 1 << (n - site);
        let up = col & bit != 0;
        match axis {
            Axis::X => row ^= bit,
            Axis::Y => {
                row ^= bit;
                // σ^y|↑⟩ = i|↓⟩, σ^y|↓⟩ = -i|↑⟩
                phase *= if up { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) };
            }
            Axis::Z => {
                if !up {
                    phase = -phase;
                }
            }
        }
    }
    (row, phase)
}

/// Domain-wall operator `N̂ = Σ_l (1 - σ^z_l σ^z_{l+1})`.
pub fn domain_wall_operator(n: usize) -> Result<DenseOperator> {
    let dim = 1usize << n;
    let mut total = CMatrix::zeros(dim, dim);
    for l in 1..n {
        let zz = pauli_string(&[(l, Axis::Z), (l + 1, Axis::Z)], n)?;
        total += CMatrix::identity(dim, dim) - zz.matrix;
    }
    Ok(DenseOperator {
        matrix: total,
        n,
        hermitian: true,
    })
}

/// Global parity `Π̂ = Π_l σ^x_l`.
pub fn parity_operator(n: usize) -> Result<DenseOperator> {
    let axes: Vec<_> = (1..=n).map(|l| (l, Axis::X)).collect();
    pauli_string(&axes, n)
}

/// Diagonal of `Σ_{l<m} J_lm σ^z_l σ^z_m` in the configuration basis.
pub fn ising_energies(params: &SpinChainParams) -> Vec<f64> {
    let n = params.n;
    let pairs: Vec<(usize, usize, f64)> = (1..=n)
        .flat_map(|l| ((l + 1)..=n).map(move |m| (l, m)))
        .map(|(l, m)| (l, m, params.coupling(l, m)))
        .collect();
    (0..params.dim())
        .map(|i| {
            pairs
                .iter()
                .map(|&(l, m, j)| if site_bit(i, l, n) == site_bit(i, m, n) { j } else { -j })
                .sum()
        })
        .collect()
}

/// Diagonal of `Σ_l B_l σ^z_l`.
pub fn field_energies(n: usize, fields: &[f64]) -> Vec<f64> {
    (0..1usize << n)
        .map(|i| {
            fields
                .iter()
                .enumerate()
                .map(|(k, &b)| if site_bit(i, k + 1, n) { b } else { -b })
                .sum()
        })
        .collect()
}

/// The two pieces of the drive: the transverse pulse `H1 = g(1-ε)Σσ^x` and
/// the diagonal interaction-plus-disorder `H2`.
pub fn build_drive(params: &SpinChainParams, disorder: &DisorderRealization) -> Result<(DenseOperator, DenseOperator)> {
    params.validate()?;
    if disorder.n() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            found: disorder.n(),
        });
    }
    let n = params.n;
    let amplitude = params.g() * (1.0 - params.epsilon);
    let dim = params.dim();

    let mut h1 = CMatrix::zeros(dim, dim);
    if amplitude != 0.0 {
        for col in 0..dim {
            for site in 1..=n {
                h1[(col ^ (1 << (n - site)), col)] = C64::new(amplitude, 0.0);
            }
        }
    }

    let h2: Vec<f64> = ising_energies(params)
        .into_iter()
        .zip(field_energies(n, &disorder.fields))
        .map(|(a, b)| a + b)
        .collect();

    Ok((
        DenseOperator {
            matrix: h1,
            n,
            hermitian: true,
        },
        DenseOperator::diagonal(n, &h2),
    ))
}
