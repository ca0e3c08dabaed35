//! Discrete-time-crystal simulation mapped onto configuration-space graphs.
//!
//! The pipeline builds the Floquet operator of a disordered, periodically
//! kicked Ising chain, extracts its effective Hamiltonian, links
//! near-resonant configurations into a percolation graph, and analyses the
//! result: degree statistics with power-law fitting, quasienergy level
//! statistics, magnetization power spectra, quantum-walk participation
//! ratios and the semiclassical fixed points.

pub mod diagnostics;
pub mod ensemble;
pub mod error;
pub mod export;
pub mod floquet;
pub mod graph;
pub mod linalg;
pub mod netfit;
pub mod output;
pub mod semiclassical;
pub mod spin;

pub use nalgebra::Complex;

pub type C64 = nalgebra::Complex<f64>;
pub type CMatrix = nalgebra::DMatrix<C64>;

pub use error::{Error, Result};
pub use export::{export_graph, GraphFormat};
pub use floquet::{
    bch_effective_2t, effective_hamiltonian, floquet_for, floquet_operator, floquet_spectrum, squared_floquet,
    stroboscopic_evolve, EffectiveHamiltonian, FloquetOperator, FloquetSpectrum,
};
pub use graph::{clusters, degree_sequence, percolation_graph, two_level_analysis, ClusterDecomposition, PercolationGraph};
pub use spin::{
    build_drive, pauli_string, sample_disorder, Axis, Configuration, DenseOperator, DisorderRealization,
    SpinChainParams,
};
