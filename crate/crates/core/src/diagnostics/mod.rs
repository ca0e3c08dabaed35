//! Level statistics, magnetization spectra and quantum-walk diagnostics.

pub mod levels;
pub mod spectrum;
pub mod walk;

pub use levels::{
    gap_ratios, mean_gap_ratio, ratio_histogram, reference_mean, reference_normalization, reference_pdf,
    GapRatioSample, ReferenceKind,
};
pub use spectrum::{
    all_magnetization_series, fidelity_by_config, magnetization_series, power_spectrum, spectral_fidelity,
    PowerSpectrum, TimeSeries,
};
pub use walk::{participation_ratio, pr_distribution, tunneling_periods, walk_populations, WalkRecord};
