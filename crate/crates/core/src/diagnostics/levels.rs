//! Quasienergy gap-ratio statistics and their reference densities.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::output::GapRatioRow;

/// Gaps below this are treated as exact degeneracies and skipped.
pub const DEGENERATE_GAP: f64 = 1e-12;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GapRatioSample {
    /// Every entry lies in `[0, 1]`.
    pub ratios: Vec<f64>,
    pub excluded_degenerate: usize,
    /// Number of spectra pooled into this sample.
    pub spectra: usize,
}

impl GapRatioSample {
    /// Pools another sample into this one.
    pub fn extend(&mut self, other: &GapRatioSample) {
        self.ratios.extend_from_slice(&other.ratios);
        self.excluded_degenerate += other.excluded_degenerate;
        self.spectra += other.spectra;
    }

    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }
}

/// Ratios `min(δ_s, δ_{s+1}) / max(δ_s, δ_{s+1})` of consecutive gaps of the
/// sorted spectrum. Pairs touching a degenerate gap are dropped; the number
/// of degenerate gaps is recorded.
pub fn gap_ratios(levels: &[f64]) -> Result<GapRatioSample> {
    if levels.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "gap ratios need at least 3 levels, got {}",
            levels.len()
        )));
    }
    let mut sorted = levels.to_vec();
    sorted.sort_by(f64::total_cmp);
    let gaps: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    let excluded_degenerate = gaps.iter().filter(|&&d| d < DEGENERATE_GAP).count();
    let ratios = gaps
        .windows(2)
        .filter(|w| w[0] >= DEGENERATE_GAP && w[1] >= DEGENERATE_GAP)
        .map(|w| w[0].min(w[1]) / w[0].max(w[1]))
        .collect();
    Ok(GapRatioSample {
        ratios,
        excluded_degenerate,
        spectra: 1,
    })
}

pub fn mean_gap_ratio(sample: &GapRatioSample) -> Result<f64> {
    if sample.ratios.is_empty() {
        return Err(Error::InsufficientData("empty gap-ratio sample".into()));
    }
    Ok(sample.ratios.iter().sum::<f64>() / sample.ratios.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    Poisson,
    Goe,
    /// Normalized circular-orthogonal surmise.
    Coe,
    /// A commonly quoted variant of the circular-orthogonal expression
    /// that is not normalizable on `[0, 1]`.
    CoeUncorrected,
}

impl FromStr for ReferenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "poisson" => Ok(Self::Poisson),
            "goe" => Ok(Self::Goe),
            "coe" => Ok(Self::Coe),
            "coe-uncorrected" => Ok(Self::CoeUncorrected),
            other => Err(Error::InvalidParameter(format!("unknown reference density `{other}`"))),
        }
    }
}

impl fmt::Display for ReferenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Poisson => "poisson",
            Self::Goe => "goe",
            Self::Coe => "coe",
            Self::CoeUncorrected => "coe-uncorrected",
        })
    }
}

fn coe(r: f64) -> f64 {
    if r < 1e-3 {
        let pi2 = PI * PI;
        let c1 = -4.0 / 3.0 + 8.0 * pi2 / 9.0;
        let c2 = 2.0 - 4.0 * pi2 / 3.0;
        let c3 = -16.0 * pi2 * pi2 / 45.0 - 8.0 / 3.0 + 16.0 * pi2 / 9.0;
        return r * (c1 + r * (c2 + r * c3));
    }
    let s = 1.0 + r;
    (2.0 / 3.0)
        * (1.0 / (s * s) + (2.0 * PI * r / s).sin() * (1.0 - r * r) / (2.0 * PI * r * r)
            - (2.0 * PI / s).cos() / r)
}

fn coe_uncorrected(r: f64) -> f64 {
    let s = 1.0 + r;
    (2.0 / 3.0) * ((2.0 * PI * r / s).sin() / (2.0 * PI * r * r) + 1.0 / (s * s) + (2.0 * PI / s).sin() / (2.0 * PI))
}

/// Reference gap-ratio density at `r ∈ [0, 1]`.
pub fn reference_pdf(kind: ReferenceKind, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!("ratio {r} outside [0, 1]")));
    }
    Ok(match kind {
        ReferenceKind::Poisson => 2.0 / (1.0 + r).powi(2),
        ReferenceKind::Goe => 6.75 * (r + r * r) / (1.0 + r + r * r).powf(2.5),
        ReferenceKind::Coe => coe(r),
        ReferenceKind::CoeUncorrected => {
            if r == 0.0 {
                f64::INFINITY
            } else {
                coe_uncorrected(r)
            }
        }
    })
}

fn integrate(kind: ReferenceKind, weight: impl Fn(f64) -> f64) -> f64 {
    let f = |r: f64| reference_pdf(kind, r).map(|p| p * weight(r)).unwrap_or(0.0);
    match kind {
        // The log divergence at r = 0 is integrated from a small cutoff so
        // the reported value stays finite.
        ReferenceKind::CoeUncorrected => quadrature::integrate(f, 1e-12, 1.0, 1e-12).integral,
        _ => quadrature::integrate(f, 0.0, 1.0, 1e-12).integral,
    }
}

/// `∫₀¹ P(r) dr` by double-exponential quadrature.
pub fn reference_normalization(kind: ReferenceKind) -> f64 {
    integrate(kind, |_| 1.0)
}

/// `∫₀¹ r·P(r) dr`.
pub fn reference_mean(kind: ReferenceKind) -> f64 {
    integrate(kind, |r| r)
}

/// Histogram of ratios on `bins` equal bins with reference overlays
/// evaluated at bin centres.
pub fn ratio_histogram(sample: &GapRatioSample, bins: usize) -> Result<Vec<GapRatioRow>> {
    if bins == 0 {
        return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
    }
    if sample.ratios.is_empty() {
        return Err(Error::InsufficientData("empty gap-ratio sample".into()));
    }
    let width = 1.0 / bins as f64;
    let mut counts = vec![0usize; bins];
    for &r in &sample.ratios {
        counts[((r / width) as usize).min(bins - 1)] += 1;
    }
    let total = sample.ratios.len() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(b, &c)| {
            let lo = b as f64 * width;
            let centre = lo + 0.5 * width;
            Ok(GapRatioRow {
                r_lo: lo,
                r_hi: lo + width,
                density: c as f64 / (total * width),
                reference_poisson: reference_pdf(ReferenceKind::Poisson, centre)?,
                reference_coe: reference_pdf(ReferenceKind::Coe, centre)?,
            })
        })
        .collect()
}
