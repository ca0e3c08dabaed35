//! Degree-distribution statistics: log-binned histograms, power-law fits
//! with KS-selected lower cutoff, lognormal likelihood-ratio comparison and
//! per-domain-wall degree tables.
//!
//! Integer samples (node degrees) use the discrete approximation with a
//! half-unit shift of the cutoff. Real samples such as participation ratios
//! use the continuous estimators of the same family.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::graph::PercolationGraph;
use crate::output::{FitRow, HistogramRow, WallDegreeRow};

pub const DEFAULT_BIN_RATIO: f64 = 1.5;
/// Smallest tail accepted for a candidate cutoff.
pub const MIN_TAIL: usize = 10;
/// Two-sided 5% threshold on the normalized log-likelihood ratio.
pub const SIGNIFICANCE: f64 = 1.96;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeHistogram {
    /// Geometric bin edges starting at 1.
    pub bin_edges: Vec<f64>,
    /// Counts divided by bin width and by the number of nonzero samples.
    pub densities: Vec<f64>,
    pub counts: Vec<usize>,
    /// Zero-degree samples, kept out of the log bins.
    pub zero_count: usize,
    pub samples: usize,
}

impl DegreeHistogram {
    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.bin_edges.windows(2).map(|w| w[1] - w[0])
    }

    /// `Σ density × width`; 1 whenever any nonzero sample exists.
    pub fn total_mass(&self) -> f64 {
        self.densities.iter().zip(self.widths()).map(|(d, w)| d * w).sum()
    }

    pub fn rows(&self) -> Vec<HistogramRow> {
        self.bin_edges
            .windows(2)
            .zip(&self.densities)
            .map(|(w, &density)| HistogramRow {
                bin_lo: w[0],
                bin_hi: w[1],
                density,
            })
            .collect()
    }
}

/// Log-binned histogram of `degrees`, bins `[1, r), [r, r²), …`.
pub fn log_binned_histogram(degrees: &[usize], ratio: f64) -> Result<DegreeHistogram> {
    if degrees.is_empty() {
        return Err(Error::InsufficientData("empty degree sample".into()));
    }
    if !(ratio > 1.0 && ratio.is_finite()) {
        return Err(Error::InvalidParameter(format!("bin ratio {ratio} must exceed 1")));
    }
    let zero_count = degrees.iter().filter(|&&k| k == 0).count();
    let nonzero = degrees.len() - zero_count;
    let max = degrees.iter().copied().max().unwrap_or(0) as f64;

    let mut bin_edges = vec![1.0];
    if nonzero > 0 {
        while *bin_edges.last().unwrap() <= max {
            let next = bin_edges.last().unwrap() * ratio;
            bin_edges.push(next);
        }
    }
    let mut counts = vec![0usize; bin_edges.len().saturating_sub(1)];
    for &k in degrees.iter().filter(|&&k| k > 0) {
        let x = k as f64;
        let bin = bin_edges.partition_point(|&e| e <= x) - 1;
        counts[bin] += 1;
    }
    let densities = counts
        .iter()
        .zip(bin_edges.windows(2))
        .map(|(&c, w)| c as f64 / ((w[1] - w[0]) * nonzero as f64))
        .collect();
    Ok(DegreeHistogram {
        bin_edges,
        densities,
        counts,
        zero_count,
        samples: degrees.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailKind {
    Discrete,
    Continuous,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub beta: f64,
    pub k_min: f64,
    pub ks: f64,
    pub n_tail: usize,
    pub kind: TailKind,
}

impl PowerLawFit {
    pub fn row(&self, epsilon: f64, n: usize, favored: Favored) -> FitRow {
        FitRow {
            epsilon,
            n,
            beta: self.beta,
            k_min: self.k_min,
            ks: self.ks,
            n_tail: self.n_tail,
            favored: favored.to_string(),
        }
    }

    /// Model CDF `P(X ≤ x)` on the tail.
    pub fn cdf(&self, x: f64) -> f64 {
        match self.kind {
            TailKind::Discrete => {
                if x < self.k_min {
                    0.0
                } else {
                    let k = x.floor();
                    1.0 - ((k + 0.5) / (self.k_min - 0.5)).powf(1.0 - self.beta)
                }
            }
            TailKind::Continuous => {
                if x < self.k_min {
                    0.0
                } else {
                    1.0 - (x / self.k_min).powf(1.0 - self.beta)
                }
            }
        }
    }

    fn ln_pdf(&self, x: f64) -> f64 {
        match self.kind {
            TailKind::Discrete => {
                let s = self.k_min - 0.5;
                let a = ((x - 0.5) / s).powf(1.0 - self.beta);
                let b = ((x + 0.5) / s).powf(1.0 - self.beta);
                (a - b).ln()
            }
            TailKind::Continuous => {
                (self.beta - 1.0).ln() - self.k_min.ln() - self.beta * (x / self.k_min).ln()
            }
        }
    }
}

fn to_f64(degrees: &[usize]) -> Vec<f64> {
    degrees.iter().map(|&k| k as f64).collect()
}

fn mle(samples: &[f64], x_min: f64, kind: TailKind) -> Result<(f64, usize)> {
    let scale = match kind {
        TailKind::Discrete => {
            if x_min < 1.0 {
                return Err(Error::InvalidParameter(format!("k_min {x_min} must be at least 1")));
            }
            x_min - 0.5
        }
        TailKind::Continuous => {
            if x_min <= 0.0 {
                return Err(Error::InvalidParameter(format!("x_min {x_min} must be positive")));
            }
            x_min
        }
    };
    let tail: Vec<f64> = samples.iter().copied().filter(|&x| x >= x_min).collect();
    if tail.len() < MIN_TAIL {
        return Err(Error::InsufficientData(format!(
            "{} samples at or above {x_min}, need {MIN_TAIL}",
            tail.len()
        )));
    }
    if tail.iter().all(|&x| x == tail[0]) {
        return Err(Error::Degenerate(format!("every tail sample equals {}", tail[0])));
    }
    let denom: f64 = tail.iter().map(|&x| (x / scale).ln()).sum();
    if denom <= 0.0 {
        return Err(Error::Degenerate("vanishing log-sum in exponent estimator".into()));
    }
    Ok((1.0 + tail.len() as f64 / denom, tail.len()))
}

/// Power-law exponent for integer samples at or above `k_min`.
pub fn powerlaw_mle(degrees: &[usize], k_min: usize) -> Result<f64> {
    mle(&to_f64(degrees), k_min as f64, TailKind::Discrete).map(|(b, _)| b)
}

/// Power-law exponent for real samples at or above `x_min`.
pub fn powerlaw_mle_continuous(values: &[f64], x_min: f64) -> Result<f64> {
    mle(values, x_min, TailKind::Continuous).map(|(b, _)| b)
}

fn ks(samples: &[f64], fit: &PowerLawFit) -> f64 {
    let mut tail: Vec<f64> = samples.iter().copied().filter(|&x| x >= fit.k_min).collect();
    if tail.is_empty() {
        return 0.0;
    }
    tail.sort_by(f64::total_cmp);
    let n = tail.len() as f64;
    let mut worst: f64 = 0.0;
    match fit.kind {
        TailKind::Discrete => {
            // Both CDFs are step functions on the integers; check every step.
            let mut idx = 0;
            let mut k = fit.k_min;
            let last = *tail.last().unwrap();
            while k <= last {
                while idx < tail.len() && tail[idx] <= k {
                    idx += 1;
                }
                worst = worst.max((idx as f64 / n - fit.cdf(k)).abs());
                k += 1.0;
            }
        }
        TailKind::Continuous => {
            for (i, &x) in tail.iter().enumerate() {
                let f = fit.cdf(x);
                worst = worst.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
            }
        }
    }
    worst.clamp(0.0, 1.0)
}

/// Largest gap between the empirical and model CDFs over the tail.
pub fn ks_distance(degrees: &[usize], fit: &PowerLawFit) -> f64 {
    ks(&to_f64(degrees), fit)
}

pub fn ks_distance_continuous(values: &[f64], fit: &PowerLawFit) -> f64 {
    ks(values, fit)
}

fn scan(samples: &[f64], kind: TailKind) -> Result<PowerLawFit> {
    let mut candidates: Vec<f64> = samples
        .iter()
        .copied()
        .filter(|&x| match kind {
            TailKind::Discrete => x >= 1.0,
            TailKind::Continuous => x > 0.0,
        })
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let mut best: Option<PowerLawFit> = None;
    for x_min in candidates {
        let Ok((beta, n_tail)) = mle(samples, x_min, kind) else {
            continue;
        };
        let mut fit = PowerLawFit {
            beta,
            k_min: x_min,
            ks: 0.0,
            n_tail,
            kind,
        };
        fit.ks = ks(samples, &fit);
        if best.is_none_or(|b| fit.ks < b.ks) {
            best = Some(fit);
        }
    }
    best.ok_or_else(|| Error::InsufficientData("no cutoff leaves a fittable tail".into()))
}

/// Chooses `k_min` among the distinct observed degrees by minimal KS distance.
pub fn kmin_scan(degrees: &[usize]) -> Result<PowerLawFit> {
    scan(&to_f64(degrees), TailKind::Discrete)
}

pub fn xmin_scan_continuous(values: &[f64]) -> Result<PowerLawFit> {
    scan(values, TailKind::Continuous)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Favored {
    PowerLaw,
    Lognormal,
    Inconclusive,
}

impl std::fmt::Display for Favored {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Favored::PowerLaw => "powerlaw",
            Favored::Lognormal => "lognormal",
            Favored::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodRatioResult {
    /// Power-law minus lognormal log-likelihood over the tail.
    pub r: f64,
    pub normalized_r: f64,
    pub favored: Favored,
    /// Fitted lognormal parameters of the truncated tail.
    pub mu: f64,
    pub sigma: f64,
}

/// Lognormal truncated at the fit's cutoff.
#[derive(Clone, Copy, Debug)]
struct TruncatedLognormal {
    mu: f64,
    sigma: f64,
}

impl TruncatedLognormal {
    fn z(&self, x: f64) -> f64 {
        (x.ln() - self.mu) / (self.sigma * SQRT_2)
    }

    /// `P(X > x)`.
    fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            0.5 * erfc(self.z(x))
        }
    }

    /// `P(a < X ≤ b)` without cancellation on either side of the median.
    fn interval(&self, a: f64, b: f64) -> f64 {
        if a <= 0.0 {
            return 1.0 - self.survival(b);
        }
        let (za, zb) = (self.z(a), self.z(b));
        if za > 0.0 {
            0.5 * (erfc(za) - erfc(zb))
        } else {
            0.5 * (erfc(-zb) - erfc(-za))
        }
    }

    fn ln_pdf(&self, x: f64, x_min: f64, kind: TailKind) -> f64 {
        match kind {
            TailKind::Discrete => self.interval(x - 0.5, x + 0.5).ln() - self.survival(x_min - 0.5).ln(),
            TailKind::Continuous => {
                let u = (x.ln() - self.mu) / self.sigma;
                -x.ln() - self.sigma.ln() - 0.5 * (2.0 * PI).ln() - 0.5 * u * u - self.survival(x_min).ln()
            }
        }
    }
}

struct LognormalNll<'a> {
    tail: &'a [f64],
    x_min: f64,
    kind: TailKind,
}

impl CostFunction for LognormalNll<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let model = TruncatedLognormal {
            mu: p[0],
            sigma: p[1].exp(),
        };
        let ll: f64 = self.tail.iter().map(|&x| model.ln_pdf(x, self.x_min, self.kind)).sum();
        Ok(if ll.is_finite() { -ll } else { f64::MAX })
    }
}

fn fit_lognormal(tail: &[f64], x_min: f64, kind: TailKind) -> Result<TruncatedLognormal> {
    let logs: Vec<f64> = tail.iter().map(|x| x.ln()).collect();
    let n = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / n;
    let ln_sd = var.sqrt().max(0.05).ln();
    let simplex = vec![
        vec![mean, ln_sd],
        vec![mean + 0.5, ln_sd],
        vec![mean, ln_sd + 0.5],
    ];
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-12)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let cost = LognormalNll { tail, x_min, kind };
    let result = Executor::new(cost, solver)
        .configure(|s| s.max_iters(4000))
        .run()
        .map_err(|e| Error::InvalidParameter(format!("lognormal fit failed: {e}")))?;
    let best = result
        .state()
        .get_best_param()
        .cloned()
        .ok_or_else(|| Error::InvalidParameter("lognormal fit produced no estimate".into()))?;
    Ok(TruncatedLognormal {
        mu: best[0],
        sigma: best[1].exp(),
    })
}

/// Verdict from pointwise log-likelihood differences.
pub fn likelihood_ratio_from_differences(diffs: &[f64]) -> (f64, f64, Favored) {
    let n = diffs.len() as f64;
    let r: f64 = diffs.iter().sum();
    if diffs.len() < 2 {
        return (r, 0.0, Favored::Inconclusive);
    }
    let mean = r / n;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    if !(sd > 0.0) || !r.is_finite() {
        return (r, 0.0, Favored::Inconclusive);
    }
    let normalized = r / (sd * n.sqrt());
    let favored = if normalized.abs() <= SIGNIFICANCE {
        Favored::Inconclusive
    } else if r > 0.0 {
        Favored::PowerLaw
    } else {
        Favored::Lognormal
    };
    (r, normalized, favored)
}

fn lr_test(samples: &[f64], fit: &PowerLawFit) -> Result<LikelihoodRatioResult> {
    let tail: Vec<f64> = samples.iter().copied().filter(|&x| x >= fit.k_min).collect();
    if tail.is_empty() {
        return Err(Error::InsufficientData("empty tail".into()));
    }
    let model = fit_lognormal(&tail, fit.k_min, fit.kind)?;
    let diffs: Vec<f64> = tail
        .iter()
        .map(|&x| fit.ln_pdf(x) - model.ln_pdf(x, fit.k_min, fit.kind))
        .collect();
    let (r, normalized_r, favored) = likelihood_ratio_from_differences(&diffs);
    Ok(LikelihoodRatioResult {
        r,
        normalized_r,
        favored,
        mu: model.mu,
        sigma: model.sigma,
    })
}

/// Power law against a lognormal fitted to the same tail.
pub fn lognormal_lr_test(degrees: &[usize], fit: &PowerLawFit) -> Result<LikelihoodRatioResult> {
    lr_test(&to_f64(degrees), fit)
}

pub fn lognormal_lr_test_continuous(values: &[f64], fit: &PowerLawFit) -> Result<LikelihoodRatioResult> {
    lr_test(values, fit)
}

/// Poisson rate estimate, the sample mean.
pub fn poisson_fit(degrees: &[usize]) -> Result<f64> {
    if degrees.is_empty() {
        return Err(Error::InsufficientData("empty degree sample".into()));
    }
    Ok(degrees.iter().sum::<usize>() as f64 / degrees.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallDegree {
    pub walls: usize,
    pub mean_degree: f64,
    /// Population standard deviation over pooled nodes.
    pub std_degree: f64,
    pub nodes: usize,
}

/// Mean and spread of node degree per domain-wall class, pooled over graphs.
pub fn avg_degree_by_domain_walls(graphs: &[PercolationGraph]) -> Result<Vec<WallDegree>> {
    let Some(first) = graphs.first() else {
        return Ok(Vec::new());
    };
    let mut pooled: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for g in graphs {
        if g.n() != first.n() {
            return Err(Error::DimensionMismatch {
                expected: first.n(),
                found: g.n(),
            });
        }
        for node in 0..g.num_nodes() {
            pooled.entry(g.domain_walls(node)).or_default().push(g.degree(node) as f64);
        }
    }
    Ok(pooled
        .into_iter()
        .map(|(walls, ks)| {
            let n = ks.len() as f64;
            let mean = ks.iter().sum::<f64>() / n;
            let var = ks.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / n;
            WallDegree {
                walls,
                mean_degree: mean,
                std_degree: var.sqrt(),
                nodes: ks.len(),
            }
        })
        .collect())
}

pub fn wall_degree_rows(epsilon: f64, realizations: usize, table: &[WallDegree]) -> Vec<WallDegreeRow> {
    table
        .iter()
        .map(|w| WallDegreeRow {
            epsilon,
            walls: w.walls,
            mean_degree: w.mean_degree,
            std_degree: w.std_degree,
            realizations,
        })
        .collect()
}

/// Sample skewness (biased moment estimator).
pub fn skewness(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m3 = values.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    if m2 == 0.0 {
        0.0
    } else {
        m3 / m2.powf(1.5)
    }
}
