//! Disorder-ensemble sweeps over the rotation error with pooled statistics
//! and a reproducible run manifest.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::levels::{gap_ratios, mean_gap_ratio, ratio_histogram, GapRatioSample};
use crate::diagnostics::spectrum::{all_magnetization_series, fidelity_by_config, power_spectrum, PowerSpectrum};
use crate::diagnostics::walk::{pr_after, pr_rows, tunneling_periods, walk_populations};
use crate::error::{Error, Result};
use crate::export::{export_graph, node_csv, GraphFormat};
use crate::floquet::{effective_hamiltonian, floquet_for, floquet_spectrum, squared_floquet, FloquetOperator};
use crate::graph::{clusters, percolation_graph, PercolationGraph};
use crate::netfit::{
    avg_degree_by_domain_walls, kmin_scan, lognormal_lr_test, log_binned_histogram, poisson_fit, wall_degree_rows,
    Favored, DEFAULT_BIN_RATIO,
};
use crate::output::{write_csv, ClusterRow, FidelityRow, FitRow, LevelSummaryRow, PrRow, WallDegreeRow};
use crate::semiclassical::fixed_point_sweep;
use crate::spin::{sample_disorder, Configuration, SpinChainParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Graph,
    Levelstats,
    Spectrum,
    Walk,
    Classical,
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "graph" => Ok(Task::Graph),
            "levelstats" | "level-stats" => Ok(Task::Levelstats),
            "spectrum" => Ok(Task::Spectrum),
            "walk" => Ok(Task::Walk),
            "classical" => Ok(Task::Classical),
            other => Err(Error::InvalidParameter(format!("unknown task `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleSpec {
    pub params: SpinChainParams,
    pub epsilons: Vec<f64>,
    pub realizations: usize,
    pub seed: u64,
    pub tasks: BTreeSet<Task>,
    /// Stroboscopic periods for magnetization series and walks.
    pub periods: usize,
    pub graph_format: GraphFormat,
    pub ratio_bins: usize,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        Self {
            params: SpinChainParams::default(),
            epsilons: vec![0.0],
            realizations: 1,
            seed: 0,
            tasks: BTreeSet::from([Task::Graph]),
            periods: 64,
            graph_format: GraphFormat::EdgeCsv,
            ratio_bins: 20,
        }
    }
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.realizations == 0 {
            return Err(Error::InvalidParameter("realizations must be at least 1".into()));
        }
        if self.epsilons.is_empty() {
            return Err(Error::InvalidParameter("epsilon list is empty".into()));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
            return Err(Error::InvalidParameter(format!("epsilon {e} must be non-negative")));
        }
        if self.tasks.contains(&Task::Spectrum) && self.periods < 2 {
            return Err(Error::InvalidParameter("spectrum task needs at least 2 periods".into()));
        }
        if self.ratio_bins == 0 {
            return Err(Error::InvalidParameter("ratio_bins must be positive".into()));
        }
        Ok(())
    }

    pub fn has(&self, task: Task) -> bool {
        self.tasks.contains(&task)
    }
}

/// Everything computed for one `(ε, realization)` pair.
#[derive(Clone, Debug)]
pub struct RealizationResult {
    pub epsilon: f64,
    pub realization: u64,
    pub graph_t: Option<PercolationGraph>,
    pub graph_2t: Option<PercolationGraph>,
    pub levels: Option<GapRatioSample>,
    /// Per-configuration spectra for this ε and for ε = 0 with the same disorder.
    pub spectra: Option<(Vec<PowerSpectrum>, Vec<PowerSpectrum>)>,
    pub prs: Option<Vec<f64>>,
    pub branch_warnings: usize,
}

fn spectra_for(u: &FloquetOperator, periods: usize) -> Result<Vec<PowerSpectrum>> {
    all_magnetization_series(u, periods)?.iter().map(power_spectrum).collect()
}

/// Runs the per-realization pipeline for one rotation error.
pub fn run_realization(spec: &EnsembleSpec, epsilon: f64, realization: u64) -> Result<RealizationResult> {
    let params = spec.params.with_epsilon(epsilon);
    let disorder = sample_disorder(&params, spec.seed, realization);
    let u = floquet_for(&params, &disorder)?;
    let mut out = RealizationResult {
        epsilon,
        realization,
        graph_t: None,
        graph_2t: None,
        levels: None,
        spectra: None,
        prs: None,
        branch_warnings: 0,
    };

    if spec.has(Task::Graph) || spec.has(Task::Levelstats) {
        let spectrum = floquet_spectrum(&u)?;
        out.branch_warnings += spectrum.branch_warnings.len();
        if spec.has(Task::Levelstats) {
            out.levels = Some(gap_ratios(&spectrum.quasienergies)?);
        }
        if spec.has(Task::Graph) {
            out.graph_t = Some(percolation_graph(&effective_hamiltonian(&spectrum)));
            let spectrum_2t = floquet_spectrum(&squared_floquet(&u))?;
            out.branch_warnings += spectrum_2t.branch_warnings.len();
            out.graph_2t = Some(percolation_graph(&effective_hamiltonian(&spectrum_2t)));
        }
    }
    if spec.has(Task::Spectrum) {
        let reference = floquet_for(&params.with_epsilon(0.0), &disorder)?;
        out.spectra = Some((spectra_for(&reference, spec.periods)?, spectra_for(&u, spec.periods)?));
    }
    if spec.has(Task::Walk) && epsilon > 0.0 {
        out.prs = Some(pr_after(&u, tunneling_periods(&params)?)?);
    }
    Ok(out)
}

/// All realizations of a sweep, ordered by `(ε index, realization)`.
pub fn compute_ensemble(spec: &EnsembleSpec) -> Result<Vec<RealizationResult>> {
    spec.validate()?;
    let jobs: Vec<(f64, u64)> = spec
        .epsilons
        .iter()
        .flat_map(|&e| (0..spec.realizations as u64).map(move |r| (e, r)))
        .collect();
    jobs.par_iter().map(|&(e, r)| run_realization(spec, e, r)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizationSeed {
    pub seed: u64,
    pub realization_index: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchWarning {
    pub epsilon: f64,
    pub realization: u64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    /// Relative to the run directory.
    pub path: String,
    pub schema: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub spec: EnsembleSpec,
    pub seeds: Vec<RealizationSeed>,
    pub artifacts: Vec<Artifact>,
    pub branch_warnings: Vec<BranchWarning>,
    pub version: String,
    pub created: String,
    pub compute_seconds: f64,
    pub write_seconds: f64,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&fs::read(path)?)?)
    }
}

fn eps_tag(e: f64) -> String {
    format!("eps{e}")
}

struct Writer {
    dir: PathBuf,
    artifacts: Vec<Artifact>,
}

impl Writer {
    fn csv<T: Serialize>(&mut self, name: String, schema: &str, rows: &[T]) -> Result<()> {
        write_csv(&self.dir.join(&name), rows)?;
        self.record(name, schema);
        Ok(())
    }

    fn bytes(&mut self, name: String, schema: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.dir.join(&name), bytes)?;
        self.record(name, schema);
        Ok(())
    }

    fn record(&mut self, path: String, schema: &str) {
        self.artifacts.push(Artifact {
            path,
            schema: schema.to_string(),
        });
    }
}

fn fit_row(epsilon: f64, n: usize, degrees: &[usize]) -> FitRow {
    match kmin_scan(degrees) {
        Ok(fit) => {
            let favored = lognormal_lr_test(degrees, &fit)
                .map(|lr| lr.favored)
                .unwrap_or(Favored::Inconclusive);
            fit.row(epsilon, n, favored)
        }
        Err(_) => FitRow {
            epsilon,
            n,
            beta: f64::NAN,
            k_min: f64::NAN,
            ks: f64::NAN,
            n_tail: 0,
            favored: "unfittable".into(),
        },
    }
}

/// Pooled node degrees of a set of graphs.
pub fn pooled_degrees<'a>(graphs: impl IntoIterator<Item = &'a PercolationGraph>) -> Vec<usize> {
    graphs
        .into_iter()
        .flat_map(|g| (0..g.num_nodes()).map(move |i| g.degree(i)))
        .collect()
}

fn write_results(spec: &EnsembleSpec, results: &[RealizationResult], w: &mut Writer) -> Result<()> {
    let n = spec.params.n;
    let per_eps: Vec<&[RealizationResult]> = results.chunks(spec.realizations).collect();

    if spec.has(Task::Graph) {
        let mut fits_t = Vec::new();
        let mut fits_2t = Vec::new();
        let mut walls: Vec<WallDegreeRow> = Vec::new();
        let mut cluster_rows = Vec::new();
        for (&epsilon, chunk) in spec.epsilons.iter().zip(&per_eps) {
            let graphs_t: Vec<PercolationGraph> = chunk.iter().filter_map(|r| r.graph_t.clone()).collect();
            let graphs_2t: Vec<PercolationGraph> = chunk.iter().filter_map(|r| r.graph_2t.clone()).collect();
            let tag = eps_tag(epsilon);

            if let Some(first) = graphs_t.first() {
                let ext = spec.graph_format.extension();
                w.bytes(format!("graph_T_{tag}.{ext}"), ext, &export_graph(first, spec.graph_format)?)?;
                w.bytes(format!("nodes_T_{tag}.csv"), "node", &node_csv(first)?)?;
            }
            if let Some(first) = graphs_2t.first() {
                let ext = spec.graph_format.extension();
                w.bytes(format!("graph_2T_{tag}.{ext}"), ext, &export_graph(first, spec.graph_format)?)?;
                w.bytes(format!("nodes_2T_{tag}.csv"), "node", &node_csv(first)?)?;
            }
            for (label, graphs, fits) in [("T", &graphs_t, &mut fits_t), ("2T", &graphs_2t, &mut fits_2t)] {
                let degrees = pooled_degrees(graphs.iter());
                let hist = log_binned_histogram(&degrees, DEFAULT_BIN_RATIO)?;
                w.csv(format!("degree_hist_{label}_{tag}.csv"), "histogram", &hist.rows())?;
                fits.push(fit_row(epsilon, n, &degrees));
            }
            walls.extend(wall_degree_rows(
                epsilon,
                graphs_t.len(),
                &avg_degree_by_domain_walls(&graphs_t)?,
            ));
            for r in chunk.iter() {
                if let Some(g) = &r.graph_t {
                    let c = clusters(g);
                    cluster_rows.push(ClusterRow {
                        epsilon,
                        realization: r.realization,
                        components: c.components.len(),
                        largest: c.largest(),
                        largest_fraction: c.largest_fraction(),
                    });
                }
            }
        }
        w.csv("fits_T.csv".into(), "fit", &fits_t)?;
        w.csv("fits_2T.csv".into(), "fit", &fits_2t)?;
        w.csv("wall_degree.csv".into(), "wall-degree", &walls)?;
        w.csv("clusters_T.csv".into(), "cluster", &cluster_rows)?;
        let poisson: Vec<PoissonRow> = spec
            .epsilons
            .iter()
            .zip(&per_eps)
            .filter_map(|(&epsilon, chunk)| {
                let degrees = pooled_degrees(chunk.iter().filter_map(|r| r.graph_t.as_ref()));
                poisson_fit(&degrees).ok().map(|lambda| PoissonRow { epsilon, lambda })
            })
            .collect();
        w.csv("poisson_T.csv".into(), "poisson", &poisson)?;
    }

    if spec.has(Task::Levelstats) {
        let mut summary = Vec::new();
        for (&epsilon, chunk) in spec.epsilons.iter().zip(&per_eps) {
            let mut pooled = GapRatioSample::default();
            for r in chunk.iter() {
                if let Some(s) = &r.levels {
                    pooled.extend(s);
                }
            }
            if pooled.is_empty() {
                continue;
            }
            w.csv(
                format!("gap_ratio_hist_{}.csv", eps_tag(epsilon)),
                "gap-ratio",
                &ratio_histogram(&pooled, spec.ratio_bins)?,
            )?;
            summary.push(LevelSummaryRow {
                epsilon,
                mean_ratio: mean_gap_ratio(&pooled)?,
                samples: pooled.len(),
                excluded_degenerate: pooled.excluded_degenerate,
                realizations: pooled.spectra,
            });
        }
        w.csv("level_summary.csv".into(), "level-summary", &summary)?;
    }

    if spec.has(Task::Spectrum) {
        let mut rows = Vec::new();
        for (&epsilon, chunk) in spec.epsilons.iter().zip(&per_eps) {
            let dim = spec.params.dim();
            let mut sums = vec![0.0; dim];
            let mut counts = vec![0usize; dim];
            for r in chunk.iter() {
                if let Some((reference, perturbed)) = &r.spectra {
                    for (i, f) in fidelity_by_config(reference, perturbed)?.into_iter().enumerate() {
                        if let Some(f) = f {
                            sums[i] += f;
                            counts[i] += 1;
                        }
                    }
                }
            }
            rows.extend((0..dim).map(|config| FidelityRow {
                config,
                epsilon,
                fidelity: (counts[config] > 0).then(|| sums[config] / counts[config] as f64),
            }));
        }
        w.csv("fidelity.csv".into(), "fidelity", &rows)?;
    }

    if spec.has(Task::Walk) {
        for (&epsilon, chunk) in spec.epsilons.iter().zip(&per_eps) {
            let params = spec.params.with_epsilon(epsilon);
            let u = floquet_for(&params, &sample_disorder(&params, spec.seed, 0))?;
            let walk = walk_populations(&u, Configuration::all_up(spec.params.n), spec.periods)?;
            w.csv(
                format!("populations_{}.csv", eps_tag(epsilon)),
                "population",
                &walk.rows(true),
            )?;
            let pooled: Vec<PrRow> = chunk
                .iter()
                .filter_map(|r| r.prs.as_ref())
                .flat_map(|p| pr_rows(p))
                .collect();
            if !pooled.is_empty() {
                w.csv(format!("pr_{}.csv", eps_tag(epsilon)), "pr", &pooled)?;
            }
        }
    }

    if spec.has(Task::Classical) {
        let rows: Vec<_> = fixed_point_sweep(&spec.params)?.iter().map(|p| p.row()).collect();
        w.csv("classical.csv".into(), "classical", &rows)?;
    }
    Ok(())
}

/// Writes the pooled outputs of [`compute_ensemble`] into an existing
/// directory and lists what was written.
pub fn write_outputs(spec: &EnsembleSpec, results: &[RealizationResult], dir: &Path) -> Result<Vec<Artifact>> {
    let mut writer = Writer {
        dir: dir.to_path_buf(),
        artifacts: Vec::new(),
    };
    write_results(spec, results, &mut writer)?;
    Ok(writer.artifacts)
}

/// Poisson rate of pooled degrees: `epsilon,lambda`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonRow {
    pub epsilon: f64,
    pub lambda: f64,
}

/// Runs the sweep and writes every artifact plus `manifest.json` into a new
/// directory under `out_root` named by timestamp and seed.
pub fn run_ensemble(spec: &EnsembleSpec, out_root: &Path) -> Result<(RunManifest, PathBuf)> {
    spec.validate()?;
    let now = chrono::Utc::now();
    let dir = out_root.join(format!("{}_seed{}", now.format("%Y%m%dT%H%M%S%.3fZ"), spec.seed));
    fs::create_dir_all(&dir)?;

    let start = Instant::now();
    let results = compute_ensemble(spec)?;
    let compute_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let artifacts = write_outputs(spec, &results, &dir)?;
    let write_seconds = start.elapsed().as_secs_f64();

    let manifest = RunManifest {
        spec: spec.clone(),
        seeds: (0..spec.realizations as u64)
            .map(|realization_index| RealizationSeed {
                seed: spec.seed,
                realization_index,
            })
            .collect(),
        artifacts,
        branch_warnings: results
            .iter()
            .filter(|r| r.branch_warnings > 0)
            .map(|r| BranchWarning {
                epsilon: r.epsilon,
                realization: r.realization,
                count: r.branch_warnings,
            })
            .collect(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        created: now.to_rfc3339(),
        compute_seconds,
        write_seconds,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_vec_pretty(&manifest)?)?;
    Ok((manifest, dir))
}
