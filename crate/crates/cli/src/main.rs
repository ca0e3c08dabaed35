use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dtcnet_core::diagnostics::{magnetization_series, power_spectrum, ratio_histogram, GapRatioSample};
use dtcnet_core::ensemble::{compute_ensemble, run_ensemble, write_outputs, EnsembleSpec, Task};
use dtcnet_core::netfit::{kmin_scan, log_binned_histogram, lognormal_lr_test, poisson_fit, DEFAULT_BIN_RATIO};
use dtcnet_core::output::{read_degree_column, write_csv, MatrixEntryRow, QuasienergyRow};
use dtcnet_core::semiclassical::fixed_point_sweep;
use dtcnet_core::{
    effective_hamiltonian, floquet_for, floquet_spectrum, sample_disorder, squared_floquet, CMatrix, Configuration,
    Error,
};

#[derive(Parser, Debug)]
#[command(name = "dtcnet", version, about = "Floquet time-crystal simulation and configuration-space graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Floquet operator, effective Hamiltonians and quasienergies.
    Simulate(Common),
    /// Percolation graphs, clusters and degree tables.
    Graph(Common),
    /// Power-law, lognormal and Poisson fits of a degree column.
    DegreeFit {
        #[command(flatten)]
        common: Common,
        /// CSV with a `degree` column.
        #[arg(long)]
        input: PathBuf,
    },
    /// Pooled gap ratios with reference densities.
    LevelStats(Common),
    /// Magnetization series, power spectra and fidelity over the ε grid.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Initial configuration index for the series.
        #[arg(long)]
        initial: Option<usize>,
    },
    /// Walk populations and participation ratios.
    Walk(Common),
    /// Semiclassical fixed points of all corner configurations.
    Classical(Common),
    /// Full sweep with a run manifest.
    Ensemble {
        #[command(flatten)]
        common: Common,
        /// Comma-separated subset of graph,levelstats,spectrum,walk,classical.
        #[arg(long, value_delimiter = ',')]
        tasks: Option<Vec<String>>,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    #[arg(long)]
    n: Option<usize>,
    /// One value or a comma-separated list.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    epsilon: Option<Vec<f64>>,
    #[arg(long)]
    t1: Option<f64>,
    #[arg(long)]
    j0: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    disorder_w: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    periods: Option<usize>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// csv, dot or graphml.
    #[arg(long)]
    format: Option<String>,
    /// JSON file with ensemble settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

enum Failure {
    Invalid(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

impl Common {
    /// Flag, then config file, then built-in default.
    fn resolve(&self) -> Outcome<EnsembleSpec> {
        let mut spec = match &self.config {
            Some(path) => {
                let text = fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                serde_json::from_slice(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?
            }
            None => EnsembleSpec::default(),
        };
        let p = &mut spec.params;
        if let Some(v) = self.n {
            p.n = v;
        }
        if let Some(v) = self.t1 {
            p.t1 = v;
        }
        if let Some(v) = self.j0 {
            p.j0 = v;
        }
        if let Some(v) = self.alpha {
            p.alpha = v;
        }
        if let Some(v) = self.disorder_w {
            p.disorder_w = v;
        }
        if let Some(v) = &self.epsilon {
            spec.epsilons = v.clone();
        }
        if let Some(v) = self.seed {
            spec.seed = v;
        }
        if let Some(v) = self.realizations {
            spec.realizations = v;
        }
        if let Some(v) = self.periods {
            spec.periods = v;
        }
        if let Some(f) = &self.format {
            spec.graph_format = f.parse()?;
        }
        spec.params.epsilon = spec.epsilons.first().copied().unwrap_or(0.0);
        spec.validate()?;
        Ok(spec)
    }
}

fn create_dir(dir: &Path) -> Outcome<()> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))
}

#[derive(Serialize)]
struct Invocation<'a> {
    command: &'a str,
    spec: &'a EnsembleSpec,
    version: &'a str,
}

fn echo_settings(dir: &Path, command: &str, spec: &EnsembleSpec) -> Outcome<()> {
    let inv = Invocation {
        command,
        spec,
        version: env!("CARGO_PKG_VERSION"),
    };
    let bytes = serde_json::to_vec_pretty(&inv).map_err(|e| Failure::Invalid(e.to_string()))?;
    fs::write(dir.join("settings.json"), bytes).map_err(|e| Failure::Io(e.to_string()))
}

fn matrix_rows(m: &CMatrix) -> Vec<MatrixEntryRow> {
    let mut rows = Vec::new();
    for row in 0..m.nrows() {
        for col in 0..m.ncols() {
            let z = m[(row, col)];
            if z.re != 0.0 || z.im != 0.0 {
                rows.push(MatrixEntryRow {
                    row,
                    col,
                    re: z.re,
                    im: z.im,
                });
            }
        }
    }
    rows
}

fn quasienergy_rows(q: &[f64]) -> Vec<QuasienergyRow> {
    q.iter()
        .enumerate()
        .map(|(index, &quasienergy)| QuasienergyRow { index, quasienergy })
        .collect()
}

fn simulate(spec: &EnsembleSpec, dir: &Path) -> Outcome<()> {
    for &eps in &spec.epsilons {
        let params = spec.params.with_epsilon(eps);
        let u = floquet_for(&params, &sample_disorder(&params, spec.seed, 0))?;
        let s1 = floquet_spectrum(&u)?;
        let s2 = floquet_spectrum(&squared_floquet(&u))?;
        let tag = format!("eps{eps}");
        write_csv(&dir.join(format!("floquet_{tag}.csv")), &matrix_rows(&u.matrix))?;
        write_csv(&dir.join(format!("heff_T_{tag}.csv")), &matrix_rows(&effective_hamiltonian(&s1).matrix))?;
        write_csv(&dir.join(format!("heff_2T_{tag}.csv")), &matrix_rows(&effective_hamiltonian(&s2).matrix))?;
        write_csv(&dir.join(format!("quasienergies_T_{tag}.csv")), &quasienergy_rows(&s1.quasienergies))?;
        write_csv(&dir.join(format!("quasienergies_2T_{tag}.csv")), &quasienergy_rows(&s2.quasienergies))?;
        if !s1.branch_warnings.is_empty() {
            eprintln!("warning: {} quasienergies near the branch cut at ε = {eps}", s1.branch_warnings.len());
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DegreeFitRow {
    samples: usize,
    beta: f64,
    k_min: f64,
    ks: f64,
    n_tail: usize,
    lr: f64,
    normalized_lr: f64,
    favored: String,
    lognormal_mu: f64,
    lognormal_sigma: f64,
    poisson_lambda: f64,
}

fn degree_fit(input: &Path, dir: &Path) -> Outcome<()> {
    let degrees = read_degree_column(input)?;
    let fit = kmin_scan(&degrees)?;
    let lr = lognormal_lr_test(&degrees, &fit)?;
    let row = DegreeFitRow {
        samples: degrees.len(),
        beta: fit.beta,
        k_min: fit.k_min,
        ks: fit.ks,
        n_tail: fit.n_tail,
        lr: lr.r,
        normalized_lr: lr.normalized_r,
        favored: lr.favored.to_string(),
        lognormal_mu: lr.mu,
        lognormal_sigma: lr.sigma,
        poisson_lambda: poisson_fit(&degrees)?,
    };
    write_csv(&dir.join("degree_fit.csv"), &[&row])?;
    write_csv(
        &dir.join("degree_hist.csv"),
        &log_binned_histogram(&degrees, DEFAULT_BIN_RATIO)?.rows(),
    )?;
    println!("beta={:.4} k_min={} favored={}", fit.beta, fit.k_min, lr.favored);
    Ok(())
}

fn with_task(spec: &EnsembleSpec, task: Task) -> EnsembleSpec {
    EnsembleSpec {
        tasks: [task].into(),
        ..spec.clone()
    }
}

fn pipeline(spec: &EnsembleSpec, dir: &Path) -> Outcome<()> {
    let results = compute_ensemble(spec)?;
    write_outputs(spec, &results, dir)?;
    let warnings: usize = results.iter().map(|r| r.branch_warnings).sum();
    if warnings > 0 {
        eprintln!("warning: {warnings} quasienergies near the branch cut");
    }
    Ok(())
}

fn level_stats(spec: &EnsembleSpec, dir: &Path) -> Outcome<()> {
    let results = compute_ensemble(spec)?;
    write_outputs(spec, &results, dir)?;
    let mut all = GapRatioSample::default();
    for s in results.iter().filter_map(|r| r.levels.as_ref()) {
        all.extend(s);
    }
    if spec.epsilons.len() > 1 {
        write_csv(&dir.join("gap_ratio_hist_all.csv"), &ratio_histogram(&all, spec.ratio_bins)?)?;
    }
    Ok(())
}

fn spectrum(spec: &EnsembleSpec, initial: Option<usize>, dir: &Path) -> Outcome<()> {
    let n = spec.params.n;
    let initial = match initial {
        Some(i) => Configuration::new(i, n)?,
        None => Configuration::all_up(n),
    };
    for &eps in &spec.epsilons {
        let params = spec.params.with_epsilon(eps);
        let u = floquet_for(&params, &sample_disorder(&params, spec.seed, 0))?;
        let series = magnetization_series(&u, initial, spec.periods)?;
        write_csv(&dir.join(format!("series_eps{eps}.csv")), &series.rows())?;
        write_csv(&dir.join(format!("power_eps{eps}.csv")), &power_spectrum(&series)?.rows())?;
    }
    pipeline(spec, dir)
}

fn run(cli: Cli) -> Outcome<()> {
    let (name, common) = match &cli.command {
        Command::Simulate(c) => ("simulate", c),
        Command::Graph(c) => ("graph", c),
        Command::DegreeFit { common, .. } => ("degree-fit", common),
        Command::LevelStats(c) => ("level-stats", c),
        Command::Spectrum { common, .. } => ("spectrum", common),
        Command::Walk(c) => ("walk", c),
        Command::Classical(c) => ("classical", c),
        Command::Ensemble { common, .. } => ("ensemble", common),
    };
    let mut spec = common.resolve()?;
    let dir = common.out_dir.clone();
    create_dir(&dir)?;

    match &cli.command {
        Command::Ensemble { tasks, .. } => {
            if let Some(tasks) = tasks {
                spec.tasks = tasks.iter().map(|t| t.parse()).collect::<Result<_, Error>>()?;
            }
            let (_, run_dir) = run_ensemble(&spec, &dir)?;
            println!("{}", run_dir.display());
            return Ok(());
        }
        Command::Simulate(_) => simulate(&spec, &dir)?,
        Command::Graph(_) => {
            spec = with_task(&spec, Task::Graph);
            pipeline(&spec, &dir)?
        }
        Command::DegreeFit { input, .. } => degree_fit(input, &dir)?,
        Command::LevelStats(_) => {
            spec = with_task(&spec, Task::Levelstats);
            level_stats(&spec, &dir)?
        }
        Command::Spectrum { initial, .. } => {
            spec = with_task(&spec, Task::Spectrum);
            spectrum(&spec, *initial, &dir)?
        }
        Command::Walk(_) => {
            spec = with_task(&spec, Task::Walk);
            pipeline(&spec, &dir)?
        }
        Command::Classical(_) => {
            let rows: Vec<_> = fixed_point_sweep(&spec.params)?.iter().map(|p| p.row()).collect();
            write_csv(&dir.join("classical.csv"), &rows)?;
        }
    }
    echo_settings(&dir, name, &spec)
}

fn configure_threads() -> Outcome<()> {
    let Ok(value) = std::env::var("DTCNET_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Invalid(format!("DTCNET_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Invalid(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match configure_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
