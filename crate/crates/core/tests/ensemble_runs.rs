use std::collections::BTreeSet;
use std::fs;

use dtcnet_core::diagnostics::GapRatioSample;
use dtcnet_core::ensemble::{compute_ensemble, run_ensemble, run_realization, EnsembleSpec, RunManifest, Task};
use dtcnet_core::export::parse_edge_csv;
use dtcnet_core::output::{
    read_csv, ClassicalRow, ClusterRow, FidelityRow, FitRow, GapRatioRow, HistogramRow, LevelSummaryRow, PopulationRow,
    PrRow, WallDegreeRow,
};
use dtcnet_core::SpinChainParams;

fn spec(tasks: &[Task]) -> EnsembleSpec {
    EnsembleSpec {
        params: SpinChainParams::new(4, 0.0).unwrap(),
        epsilons: vec![0.0, 0.03, 0.1],
        realizations: 3,
        seed: 17,
        tasks: tasks.iter().copied().collect::<BTreeSet<_>>(),
        periods: 12,
        ..EnsembleSpec::default()
    }
}

#[test]
fn aggregates_do_not_depend_on_execution_order() {
    let s = spec(&[Task::Levelstats, Task::Graph]);
    let forward = compute_ensemble(&s).unwrap();
    let mut backward: Vec<_> = s
        .epsilons
        .iter()
        .rev()
        .flat_map(|&e| (0..3u64).rev().map(move |r| (e, r)))
        .map(|(e, r)| run_realization(&s, e, r).unwrap())
        .collect();
    backward.reverse();
    let pool = |results: &[dtcnet_core::ensemble::RealizationResult]| {
        let mut all = GapRatioSample::default();
        for r in results {
            all.extend(r.levels.as_ref().unwrap());
        }
        all
    };
    assert_eq!(pool(&forward).ratios, pool(&backward).ratios);
    for (a, b) in forward.iter().zip(&backward) {
        assert_eq!(a.graph_t.as_ref().unwrap().edges(), b.graph_t.as_ref().unwrap().edges());
    }
}

#[test]
fn disorder_fixed_across_epsilon() {
    let s = spec(&[Task::Graph]);
    let params = s.params.clone();
    let a = dtcnet_core::sample_disorder(&params.with_epsilon(0.0), s.seed, 2);
    let b = dtcnet_core::sample_disorder(&params.with_epsilon(0.1), s.seed, 2);
    assert_eq!(a, b);
}

#[test]
fn manifest_artifacts_parse_under_their_schema() {
    let dir = tempfile::tempdir().unwrap();
    let s = spec(&[Task::Graph, Task::Levelstats, Task::Spectrum, Task::Walk, Task::Classical]);
    let (manifest, run_dir) = run_ensemble(&s, dir.path()).unwrap();
    assert_eq!(RunManifest::read(&run_dir.join("manifest.json")).unwrap(), manifest);
    assert_eq!(manifest.seeds.len(), 3);
    let schemas: BTreeSet<&str> = manifest.artifacts.iter().map(|a| a.schema.as_str()).collect();
    for expected in ["fit", "histogram", "gap-ratio", "fidelity", "population", "pr", "classical", "node"] {
        assert!(schemas.contains(expected), "{expected} missing");
    }
    for a in &manifest.artifacts {
        let path = run_dir.join(&a.path);
        let ok = match a.schema.as_str() {
            "histogram" => read_csv::<HistogramRow>(&path).is_ok(),
            "fit" => read_csv::<FitRow>(&path).is_ok(),
            "wall-degree" => read_csv::<WallDegreeRow>(&path).is_ok(),
            "cluster" => read_csv::<ClusterRow>(&path).is_ok(),
            "gap-ratio" => read_csv::<GapRatioRow>(&path).is_ok(),
            "level-summary" => read_csv::<LevelSummaryRow>(&path).is_ok(),
            "fidelity" => read_csv::<FidelityRow>(&path).is_ok(),
            "population" => read_csv::<PopulationRow>(&path).is_ok(),
            "pr" => read_csv::<PrRow>(&path).is_ok(),
            "classical" => read_csv::<ClassicalRow>(&path).is_ok(),
            "node" => dtcnet_core::output::read_degree_column(&path).is_ok(),
            "edges.csv" => parse_edge_csv(&fs::read(&path).unwrap()).is_ok(),
            "poisson" => fs::read_to_string(&path).unwrap().starts_with("epsilon,lambda"),
            other => panic!("unexpected schema {other}"),
        };
        assert!(ok, "{} does not parse as {}", a.path, a.schema);
    }
}

#[test]
fn identical_specs_give_identical_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let s = spec(&[Task::Graph, Task::Levelstats]);
    let (a, dir_a) = run_ensemble(&s, &dir.path().join("a")).unwrap();
    let (b, dir_b) = run_ensemble(&s, &dir.path().join("b")).unwrap();
    assert_eq!(a.spec, b.spec);
    assert_eq!(a.seeds, b.seeds);
    assert_eq!(a.artifacts, b.artifacts);
    assert_eq!(a.branch_warnings, b.branch_warnings);
    for art in &a.artifacts {
        assert_eq!(fs::read(dir_a.join(&art.path)).unwrap(), fs::read(dir_b.join(&art.path)).unwrap(), "{}", art.path);
    }
}

#[test]
fn rejects_oversized_chains() {
    let mut s = spec(&[Task::Graph]);
    s.params.n = 15;
    assert!(run_ensemble(&s, tempfile::tempdir().unwrap().path()).is_err());
}
