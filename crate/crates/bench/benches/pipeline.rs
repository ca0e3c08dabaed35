use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use dtcnet_core::diagnostics::{all_magnetization_series, gap_ratios};
use dtcnet_core::netfit::{kmin_scan, lognormal_lr_test};
use dtcnet_core::{
    degree_sequence, effective_hamiltonian, floquet_for, floquet_spectrum, percolation_graph, sample_disorder,
    SpinChainParams,
};

fn floquet(c: &mut Criterion) {
    for n in [6, 8] {
        let p = SpinChainParams::new(n, 0.05).unwrap();
        let d = sample_disorder(&p, 1, 0);
        c.bench_function(&format!("floquet_operator_n{n}"), |b| b.iter(|| floquet_for(black_box(&p), &d).unwrap()));
        let u = floquet_for(&p, &d).unwrap();
        c.bench_function(&format!("floquet_spectrum_n{n}"), |b| b.iter(|| floquet_spectrum(black_box(&u)).unwrap()));
    }
}

fn graph(c: &mut Criterion) {
    let p = SpinChainParams::new(8, 0.05).unwrap();
    let u = floquet_for(&p, &sample_disorder(&p, 1, 0)).unwrap();
    let h = effective_hamiltonian(&floquet_spectrum(&u).unwrap());
    c.bench_function("percolation_graph_n8", |b| b.iter(|| percolation_graph(black_box(&h))));
    let spectrum = floquet_spectrum(&u).unwrap();
    c.bench_function("gap_ratios_n8", |b| b.iter(|| gap_ratios(black_box(&spectrum.quasienergies)).unwrap()));
}

fn fitting(c: &mut Criterion) {
    let p = SpinChainParams::new(8, 0.012).unwrap();
    let degrees: Vec<usize> = (0..20)
        .flat_map(|r| {
            let u = floquet_for(&p, &sample_disorder(&p, 3, r)).unwrap();
            let g = percolation_graph(&effective_hamiltonian(&floquet_spectrum(&u).unwrap()));
            degree_sequence(&g).into_iter().map(|d| d.degree).collect::<Vec<_>>()
        })
        .collect();
    c.bench_function("kmin_scan_pooled", |b| b.iter(|| kmin_scan(black_box(&degrees))));
    if let Ok(fit) = kmin_scan(&degrees) {
        c.bench_function("lognormal_lr_pooled", |b| b.iter(|| lognormal_lr_test(black_box(&degrees), &fit)));
    }
}

fn spectra(c: &mut Criterion) {
    let p = SpinChainParams::new(6, 0.03).unwrap();
    let u = floquet_for(&p, &sample_disorder(&p, 1, 0)).unwrap();
    c.bench_function("all_magnetization_series_n6", |b| {
        b.iter(|| all_magnetization_series(black_box(&u), 64).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = floquet, graph, fitting, spectra
}
criterion_main!(benches);
