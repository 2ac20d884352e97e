use std::hint::black_box;

use cocircuit_bench::sample;
use cocircuit_cli::batch::{check_instance, Check};
use cocircuit_core::bounds::Analysis;
use cocircuit_core::enumerate::Canonicalizer;
use cocircuit_core::{CocircuitGraph, OrientedMatroid};
use criterion::{criterion_group, criterion_main, Criterion};

fn cocircuits(c: &mut Criterion) {
    let chi = sample(8, 4, 1).remove(0);
    c.bench_function("cocircuits 8x4", |b| b.iter(|| black_box(&chi).cocircuits().unwrap()));
    c.bench_function("matroid build 8x4", |b| b.iter(|| OrientedMatroid::from_chirotope(black_box(&chi)).unwrap()));
}

fn diameter(c: &mut Criterion) {
    for (n, r) in [(8, 4), (9, 5)] {
        let chi = cocircuit_core::Chirotope::alternating(n, r).unwrap();
        let m = OrientedMatroid::from_chirotope(&chi).unwrap();
        c.bench_function(&format!("graph + diameter {n}x{r}"), |b| b.iter(|| CocircuitGraph::new(black_box(&m)).diameter().diameter));
        c.bench_function(&format!("sequential analysis {n}x{r}"), |b| b.iter(|| Analysis::new_sequential(black_box(&m)).unwrap().diameter()));
    }
}

fn canonical(c: &mut Criterion) {
    let items = sample(8, 4, 8);
    let canon = Canonicalizer::new(8, 4).unwrap();
    c.bench_function("canonical form 8x4", |b| {
        b.iter(|| {
            for chi in &items {
                black_box(canon.canonical(chi).unwrap());
            }
        })
    });
}

fn batch_instance(c: &mut Criterion) {
    let chi = sample(8, 4, 1).remove(0);
    let diam_only = [Check::Axioms, Check::Hirsch].into_iter().collect();
    let all = Check::ALL.into_iter().collect();
    c.bench_function("batch instance 8x4 hirsch", |b| b.iter(|| check_instance(black_box(&chi), 1, &diam_only)));
    c.bench_function("batch instance 8x4 all checks", |b| b.iter(|| check_instance(black_box(&chi), 1, &all)));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = cocircuits, diameter, canonical, batch_instance
}
criterion_main!(benches);
