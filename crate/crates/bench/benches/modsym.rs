use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use splitcartan::catalog::build_catalog;
use splitcartan::curve::involution_ruled_out;
use splitcartan::modsym::{HeckeOperators, ModularSymbolSpace, Sign};
use splitcartan::CatalogOptions;

fn spaces(c: &mut Criterion) {
    let mut g = c.benchmark_group("modular symbols");
    g.sample_size(10);
    g.bench_function("build level 289", |b| b.iter(|| ModularSymbolSpace::build(black_box(289), Sign::Plus).unwrap()));
    let space = Arc::new(ModularSymbolSpace::build(289, Sign::Plus).unwrap());
    g.bench_function("T_13 at level 289", |b| {
        b.iter(|| HeckeOperators::new(space.clone()).hecke(black_box(13)))
    });
    g.finish();
}

fn pipeline(c: &mut Criterion) {
    let mut g = c.benchmark_group("pipeline");
    g.sample_size(10);
    g.bench_function("catalog p = 13", |b| b.iter(|| build_catalog(black_box(13), &CatalogOptions::default()).unwrap()));
    let cat = build_catalog(17, &CatalogOptions::default()).unwrap();
    g.bench_function("parity certificate p = 17", |b| b.iter(|| involution_ruled_out(black_box(&cat), None).unwrap()));
    g.finish();
}

criterion_group!(benches, spaces, pipeline);
criterion_main!(benches);
