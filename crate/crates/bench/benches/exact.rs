use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use splitcartan::exact::factor_int;
use splitcartan_bench::{ramp_series, random_matrix, split_product};

fn charpoly(c: &mut Criterion) {
    let m = random_matrix(16, 1);
    c.bench_function("charpoly 16x16", |b| b.iter(|| black_box(&m).charpoly().unwrap()));
    let m = random_matrix(24, 2);
    c.bench_function("rref 24x24", |b| b.iter(|| black_box(&m).rref()));
}

fn polynomials(c: &mut Criterion) {
    let f = split_product(8);
    c.bench_function("factor degree 12", |b| b.iter(|| factor_int(black_box(&f)).unwrap()));
    c.bench_function("power sums to 80", |b| b.iter(|| black_box(&f).power_sums(80).unwrap()));
}

fn series(c: &mut Criterion) {
    let s = ramp_series(150);
    c.bench_function("series inverse 150", |b| b.iter(|| black_box(&s).inverse().unwrap()));
}

criterion_group!(benches, charpoly, polynomials, series);
criterion_main!(benches);
