//! Row reduction and a full symbolic-power computation, each timed on a
//! one-thread rayon pool and on the default pool. Building with
//! `--no-default-features` removes rayon entirely; both groups then run the
//! sequential path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fatlab::ideal::Lab;
use fatlab::linalg;
use fatlab::scalar::{Field, PrimeField, SeedStream};
use fatlab::schemes::SchemeRecipe;

fn dense(field: &PrimeField, rows: usize, cols: usize, seed: u64) -> Vec<Vec<u64>> {
    let mut stream = SeedStream::new(seed);
    (0..rows).map(|_| (0..cols).map(|_| field.random(&mut stream).unwrap()).collect()).collect()
}

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    vec![("sequential", one), ("parallel", all)]
}

fn rref(c: &mut Criterion) {
    let field = PrimeField::default();
    let mut group = c.benchmark_group("rref");
    group.sample_size(10);
    for size in [400usize, 800] {
        let m = dense(&field, size, size + 50, size as u64);
        for (name, pool) in pools() {
            group.bench_with_input(BenchmarkId::new(name, size), &m, |b, m| {
                b.iter(|| pool.install(|| linalg::rref(&field, m.clone(), size + 50).unwrap().rank()))
            });
        }
    }
    group.finish();
}

fn symbolic_alpha(c: &mut Criterion) {
    let field = PrimeField::default();
    let z = SchemeRecipe::general(2, 8, 1).realize(&field).unwrap().scale(6).unwrap();
    let mut group = c.benchmark_group("alpha-general8-m6");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(name, |b| {
            b.iter(|| {
                pool.install(|| {
                    let lab = Lab::new(field, 2).unwrap();
                    lab.scheme(&z).unwrap().alpha().unwrap()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, rref, symbolic_alpha);
criterion_main!(benches);
