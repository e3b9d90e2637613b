use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fpp_bench::{axis_query, exponential_env, models, tail_query};
use fpp_core::estimators::tail_sweep;
use fpp_core::mixing::uniform;
use fpp_core::SearchWorkspace;

fn dijkstra(c: &mut Criterion) {
    let mut g = c.benchmark_group("passage_time");
    for n in [32, 64] {
        let q = axis_query(2, n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &q, |b, q| {
            let mut ws = SearchWorkspace::new();
            let mut seed = 0;
            b.iter(|| {
                seed += 1;
                let env = exponential_env(2, seed);
                black_box(ws.passage_time(&env, q).unwrap().time)
            })
        });
    }
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample");
    for (name, m) in models() {
        g.bench_function(name, |b| {
            let mut key = 0u128;
            b.iter(|| {
                key += 1;
                black_box(m.sample(uniform(7, key)).unwrap())
            })
        });
    }
    g.finish();
}

fn tilted_sweep(c: &mut Criterion) {
    let ns = [16, 24, 32];
    let shifts = [48.0, 72.0, 96.0];
    let q = tail_query(1.0, 16);
    c.bench_function("tail_sweep/tilted_100", |b| {
        b.iter(|| black_box(tail_sweep(&q, &ns, Some((&shifts, 0.5)), 100, 3).unwrap()))
    });
}

criterion_group!(benches, dijkstra, sampling, tilted_sweep);
criterion_main!(benches);
