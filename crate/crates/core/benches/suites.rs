use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use umtk::check::{run_suite, CheckConfig, Trials};
use umtk::parallel::Exec;

const BENCH_SUITES: [(u8, &str); 4] = [
    (1, "roundtrip"),
    (4, "weak-similarity"),
    (8, "ball-preserving"),
    (10, "hasse-tree-shape"),
];

fn sequential_vs_parallel(c: &mut Criterion) {
    let mut group = c.benchmark_group("check");
    group.sample_size(10);
    for (id, name) in BENCH_SUITES {
        for (label, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
            let config = CheckConfig {
                seed: 0,
                trials: Trials::Count(100),
                max_n: None,
                exec,
            };
            group.bench_with_input(BenchmarkId::new(name, label), &config, |b, config| {
                b.iter(|| black_box(run_suite(id, config).unwrap()))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sequential_vs_parallel);
criterion_main!(benches);
