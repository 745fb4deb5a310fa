use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use iqp_verify::bitlin::BitVector;
use iqp_verify::evaluators::{correlation_diagonal, output_distribution, DiagonalMode};
use iqp_verify::experiments::exp_fig1b;
use iqp_verify::keygen::{random_program, AnglePolicy};
use iqp_verify::model::IqpProgram;
use iqp_verify::rng;
use rayon::{ThreadPool, ThreadPoolBuilder};

fn pools() -> Vec<(&'static str, ThreadPool)> {
    vec![
        ("sequential", ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("parallel", ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn program(n: usize) -> (IqpProgram, BitVector) {
    let mut r = rng::seeded(1);
    let p = random_program(n, 2 * n, AnglePolicy::UniformPiOver8Multiples, &mut r).unwrap();
    let s = BitVector::random_nonzero(n, &mut r);
    (p, s)
}

fn bench(c: &mut Criterion) {
    let pools = pools();

    let mut group = c.benchmark_group("output_distribution");
    group.sample_size(10);
    for n in [14usize, 18] {
        let (p, _) = program(n);
        for (name, pool) in &pools {
            group.bench_with_input(BenchmarkId::new(*name, n), &p, |b, p| {
                b.iter(|| pool.install(|| output_distribution(p).unwrap()))
            });
        }
    }
    group.finish();

    let mut group = c.benchmark_group("diagonal_monte_carlo");
    group.sample_size(10);
    let (p, s) = program(20);
    let mode = DiagonalMode::MonteCarlo { samples: 200_000, delta: 0.05, seed: 3 };
    for (name, pool) in &pools {
        group.bench_function(*name, |b| b.iter(|| pool.install(|| correlation_diagonal(&p, &s, mode).unwrap())));
    }
    group.finish();

    let mut group = c.benchmark_group("fig1b_batch");
    group.sample_size(10);
    for (name, pool) in &pools {
        group.bench_function(*name, |b| b.iter(|| pool.install(|| exp_fig1b(200, 8, 5).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
