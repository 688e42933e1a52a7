use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eargen::families::{TwoConnConfig, TwoConnected};
use eargen::parallel::{parallel_run, sequential_run, Split};
use eargen::reconstruction::{EdgeReconstruction, ReconConfig};

fn two_connected(c: &mut Criterion) {
    let mut group = c.benchmark_group("two-connected");
    group.sample_size(10);
    for n in [7, 8] {
        let fam = TwoConnected::new(TwoConnConfig::new(n, None, true).unwrap());
        let one = Split::new(1, 2).unwrap();
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, _| {
            b.iter(|| sequential_run(&fam, &one, false).unwrap().counters.solutions)
        });
        let workers = std::thread::available_parallelism().map_or(2, |p| p.get().max(2));
        let split = Split::new(workers, 2).unwrap();
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| parallel_run(&fam, &split, false).unwrap().counters.solutions)
        });
    }
    group.finish();
}

fn reconstruction(c: &mut Criterion) {
    let mut group = c.benchmark_group("reconstruction");
    group.sample_size(10);
    let fam = EdgeReconstruction::new(ReconConfig::new(8).unwrap());
    let one = Split::new(1, 2).unwrap();
    group.bench_function("sequential/8", |b| b.iter(|| sequential_run(&fam, &one, false).unwrap().counters.solutions));
    let workers = std::thread::available_parallelism().map_or(2, |p| p.get().max(2));
    let split = Split::new(workers, 2).unwrap();
    group.bench_function("parallel/8", |b| b.iter(|| parallel_run(&fam, &split, false).unwrap().counters.solutions));
    group.finish();
}

criterion_group!(benches, two_connected, reconstruction);
criterion_main!(benches);
