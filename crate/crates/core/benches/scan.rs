use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;
use weylspec::classifier::{scan_interval, ClassifierConfig, Probe};
use weylspec::exec::Exec;
use weylspec::provider::WeylProvider;
use weylspec::sturm::{CoupledMTildeProvider, CoupledSolver, Potential};
use weylspec::triple::random::{generate, RandomModelOptions};

fn modes() -> [(&'static str, Exec); 2] {
    [("sequential", Exec::sequential()), ("parallel", Exec::parallel(None))]
}

fn bench_scan(c: &mut Criterion, name: &str, p: &dyn WeylProvider, (a, b, step): (f64, f64, f64)) {
    let probes = Probe::basis(p.dim());
    let mut group = c.benchmark_group(name);
    group.sample_size(10);
    for (label, exec) in modes() {
        let cfg = ClassifierConfig { exec, ..ClassifierConfig::default() };
        group.bench_with_input(BenchmarkId::from_parameter(label), &cfg, |bch, cfg| {
            bch.iter(|| black_box(scan_interval(p, a, b, step, &probes, cfg).unwrap()))
        });
    }
    group.finish();
}

fn matrix_scan(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = generate(&mut rng, &RandomModelOptions::cyclic(40, 3)).unwrap();
    bench_scan(c, "matrix_n40_d3", &g.model, (-3.5, 3.5, 0.01));
}

fn well_scan(c: &mut Criterion) {
    let p = CoupledMTildeProvider(CoupledSolver::new(Potential::square_well(10.0, 1.0).unwrap()));
    bench_scan(c, "square_well_m_tilde", &p, (-10.0, 5.0, 0.05));
}

criterion_group!(benches, matrix_scan, well_scan);
criterion_main!(benches);
