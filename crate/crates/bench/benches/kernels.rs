use ajm_bench::ft_fixture;
use ajm_core::ak_two::compute_marginals;
use ajm_core::geometry_ft::ft_point;
use ajm_core::three_obs::compute_triple_with;
use ajm_core::{DetectorConfig, KernelTable2, KernelTable3};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn table_build(c: &mut Criterion) {
    let mut g = c.benchmark_group("kernel_table2");
    g.sample_size(10);
    for (s1, s2) in [(0.7, 0.7), (0.1, 3.0)] {
        let cfg = DetectorConfig::two(s1, s2);
        g.bench_function(format!("build_{s1}_{s2}"), |b| b.iter(|| KernelTable2::build(black_box(&cfg)).unwrap()));
    }
    let table = KernelTable2::build(&DetectorConfig::two(0.7, 0.7)).unwrap();
    g.bench_function("marginals_0.7", |b| b.iter(|| compute_marginals(black_box(&table)).unwrap()));
    g.finish();
}

fn ft(c: &mut Criterion) {
    let pts = ft_fixture();
    c.bench_function("ft_point", |b| b.iter(|| ft_point(black_box(&pts)).unwrap()));
}

fn mc(c: &mut Criterion) {
    let mut g = c.benchmark_group("three_detector_mc");
    g.sample_size(10);
    for sig in [[0.7, 0.7, 0.7], [0.5, 0.7, 0.9]] {
        let table = KernelTable3::build(&DetectorConfig::three(sig[0], sig[1], sig[2]).with_mc(1 << 18, 7)).unwrap();
        g.bench_function(format!("triple_{:?}", sig), |b| b.iter(|| compute_triple_with(black_box(&table)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, table_build, ft, mc);
criterion_main!(benches);
