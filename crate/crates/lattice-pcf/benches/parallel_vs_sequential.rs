//! Compares the rayon data-parallel counting paths against the sequential
//! fallbacks on representative workloads. Run with `cargo bench`; build with
//! `--no-default-features` to time the sequential-only crate.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lattice_pcf::graph::{grid_to_graph_with_occupancy, pair_counts_streaming};
use lattice_pcf::lattice::{BoundaryKind, Dims, TessellationKind};
use lattice_pcf::metric::{count_agent_pairs, count_agent_pairs_sequential, MetricKind};
use lattice_pcf::oracle::{brute_site_pairs, verify_normalization, SweepSpec};
use lattice_pcf::pattern::gen_uniform_random;
use num::rational::Ratio;

fn bench_pair_counting(c: &mut Criterion) {
    let grid = gen_uniform_random(
        TessellationKind::Square,
        Dims::d2(100, 100).unwrap(),
        BoundaryKind::Periodic,
        Ratio::new(1, 2),
        42,
    )
    .unwrap();
    let mut group = c.benchmark_group("count_agent_pairs_100x100_d0.5");
    group.sample_size(10);
    for metric in [MetricKind::Taxicab, MetricKind::Uniform] {
        group.bench_with_input(
            BenchmarkId::new("default", metric.label()),
            &metric,
            |b, m| b.iter(|| count_agent_pairs(&grid, m).unwrap()),
        );
        group.bench_with_input(
            BenchmarkId::new("sequential", metric.label()),
            &metric,
            |b, m| b.iter(|| count_agent_pairs_sequential(&grid, m).unwrap()),
        );
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let dims = Dims::d2(12, 12).unwrap();
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("brute_site_pairs_12x12_taxicab", |b| {
        b.iter(|| {
            brute_site_pairs(
                TessellationKind::Square,
                MetricKind::Taxicab,
                BoundaryKind::Periodic,
                &dims,
            )
            .unwrap()
        })
    });
    group.bench_function("sweep_extents_4..6", |b| {
        let spec = SweepSpec {
            planar_extents: (4, 6),
            cube_extents: (4, 4),
            ..SweepSpec::default()
        };
        b.iter(|| verify_normalization(&spec).unwrap())
    });
    group.finish();
}

fn bench_graph_bfs(c: &mut Criterion) {
    let grid = gen_uniform_random(
        TessellationKind::Square,
        Dims::d2(40, 40).unwrap(),
        BoundaryKind::Periodic,
        Ratio::new(2, 5),
        7,
    )
    .unwrap();
    let lattice = grid_to_graph_with_occupancy(&grid).unwrap();
    let mut group = c.benchmark_group("graph");
    group.sample_size(10);
    group.bench_function("streaming_counts_40x40_grid_graph", |b| {
        b.iter(|| pair_counts_streaming(&lattice))
    });
    group.finish();
}

criterion_group!(benches, bench_pair_counting, bench_oracle, bench_graph_bfs);
criterion_main!(benches);
