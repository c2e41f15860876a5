use std::hint::black_box;

use cctv_bench::{corners, dataset};
use cctv_core::{route, Mode, RouteConfig, RouteRequest};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_route(c: &mut Criterion) {
    let config = RouteConfig::default();
    let mut group = c.benchmark_group("route");
    for &(side, cameras) in &[(10, 20), (30, 200)] {
        let (_, graph) = dataset(side, cameras);
        let (from, to) = corners(&graph);
        for mode in [Mode::Default, Mode::Privacy, Mode::Safety] {
            let req = RouteRequest { from, to, mode };
            group.bench_with_input(
                BenchmarkId::new(mode.as_str(), format!("{side}x{side}/{cameras}")),
                &req,
                |b, req| b.iter(|| route(black_box(&graph), req, &config).unwrap()),
            );
        }
    }
    group.finish();
}

criterion_group!(benches, bench_route);
criterion_main!(benches);
