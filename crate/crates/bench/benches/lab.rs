use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use photonsphere::geodesic::{integrate_null_geodesic, NullGeodesicState};
use photonsphere::oracle::fd_curvature_oracle_extrapolated;
use photonsphere::pipeline::{conformal_scan, conformal_transform, double, glue_neck};
use photonsphere::{
    audit_sphere, curvature_at, fd_curvature_oracle, photon_sphere_search, run_pipeline, vacuum_scan, PipelineOptions,
};
use photonsphere_bench::{exterior, family};

fn curvature(c: &mut Criterion) {
    let p = family(1.0);
    c.bench_function("curvature_at", |b| b.iter(|| curvature_at(&p, black_box(7.5)).unwrap()));
    c.bench_function("vacuum_scan_512", |b| b.iter(|| vacuum_scan(&p, black_box(512)).unwrap()));
    c.bench_function("fd_oracle", |b| b.iter(|| fd_curvature_oracle(&p, black_box(7.5), 1e-3).unwrap()));
    c.bench_function("fd_oracle_extrapolated", |b| {
        b.iter(|| fd_curvature_oracle_extrapolated(&p, black_box(7.5), 7.5e-6).unwrap())
    });
}

fn detection(c: &mut Criterion) {
    let p = family(1.0);
    c.bench_function("photon_sphere_search", |b| b.iter(|| photon_sphere_search(black_box(&p))));
    c.bench_function("audit_sphere", |b| b.iter(|| audit_sphere(&p, black_box(3.0)).unwrap()));
    let init = NullGeodesicState::tangent(&p, 4.0).unwrap();
    c.bench_function("null_geodesic_100", |b| {
        b.iter(|| integrate_null_geodesic(&p, black_box(init), 100.0, 1e-12).unwrap())
    });
}

fn pipeline(c: &mut Criterion) {
    let ext = exterior(1.0);
    let cm = conformal_transform(&double(&glue_neck(&ext, 3.0).unwrap()).unwrap()).unwrap();
    let mut g = c.benchmark_group("pipeline");
    g.sample_size(10);
    g.bench_function("conformal_scan_512", |b| b.iter(|| conformal_scan(&cm, black_box(512)).unwrap()));
    g.bench_function("run_pipeline", |b| b.iter(|| run_pipeline(&ext, &PipelineOptions::default()).unwrap()));
    g.finish();
}

criterion_group!(benches, curvature, detection, pipeline);
criterion_main!(benches);
