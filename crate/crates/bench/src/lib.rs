//! Criterion benchmarks for the ray LP, the two-transition search, the
//! locus hull and a small atlas sweep.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion};
use ocs_core::atlas::{build_transition_map, Hemisphere};
use ocs_core::hull::{chromaticity, convex_hull, DEFAULT_COLLINEARITY_EPS};
use ocs_core::probe::{direction_to_target, Prober};
use ocs_core::schrodinger::two_transition_optimal;
use ocs_core::spectral::resample_cmf;
use ocs_core::{CmfSet, SolverConfig, SphericalDirection, Tristimulus, WeightedCmf};

fn ee(step: f64) -> WeightedCmf {
    WeightedCmf::equal_energy(&resample_cmf(&CmfSet::cie1931_2deg(), step).unwrap())
}

pub fn probe_ray(c: &mut Criterion) {
    let mut g = c.benchmark_group("probe_ray");
    for step in [1.0, 5.0, 10.0] {
        let w = ee(step);
        let mut prober = Prober::new(&w, SolverConfig::default());
        let dir = SphericalDirection::new(1.478858, 0.371322).unwrap();
        g.bench_with_input(BenchmarkId::new("checkpoint", step), &dir, |b, &d| {
            b.iter(|| prober.probe_direction(black_box(d)).unwrap())
        });
        let target = Tristimulus::new(10.0, 40.0, 30.0);
        g.bench_with_input(BenchmarkId::new("band-pass", step), &target, |b, &t| {
            b.iter(|| prober.probe_target(black_box(t)).unwrap())
        });
    }
    g.finish();
}

pub fn two_transition(c: &mut Criterion) {
    let mut g = c.benchmark_group("two_transition_optimal");
    for step in [1.0, 5.0, 10.0] {
        let w = ee(step);
        let target = direction_to_target(&w, SphericalDirection::new(1.478858, 0.371322).unwrap());
        g.bench_with_input(BenchmarkId::from_parameter(step), &target, |b, &t| {
            b.iter(|| two_transition_optimal(&w, black_box(t)).unwrap())
        });
    }
    g.finish();
}

pub fn hull(c: &mut Criterion) {
    let points = chromaticity(&CmfSet::cie1931_2deg()).points;
    c.bench_function("convex_hull/1nm", |b| {
        b.iter(|| convex_hull(black_box(&points), DEFAULT_COLLINEARITY_EPS).unwrap())
    });
}

pub fn atlas(c: &mut Criterion) {
    let w = ee(10.0);
    let mut g = c.benchmark_group("atlas");
    g.sample_size(10);
    g.bench_function("upper/10nm/32px", |b| {
        b.iter(|| build_transition_map(&w, Hemisphere::Upper, 32, &SolverConfig::default()).unwrap())
    });
    g.finish();
}
