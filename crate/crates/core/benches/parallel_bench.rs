//! Parallel vs sequential timings for the data-parallel hot spots: layer
//! assembly and a small end-to-end spectrum. `assemble_layers` dispatches
//! through the crate's parallel shim, so building with
//! `--no-default-features` turns the same bench into the sequential
//! baseline; the residual-grid bench exercises the per-point dispatch.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use steklov_core::closed_forms::Bubble;
use steklov_core::conformal_geometry::{DiskPairDomain, DomainMode};
use steklov_core::fractional_ops::{verify_bubble_residual, QuadratureSpec};
use steklov_core::steklov_solver::{assemble_layers, compute_spectrum, discretize, DomainSpec};

fn bench_assembly(c: &mut Criterion) {
    let mode = if steklov_core::parallel::is_parallel() {
        "parallel"
    } else {
        "sequential"
    };
    let domain = DomainSpec::Pair(DiskPairDomain::new(0.5, DomainMode::Intersection).unwrap());
    let b = discretize(&domain, 16, 3.0).unwrap();
    let mut g = c.benchmark_group("assembly");
    g.sample_size(10);
    g.bench_function(format!("layers_lens_n16/{mode}"), |bench| {
        bench.iter(|| black_box(assemble_layers(&b)))
    });
    g.finish();
}

fn bench_spectrum(c: &mut Criterion) {
    let mode = if steklov_core::parallel::is_parallel() {
        "parallel"
    } else {
        "sequential"
    };
    let b = discretize(&DomainSpec::UnitDisk, 16, 3.0).unwrap();
    let mut g = c.benchmark_group("spectrum");
    g.sample_size(10);
    g.bench_function(format!("disk_n16_k5/{mode}"), |bench| {
        bench.iter(|| black_box(compute_spectrum(&b, 5, 1e-3).unwrap()))
    });
    g.finish();
}

fn bench_residual_grid(c: &mut Criterion) {
    let mode = if steklov_core::parallel::is_parallel() {
        "parallel"
    } else {
        "sequential"
    };
    let bubble = Bubble::singular(0.5, 1.0).unwrap();
    let grid: Vec<f64> = (1..=8).map(|i| 0.3 * i as f64).collect();
    let quad = QuadratureSpec {
        target_tol: 1e-4,
        ..QuadratureSpec::default()
    };
    let mut g = c.benchmark_group("fractional");
    g.sample_size(10);
    g.bench_function(format!("bubble_residual_grid8/{mode}"), |bench| {
        bench.iter(|| black_box(verify_bubble_residual(&bubble, &grid, &quad).unwrap()))
    });
    g.finish();
}

criterion_group!(benches, bench_assembly, bench_spectrum, bench_residual_grid);
criterion_main!(benches);
