//! Compares the sequential and data-parallel execution lanes on the kernels
//! that dominate a run: per-mode sweeps, the paired rotation update, the
//! full nonlinear step, and the sweep job batch.
//!
//! The default build measures the rayon lanes next to their sequential
//! twins; `cargo bench --no-default-features` measures the pure sequential
//! build for the same workloads.

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};
use ddwave::config::{InitialSpec, RunPlan};
use ddwave::exec::{self, for_each_slot_pair_seq, for_each_slot_seq};
use ddwave::propagator::{apply_homogeneous, build_tables, step_exp_midpoint};
use ddwave::runner::run_plan;
use ddwave::symbols::make_preset;
use ddwave::{FieldState, Grid, PhysicalField, SpectrumField, Transform};
use num_complex::Complex64;

#[cfg(feature = "parallel")]
use ddwave::exec::{for_each_slot_pair_par, for_each_slot_par};

/// Sizes straddling `PAR_MIN_LEN`, where the dispatcher switches lanes.
const LANE_SIZES: [usize; 3] = [2048, 8192, 65536];

fn mode_data(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| Complex64::from_polar(1.0, i as f64 * 1e-3))
        .collect()
}

/// Multiplier-style kernel: one complex scale and shift per slot.
fn scale_kernel(i: usize, z: &mut Complex64) {
    *z = *z * Complex64::new(0.999, 1e-4) + Complex64::new(i as f64 * 1e-9, 0.0);
}

/// Rotation-style kernel: the 2x2 mode update used by the homogeneous step.
fn rotate_kernel(i: usize, u: &mut Complex64, v: &mut Complex64) {
    let c = (i as f64).mul_add(1e-6, 0.75);
    let s = 1.0 - c;
    let (a, b) = (*u, *v);
    *u = a * c + b * s;
    *v = b * c - a * s;
}

fn bench_slot_lanes(c: &mut Criterion) {
    let mut group = c.benchmark_group("slot-kernel");
    for n in LANE_SIZES {
        group.throughput(Throughput::Elements(n as u64));
        let data = mode_data(n);
        group.bench_with_input(BenchmarkId::new("sequential", n), &data, |b, data| {
            b.iter_batched_ref(
                || data.clone(),
                |d| for_each_slot_seq(d, scale_kernel),
                BatchSize::LargeInput,
            )
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", n), &data, |b, data| {
            b.iter_batched_ref(
                || data.clone(),
                |d| for_each_slot_par(d, scale_kernel),
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn bench_pair_lanes(c: &mut Criterion) {
    let mut group = c.benchmark_group("pair-kernel");
    for n in LANE_SIZES {
        group.throughput(Throughput::Elements(n as u64));
        let data = (mode_data(n), mode_data(n));
        group.bench_with_input(BenchmarkId::new("sequential", n), &data, |b, data| {
            b.iter_batched_ref(
                || data.clone(),
                |(u, v)| for_each_slot_pair_seq(u, v, rotate_kernel),
                BatchSize::LargeInput,
            )
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", n), &data, |b, data| {
            b.iter_batched_ref(
                || data.clone(),
                |(u, v)| for_each_slot_pair_par(u, v, rotate_kernel),
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn wave_state(n: usize) -> (Transform, FieldState) {
    let grid = Grid::shared(n, 50.0).expect("bench grid");
    let tr = Transform::new(grid.clone());
    let u = PhysicalField::from_fn(grid.clone(), |x| {
        0.5 * (-x * x / 4.0).exp() * (0.3 * x).sin()
    });
    let state = FieldState {
        t: 0.0,
        u_hat: tr.analyze(&u),
        v_hat: SpectrumField::zeros(grid),
    };
    (tr, state)
}

/// The homogeneous rotation goes through the dispatching wrapper, so sizes
/// past `PAR_MIN_LEN` exercise the parallel lane on the default build.
fn bench_homogeneous(c: &mut Criterion) {
    let mut group = c.benchmark_group("homogeneous-step");
    let eq = make_preset("boussinesq").expect("preset");
    for n in [256, 8192, 32768] {
        group.throughput(Throughput::Elements(n as u64));
        let (_, state) = wave_state(n);
        let tab = build_tables(&eq, state.grid(), 1e-3).expect("tables");
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| apply_homogeneous(&state, &tab.full_step()))
        });
    }
    group.finish();
}

/// Full nonlinear step: FFT work dominates, bounding what lane choice can
/// buy at desk scale.
fn bench_nonlinear_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("nonlinear-step");
    let eq = make_preset("boussinesq").expect("preset");
    for n in [256, 2048] {
        group.throughput(Throughput::Elements(n as u64));
        let (tr, state) = wave_state(n);
        let tab = build_tables(&eq, state.grid(), 1e-3).expect("tables");
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| step_exp_midpoint(&tr, &state, &eq, &tab, true).expect("step"))
        });
    }
    group.finish();
}

fn bench_plan(i: usize) -> RunPlan {
    RunPlan {
        grid_n: 64,
        grid_x: 10.0,
        t_end: 0.1,
        initial: InitialSpec {
            amplitude: 0.5,
            ..RunPlan::default().initial
        },
        out_dir: std::env::temp_dir().join(format!("ddwave-bench-{}-{i}", std::process::id())),
        ..RunPlan::default()
    }
}

/// Whole-run granularity: the sweep driver's job batch against a plain
/// sequential map over the same plans.
fn bench_sweep_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep-batch");
    group.sample_size(10);
    let plans: Vec<RunPlan> = (0..4).map(bench_plan).collect();
    group.bench_function("run_jobs", |b| {
        b.iter(|| exec::run_jobs(plans.clone(), |p| run_plan(&p).expect("bench run")))
    });
    group.bench_function("sequential-map", |b| {
        b.iter(|| {
            plans
                .clone()
                .into_iter()
                .map(|p| run_plan(&p).expect("bench run"))
                .collect::<Vec<_>>()
        })
    });
    group.finish();
    for i in 0..4 {
        let _ = std::fs::remove_dir_all(
            std::env::temp_dir().join(format!("ddwave-bench-{}-{i}", std::process::id())),
        );
    }
}

criterion_group!(
    lanes,
    bench_slot_lanes,
    bench_pair_lanes,
    bench_homogeneous,
    bench_nonlinear_step,
    bench_sweep_batch
);
criterion_main!(lanes);
