//! Throughput benches for the data-parallel cores.
//!
//! The library parallelizes its channel sweeps and encoder enumerations with
//! rayon behind the default-on `parallel` feature, falling back to identical
//! sequential loops without it. To compare the two backends, run the suite
//! twice and diff the reports:
//!
//! ```text
//! cargo bench -p ampmask
//! cargo bench -p ampmask --no-default-features
//! ```
//!
//! Results are bit-identical across the two runs; only the wall time moves.
//! Configurations are kept small so a full pass stays in the tens of seconds.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ampmask::info::{AuxChannel, JointPmf};
use ampmask::oracle::exhaustive_frontier;
use ampmask::region::{aa_cloud, am_curve_detailed, RatePair};
use ampmask::search::SearchConfig;
use ampmask::sim::{build_codebook, evaluate_exact};

fn skew_joint() -> JointPmf {
    JointPmf::from_matrix("X", "Y", &[vec![1.0 / 3.0, 1.0 / 6.0], vec![0.0, 0.5]])
        .expect("reference joint is valid")
}

/// Tradeoff-curve search: one channel sweep per amplification grid point.
fn bench_am_curve(c: &mut Criterion) {
    let j = skew_joint();
    let rates = RatePair::new(0.4, 0.4).unwrap();
    let cfg = SearchConfig {
        grid_resolution: 8,
        random_samples: 2_000,
        refine_steps: 25,
        ..SearchConfig::default()
    };
    c.bench_function("am_curve/grid8_samples2k_points21", |b| {
        b.iter(|| black_box(am_curve_detailed(&j, rates, &cfg, 3, 21).unwrap()))
    });
}

/// Channel-pair sweep feeding the double-amplification region.
fn bench_aa_cloud(c: &mut Criterion) {
    let j = skew_joint();
    let cfg = SearchConfig {
        grid_resolution: 4,
        random_samples: 1_000,
        refine_steps: 0,
        ..SearchConfig::default()
    };
    c.bench_function("aa_cloud/grid4_samples1k", |b| {
        b.iter(|| black_box(aa_cloud(&j, &cfg).unwrap()))
    });
}

/// Exhaustive two-letter encoder sweep (256 pairs, evaluated exactly).
fn bench_oracle(c: &mut Criterion) {
    let j = skew_joint();
    c.bench_function("oracle/exhaustive_n2_m2", |b| {
        b.iter(|| black_box(exhaustive_frontier(&j, 2, 2, 2).unwrap()))
    });
}

/// Exact single-codebook evaluation (single-threaded by design; a fixed-cost
/// reference point that should not move between the two backends).
fn bench_evaluate(c: &mut Criterion) {
    let j = skew_joint();
    let ch = AuxChannel::from_rows(&[vec![0.75, 0.25], vec![0.25, 0.75]]).unwrap();
    let cb = build_codebook(&j, &ch, 0.2, 0.05, 8, 0).unwrap();
    c.bench_function("simulate/evaluate_exact_n8", |b| {
        b.iter(|| black_box(evaluate_exact(&cb, &j).unwrap()))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_am_curve, bench_aa_cloud, bench_oracle, bench_evaluate
}
criterion_main!(benches);
