//! Rayon fan-out against a plain iterator on the same workloads.
//!
//! Built with `--no-default-features` both sides run sequentially, which
//! gives the overhead of the `par` helpers on their own.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qhe_limits::bits::BitString;
use qhe_limits::par;
use qhe_limits::qhe::{self, SchemeSpec};
use qhe_limits::qmat::trace_distance;
use qhe_limits::qrac;

fn side() -> &'static str {
    if par::is_parallel() {
        "rayon"
    } else {
        "par-fallback"
    }
}

fn seesaw(c: &mut Criterion) {
    let mut g = c.benchmark_group("seesaw_sweep_3to2");
    g.sample_size(10);
    let strings = BitString::all(3);
    let seeds: Vec<u64> = (0..16).collect();
    g.bench_function(BenchmarkId::new(side(), 16), |b| {
        b.iter(|| qrac::seesaw_sweep(3, 2, &strings, 100, &seeds).unwrap())
    });
    g.bench_function(BenchmarkId::new("sequential", 16), |b| {
        b.iter(|| {
            seeds
                .iter()
                .map(|&s| qrac::seesaw_optimize(3, 2, &strings, 100, s).unwrap())
                .collect::<Vec<_>>()
        })
    });
    g.finish();
}

fn pairwise_distances(c: &mut Criterion) {
    let mut g = c.benchmark_group("ciphertext_pairs_qotp3");
    let s = SchemeSpec::QotpPauli { n: 3 }.build().unwrap();
    let states: Vec<_> = BitString::all(3).iter().map(|x| qhe::ciphertext_state(&s, x).unwrap()).collect();
    let pairs: Vec<(usize, usize)> = (0..states.len())
        .flat_map(|i| (i + 1..states.len()).map(move |j| (i, j)))
        .collect();
    g.bench_function(BenchmarkId::new(side(), pairs.len()), |b| {
        b.iter(|| par::map(&pairs, |&(i, j)| trace_distance(&states[i], &states[j]).unwrap()))
    });
    g.bench_function(BenchmarkId::new("sequential", pairs.len()), |b| {
        b.iter(|| {
            pairs
                .iter()
                .map(|&(i, j)| trace_distance(&states[i], &states[j]).unwrap())
                .collect::<Vec<_>>()
        })
    });
    g.finish();
}

fn correctness(c: &mut Criterion) {
    let mut g = c.benchmark_group("check_correctness");
    g.sample_size(10);
    let s = SchemeSpec::Plaintext { n: 2 }.build().unwrap();
    g.bench_function(side(), |b| b.iter(|| qhe::check_correctness(&s).unwrap()));
    g.finish();
}

criterion_group!(benches, seesaw, pairwise_distances, correctness);
criterion_main!(benches);
