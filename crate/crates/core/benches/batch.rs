use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use matmoment::batch::{check_many, check_many_sequential, decide_many, decide_many_sequential};
use matmoment::{ProblemKind, RecurrenceSpec, SymmetricMatrix, Tolerance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Order-`r` recurrences with well separated real roots and random symmetric
/// initial terms.
fn random_specs(count: usize, r: usize, p: usize, seed: u64) -> Vec<RecurrenceSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let roots: Vec<f64> = (0..r).map(|i| -2.0 + i as f64 + rng.random_range(0.0..0.5)).collect();
            let mut q = vec![1.0];
            for &z in &roots {
                let mut next = vec![0.0; q.len() + 1];
                for (i, c) in q.iter().enumerate() {
                    next[i + 1] += c;
                    next[i] -= z * c;
                }
                q = next;
            }
            let coeffs = (0..r).map(|j| -q[r - 1 - j]).collect();
            let initials = (0..r)
                .map(|_| {
                    let mut rows = vec![vec![0.0; p]; p];
                    for i in 0..p {
                        for j in i..p {
                            let x = rng.random_range(-1.0..1.0);
                            rows[i][j] = x;
                            rows[j][i] = x;
                        }
                    }
                    SymmetricMatrix::from_rows_checked(&rows, 0.0).unwrap()
                })
                .collect();
            RecurrenceSpec::new(coeffs, initials).unwrap()
        })
        .collect()
}

fn bench_decide(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut group = c.benchmark_group("decide_truncated");
    for &count in &[16usize, 128] {
        let specs = random_specs(count, 4, 4, 7);
        group.bench_with_input(BenchmarkId::new("parallel", count), &specs, |b, s| {
            b.iter(|| decide_many(black_box(s), &tol))
        });
        group.bench_with_input(BenchmarkId::new("sequential", count), &specs, |b, s| {
            b.iter(|| decide_many_sequential(black_box(s), &tol))
        });
    }
    group.finish();
}

fn bench_check(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut group = c.benchmark_group("check_hausdorff");
    for &count in &[64usize, 512] {
        let seqs: Vec<_> = random_specs(count, 3, 6, 11).iter().map(|s| s.extend(15)).collect();
        group.bench_with_input(BenchmarkId::new("parallel", count), &seqs, |b, s| {
            b.iter(|| check_many(black_box(s), ProblemKind::Hausdorff, &tol))
        });
        group.bench_with_input(BenchmarkId::new("sequential", count), &seqs, |b, s| {
            b.iter(|| check_many_sequential(black_box(s), ProblemKind::Hausdorff, &tol))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_decide, bench_check);
criterion_main!(benches);
