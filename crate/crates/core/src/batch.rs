//! Independent problems fanned out across worker threads.
//!
//! Every decision procedure is a pure function of its input, so a batch is a
//! plain parallel map. The `_sequential` variants run the same work on the
//! calling thread and exist for comparison and for callers that already
//! parallelize at a coarser level.

use crate::error::Result;
use crate::hankel::{check, MatrixMomentSequence, MomentVerdict, ProblemKind};
use crate::linalg::Tolerance;
use crate::measure::{decide_truncated, TruncatedDecision};
use crate::par;
use crate::recurrence::RecurrenceSpec;

/// Applies `f` to every item, in parallel when the `parallel` feature is on.
pub fn map<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    par::map_slice(items, f)
}

pub fn check_many(seqs: &[MatrixMomentSequence], kind: ProblemKind, tol: &Tolerance) -> Vec<Result<MomentVerdict>> {
    par::map_slice(seqs, |s| check(kind, s, tol))
}

pub fn check_many_sequential(
    seqs: &[MatrixMomentSequence],
    kind: ProblemKind,
    tol: &Tolerance,
) -> Vec<Result<MomentVerdict>> {
    seqs.iter().map(|s| check(kind, s, tol)).collect()
}

pub fn decide_many(specs: &[RecurrenceSpec], tol: &Tolerance) -> Vec<Result<TruncatedDecision>> {
    par::map_slice(specs, |s| decide_truncated(s, tol))
}

pub fn decide_many_sequential(specs: &[RecurrenceSpec], tol: &Tolerance) -> Vec<Result<TruncatedDecision>> {
    specs.iter().map(|s| decide_truncated(s, tol)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymmetricMatrix;

    #[test]
    fn parallel_matches_sequential() {
        let tol = Tolerance::default();
        let specs: Vec<RecurrenceSpec> = (1..=12)
            .map(|k| {
                let a = k as f64 * 0.25;
                RecurrenceSpec::new(
                    vec![1.0 + a, -a],
                    vec![SymmetricMatrix::identity(2), SymmetricMatrix::from_diagonal(&[1.0, a])],
                )
                .unwrap()
            })
            .collect();
        assert_eq!(decide_many(&specs, &tol), decide_many_sequential(&specs, &tol));
        let seqs: Vec<_> = specs.iter().map(|s| s.extend(6)).collect();
        for kind in ProblemKind::ALL {
            assert_eq!(check_many(&seqs, kind, &tol), check_many_sequential(&seqs, kind, &tol));
        }
    }
}
