//! Positivity and atomic-measure recovery for sequences of symmetric matrices.
//!
//! A matrix sequence `S_0, S_1, ..` is a moment sequence when it is produced by
//! a PSD matrix-valued measure. This crate tests the truncated Hamburger,
//! Stieltjes and Hausdorff conditions through block Hankel matrices, finds the
//! minimal linear recurrence of a sequence, and recovers the finitely atomic
//! representing measure when the sequence is recurrent.

pub mod batch;
pub mod error;
pub mod hankel;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod poly;
pub mod recurrence;

mod par;

pub use error::{Error, Result};
pub use hankel::{
    check, check_hamburger, check_hausdorff, check_stieltjes, riesz_eval, MatrixMomentSequence, MomentVerdict,
    ProblemKind,
};
pub use linalg::{is_psd, symmetrize, Matrix, PsdVerdict, SymmetricMatrix, Tolerance};
pub use measure::{
    closed_form_r2, closed_form_r3, decide_sequence, decide_truncated, reconstruct, recover_measure,
    AtomicMatrixMeasure, MeasureOutcome, MeasureReport, TruncatedDecision,
};
pub use poly::{roots, RealPolynomial, Root, RootMultiset};
pub use recurrence::{minimal_polynomial, RecurrenceSpec};
