//! Block Hankel matrices and the truncated Hamburger / Stieltjes / Hausdorff tests.
//!
//! A sequence `S_0..S_n` is tested at the largest Hankel order that its
//! length allows. Smaller orders are leading principal submatrices of the
//! tested ones, so their positivity follows. A `true` verdict certifies the
//! truncated problem only.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{is_psd, Matrix, SymmetricMatrix, Tolerance};

/// Finite list `S_0..S_n` of symmetric matrices of one common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixMomentSequence {
    dim: usize,
    moments: Vec<SymmetricMatrix>,
}

impl MatrixMomentSequence {
    pub fn new(moments: Vec<SymmetricMatrix>) -> Result<Self> {
        let first = moments.first().ok_or(Error::InsufficientMoments {
            needed: 1,
            available: 0,
        })?;
        let dim = first.dim();
        if let Some(bad) = moments.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { dim, moments })
    }

    /// Scalar (`p = 1`) sequence.
    pub fn scalar(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| SymmetricMatrix::scaled_identity(1, v)).collect())
    }

    /// Symmetrizes each nested array, rejecting asymmetry beyond `residual_eps`.
    pub fn from_rows(rows: &[Vec<Vec<f64>>], tol: &Tolerance) -> Result<Self> {
        let moments = rows
            .iter()
            .map(|m| SymmetricMatrix::from_rows_checked(m, tol.residual_eps))
            .collect::<Result<Vec<_>>>()?;
        Self::new(moments)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.moments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moments.is_empty()
    }

    /// Truncation order `n` (index of the last moment).
    pub fn order(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn moments(&self) -> &[SymmetricMatrix] {
        &self.moments
    }

    pub fn get(&self, k: usize) -> Option<&SymmetricMatrix> {
        self.moments.get(k)
    }

    pub fn into_moments(self) -> Vec<SymmetricMatrix> {
        self.moments
    }

    /// Scalar sequence of entry `(u, v)`.
    pub fn entry(&self, u: usize, v: usize) -> Vec<f64> {
        self.moments.iter().map(|m| m[(u, v)]).collect()
    }

    pub fn truncated(&self, len: usize) -> Self {
        Self {
            dim: self.dim,
            moments: self.moments[..len.min(self.moments.len())].to_vec(),
        }
    }
}

/// `(m+1)p x (m+1)p` block matrix with block `(i, j)` a fixed linear
/// combination of `S_{i+j+shift}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockHankel {
    pub name: String,
    pub block_dim: usize,
    pub blocks_per_side: usize,
    pub data: SymmetricMatrix,
}

impl BlockHankel {
    pub fn block(&self, i: usize, j: usize) -> Matrix {
        let p = self.block_dim;
        Matrix::from_fn(p, |u, v| self.data[(i * p + u, j * p + v)])
    }
}

fn build_combination(
    seq: &MatrixMomentSequence,
    m: usize,
    terms: &[(usize, f64)],
    name: String,
) -> Result<BlockHankel> {
    let max_shift = terms.iter().map(|t| t.0).max().unwrap_or(0);
    let needed = 2 * m + max_shift;
    if needed > seq.order() {
        return Err(Error::InsufficientMoments {
            needed: needed + 1,
            available: seq.len(),
        });
    }
    let p = seq.dim();
    let blocks: Vec<SymmetricMatrix> = (0..=2 * m)
        .map(|k| SymmetricMatrix::linear_combination(p, terms.iter().map(|&(shift, c)| (c, &seq.moments[k + shift]))))
        .collect();
    let side = (m + 1) * p;
    let data = Matrix::from_fn(side, |r, c| blocks[r / p + c / p][(r % p, c % p)]);
    Ok(BlockHankel {
        name,
        block_dim: p,
        blocks_per_side: m + 1,
        data: SymmetricMatrix::new_unchecked(data),
    })
}

/// `H_m` (shift 0), `EH_m` (shift 1) or `E^2 H_m` (shift 2).
pub fn build_hankel(seq: &MatrixMomentSequence, m: usize, shift: usize) -> Result<BlockHankel> {
    let name = match shift {
        0 => format!("H_{m}"),
        1 => format!("EH_{m}"),
        s => format!("E^{s}H_{m}"),
    };
    build_combination(seq, m, &[(shift, 1.0)], name)
}

/// `(E - E^2) H_m`: block `(i, j)` is `S_{i+j+1} - S_{i+j+2}`.
pub fn build_difference_hankel(seq: &MatrixMomentSequence, m: usize) -> Result<BlockHankel> {
    build_combination(seq, m, &[(1, 1.0), (2, -1.0)], format!("(E-E^2)H_{m}"))
}

/// `(I - E) H_m`: block `(i, j)` is `S_{i+j} - S_{i+j+1}`.
pub fn build_complement_hankel(seq: &MatrixMomentSequence, m: usize) -> Result<BlockHankel> {
    build_combination(seq, m, &[(0, 1.0), (1, -1.0)], format!("(I-E)H_{m}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Hamburger,
    Stieltjes,
    Hausdorff,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [Self::Hamburger, Self::Stieltjes, Self::Hausdorff];

    pub fn name(self) -> &'static str {
        match self {
            Self::Hamburger => "hamburger",
            Self::Stieltjes => "stieltjes",
            Self::Hausdorff => "hausdorff",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Failing matrix of a moment check with its most negative eigenpair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub matrix: String,
    pub eigenvalue: f64,
    pub eigenvector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckedMatrix {
    pub matrix: String,
    pub min_eigenvalue: f64,
    pub threshold: f64,
    pub psd: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVerdict {
    pub problem_kind: ProblemKind,
    pub truncation_order: usize,
    pub satisfied: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failing_certificate: Option<Certificate>,
    pub checked: Vec<CheckedMatrix>,
}

fn verdict(
    kind: ProblemKind,
    seq: &MatrixMomentSequence,
    matrices: Vec<BlockHankel>,
    tol: &Tolerance,
) -> Result<MomentVerdict> {
    let mut checked = Vec::with_capacity(matrices.len());
    let mut failing_certificate = None;
    for h in matrices {
        let v = is_psd(&h.data, tol)?;
        if let (None, Some(w)) = (&failing_certificate, v.witness) {
            failing_certificate = Some(Certificate {
                matrix: h.name.clone(),
                eigenvalue: w.eigenvalue,
                eigenvector: w.eigenvector,
            });
        }
        checked.push(CheckedMatrix {
            matrix: h.name,
            min_eigenvalue: v.min_eigenvalue,
            threshold: v.threshold,
            psd: v.psd,
        });
    }
    Ok(MomentVerdict {
        problem_kind: kind,
        truncation_order: seq.order(),
        satisfied: failing_certificate.is_none(),
        failing_certificate,
        checked,
    })
}

/// Support on the real line: `H_m` PSD at `m = floor(n/2)`.
pub fn check_hamburger(seq: &MatrixMomentSequence, tol: &Tolerance) -> Result<MomentVerdict> {
    let n = seq.order();
    let h = build_hankel(seq, n / 2, 0)?;
    verdict(ProblemKind::Hamburger, seq, vec![h], tol)
}

/// Support on `[0, inf)`: `H_m` and `EH_m'` PSD at the largest buildable orders.
pub fn check_stieltjes(seq: &MatrixMomentSequence, tol: &Tolerance) -> Result<MomentVerdict> {
    let n = seq.order();
    if n < 1 {
        return Err(Error::InsufficientMoments {
            needed: 2,
            available: seq.len(),
        });
    }
    let h = build_hankel(seq, n / 2, 0)?;
    let eh = build_hankel(seq, (n - 1) / 2, 1)?;
    verdict(ProblemKind::Stieltjes, seq, vec![h, eh], tol)
}

/// Support on `[0, 1]`.
///
/// Even `n = 2m`: `H_m` and `(E - E^2) H_{m-1}`.
/// Odd `n = 2m + 1`: `EH_m` and `(I - E) H_m`.
pub fn check_hausdorff(seq: &MatrixMomentSequence, tol: &Tolerance) -> Result<MomentVerdict> {
    let n = seq.order();
    if n < 1 {
        return Err(Error::InsufficientMoments {
            needed: 2,
            available: seq.len(),
        });
    }
    let matrices = if n.is_multiple_of(2) {
        let m = n / 2;
        vec![build_hankel(seq, m, 0)?, build_difference_hankel(seq, m - 1)?]
    } else {
        let m = (n - 1) / 2;
        vec![build_hankel(seq, m, 1)?, build_complement_hankel(seq, m)?]
    };
    verdict(ProblemKind::Hausdorff, seq, matrices, tol)
}

pub fn check(kind: ProblemKind, seq: &MatrixMomentSequence, tol: &Tolerance) -> Result<MomentVerdict> {
    match kind {
        ProblemKind::Hamburger => check_hamburger(seq, tol),
        ProblemKind::Stieltjes => check_stieltjes(seq, tol),
        ProblemKind::Hausdorff => check_hausdorff(seq, tol),
    }
}

/// Riesz functional `L_S(P) = sum_k tr(A_k S_k)` for `P = sum_k A_k X^k`.
pub fn riesz_eval(seq: &MatrixMomentSequence, poly_coeffs: &[SymmetricMatrix]) -> Result<f64> {
    if poly_coeffs.len() > seq.len() {
        return Err(Error::DegreeTooHigh {
            degree: poly_coeffs.len() - 1,
            max: seq.order(),
        });
    }
    let p = seq.dim();
    let mut total = 0.0;
    for (a, s) in poly_coeffs.iter().zip(seq.moments()) {
        if a.dim() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: a.dim(),
            });
        }
        for u in 0..p {
            for v in 0..p {
                total += a[(u, v)] * s[(v, u)];
            }
        }
    }
    Ok(total)
}
