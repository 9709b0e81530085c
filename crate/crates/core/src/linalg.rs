//! Dense square and symmetric matrices, eigenvalues, and the PSD test.

use std::fmt;
use std::ops::{Deref, Index};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances shared by every decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerance {
    /// Relative eigenvalue floor for PSD decisions.
    pub psd_eps: f64,
    /// Radius under which two polynomial roots are treated as one.
    pub root_eps: f64,
    /// Bound on relative recurrence, symmetry and reconstruction residuals.
    pub residual_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            psd_eps: 1e-9,
            root_eps: 1e-7,
            residual_eps: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(psd_eps: f64, root_eps: f64, residual_eps: f64) -> Result<Self> {
        let tol = Self {
            psd_eps,
            root_eps,
            residual_eps,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("psd_eps", self.psd_eps),
            ("root_eps", self.root_eps),
            ("residual_eps", self.residual_eps),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidTolerance(format!(
                    "{name} must be a finite nonnegative number, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// A dense real square matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix(DMatrix<f64>);

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::NonSquare { rows: 0, cols: 0 });
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NonSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("matrix entries".into()));
        }
        Ok(Self(DMatrix::from_fn(n, n, |i, j| rows[i][j])))
    }

    pub fn from_dmatrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::NonSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        Ok(Self(m))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| 0.0)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.0
            .row_iter()
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |a, &b| a.max(b.abs()))
    }

    /// `max |a_ij - a_ji|`.
    pub fn asymmetry_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(&self.0 * c)
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: f64, other: &Matrix) {
        self.0.zip_apply(&other.0, |a, b| *a += c * b);
    }

    pub fn sub(&self, other: &Matrix) -> Self {
        Self(&self.0 - &other.0)
    }

    pub fn matmul(&self, other: &Matrix) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

impl AsRef<Matrix> for Matrix {
    fn as_ref(&self) -> &Matrix {
        self
    }
}

/// A real symmetric matrix. `m[(i, j)] == m[(j, i)]` holds bit for bit.
#[derive(Clone, PartialEq)]
pub struct SymmetricMatrix(Matrix);

impl fmt::Debug for SymmetricMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl SymmetricMatrix {
    /// `(m + m^T) / 2` together with the asymmetry defect of `m`.
    pub fn symmetrize(m: &Matrix) -> (Self, f64) {
        let defect = m.asymmetry_defect();
        let n = m.dim();
        let sym = Matrix::from_fn(n, |i, j| {
            if i == j {
                m[(i, i)]
            } else {
                // Same operand order for (i,j) and (j,i) keeps the result exactly symmetric.
                let (a, b) = if i < j {
                    (m[(i, j)], m[(j, i)])
                } else {
                    (m[(j, i)], m[(i, j)])
                };
                0.5 * (a + b)
            }
        });
        (Self(sym), defect)
    }

    /// Symmetrizes `m` if its relative asymmetry defect is below `limit`.
    pub fn from_matrix_checked(m: &Matrix, limit: f64) -> Result<Self> {
        let (sym, defect) = Self::symmetrize(m);
        let relative = defect / m.max_abs().max(1.0);
        if relative >= limit && defect > 0.0 {
            return Err(Error::AsymmetricInput {
                defect: relative,
                limit,
            });
        }
        Ok(sym)
    }

    pub fn from_rows_checked(rows: &[Vec<f64>], limit: f64) -> Result<Self> {
        Self::from_matrix_checked(&Matrix::from_rows(rows)?, limit)
    }

    /// Caller guarantees exact symmetry (e.g. linear combinations of symmetric matrices).
    pub(crate) fn new_unchecked(m: Matrix) -> Self {
        debug_assert_eq!(m.asymmetry_defect(), 0.0);
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(Matrix::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(Matrix::zeros(dim))
    }

    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        Self(Matrix::identity(dim).scale(c))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self(Matrix::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { 0.0 }))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(self.0.scale(c))
    }

    /// `sum_i c_i * terms_i`; exact symmetry is preserved by entrywise arithmetic.
    pub fn linear_combination<'a>(dim: usize, terms: impl IntoIterator<Item = (f64, &'a SymmetricMatrix)>) -> Self {
        let mut acc = Matrix::zeros(dim);
        for (c, m) in terms {
            acc.axpy(c, &m.0);
        }
        Self(acc)
    }

    pub fn sub(&self, other: &SymmetricMatrix) -> Self {
        Self(self.0.sub(&other.0))
    }
}

impl Deref for SymmetricMatrix {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}

impl AsRef<Matrix> for SymmetricMatrix {
    fn as_ref(&self) -> &Matrix {
        &self.0
    }
}

/// Symmetrize a raw nested array.
pub fn symmetrize(raw: &[Vec<f64>]) -> Result<(SymmetricMatrix, f64)> {
    let m = Matrix::from_rows(raw)?;
    Ok(SymmetricMatrix::symmetrize(&m))
}

/// Eigenvalues in ascending order with matching unit eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn eigen(m: &SymmetricMatrix) -> Result<Eigen> {
    let dim = m.dim();
    let max_niter = 500 * dim.max(4);
    let eig = SymmetricEigen::try_new(m.as_dmatrix().clone(), f64::EPSILON, max_niter)
        .ok_or(Error::ConvergenceFailure { dim })?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Eigen { values, vectors })
}

pub fn eigenvalues(m: &SymmetricMatrix) -> Result<Vec<f64>> {
    Ok(eigen(m)?.values)
}

pub fn min_eigenvalue(m: &SymmetricMatrix) -> Result<f64> {
    Ok(eigen(m)?.values[0])
}

/// Outcome of a PSD test. `witness` is set only when the test fails.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdVerdict {
    pub psd: bool,
    pub min_eigenvalue: f64,
    /// `psd_eps * max(1, |M|_inf)`; the matrix passes iff `min_eigenvalue >= -threshold`.
    pub threshold: f64,
    pub witness: Option<Witness>,
}

impl PsdVerdict {
    /// Passes, but only because of the tolerance band.
    pub fn is_boundary(&self) -> bool {
        self.psd && self.min_eigenvalue.abs() <= self.threshold
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub eigenvalue: f64,
    pub eigenvector: Vec<f64>,
}

pub fn psd_threshold(m: &Matrix, tol: &Tolerance) -> f64 {
    tol.psd_eps * m.norm_inf().max(1.0)
}

pub fn is_psd(m: &SymmetricMatrix, tol: &Tolerance) -> Result<PsdVerdict> {
    let eig = eigen(m)?;
    let min_eigenvalue = eig.values[0];
    let threshold = psd_threshold(m, tol);
    let psd = min_eigenvalue >= -threshold;
    let witness = (!psd).then(|| Witness {
        eigenvalue: min_eigenvalue,
        eigenvector: eig.vectors.column(0).iter().copied().collect(),
    });
    Ok(PsdVerdict {
        psd,
        min_eigenvalue,
        threshold,
        witness,
    })
}
