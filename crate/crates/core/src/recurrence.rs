//! Matrix sequences generated by a scalar-coefficient linear recurrence,
//! characteristic polynomials, and the minimal polynomial.
//!
//! Entry minimal polynomials come from a degree scan over least-squares fits
//! of the Hankel null-space relation; the matrix minimal polynomial is their
//! lcm, formed on clustered root multisets.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hankel::MatrixMomentSequence;
use crate::linalg::{Matrix, SymmetricMatrix, Tolerance};
use crate::par;
use crate::poly::{multiset_from_clusters, root_scale, roots, RealPolynomial, Root, RootMultiset};

/// Entry roots from different entries are identified when they are within
/// this multiple of `root_eps`.
const MERGE_FACTOR: f64 = 1e3;

/// `S_{n+1} = a_0 S_n + a_1 S_{n-1} + ... + a_{r-1} S_{n-r+1}` for `n >= r - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceSpec<M = SymmetricMatrix> {
    coeffs: Vec<f64>,
    initials: Vec<M>,
}

/// Recurrence over general square matrices (no symmetry requirement).
pub type RawRecurrenceSpec = RecurrenceSpec<Matrix>;

impl<M: AsRef<Matrix> + Clone> RecurrenceSpec<M> {
    pub fn new(coeffs: Vec<f64>, initials: Vec<M>) -> Result<Self> {
        let r = coeffs.len();
        if r == 0 {
            return Err(Error::InvalidRecurrence("order must be at least 1".into()));
        }
        if initials.len() != r {
            return Err(Error::InvalidRecurrence(format!(
                "order {r} needs {r} initial matrices, got {}",
                initials.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("recurrence coefficients".into()));
        }
        if coeffs[r - 1] == 0.0 {
            return Err(Error::InvalidRecurrence(
                "last coefficient a_{r-1} must be nonzero".into(),
            ));
        }
        let dim = initials[0].as_ref().dim();
        if let Some(bad) = initials.iter().find(|m| m.as_ref().dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.as_ref().dim(),
            });
        }
        Ok(Self { coeffs, initials })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn dim(&self) -> usize {
        self.initials[0].as_ref().dim()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn initials(&self) -> &[M] {
        &self.initials
    }

    /// `X^r - a_0 X^{r-1} - ... - a_{r-1}`.
    pub fn characteristic_polynomial(&self) -> RealPolynomial {
        let r = self.order();
        let mut c = vec![0.0; r + 1];
        c[r] = 1.0;
        for (j, a) in self.coeffs.iter().enumerate() {
            c[r - 1 - j] = -a;
        }
        RealPolynomial::new(c).expect("monic polynomial is nonzero")
    }

    /// Number of terms used when extracting the minimal polynomial from a spec.
    pub fn history_len(&self) -> usize {
        4 * self.order()
    }

    /// `S_0..S_n` as general matrices. For `n < r - 1` the initials are truncated.
    pub fn extend_matrices(&self, n: usize) -> Vec<Matrix> {
        let r = self.order();
        let dim = self.dim();
        let mut out: Vec<Matrix> = self.initials.iter().take(n + 1).map(|m| m.as_ref().clone()).collect();
        while out.len() <= n {
            let k = out.len() - 1;
            let mut next = Matrix::zeros(dim);
            for j in 0..r {
                next.axpy(self.coeffs[j], &out[k - j]);
            }
            out.push(next);
        }
        out
    }
}

impl RecurrenceSpec<SymmetricMatrix> {
    /// `S_0..S_n`.
    pub fn extend(&self, n: usize) -> MatrixMomentSequence {
        let moments = self
            .extend_matrices(n)
            .into_iter()
            // entrywise linear combinations of symmetric matrices stay exactly symmetric
            .map(SymmetricMatrix::new_unchecked)
            .collect();
        MatrixMomentSequence::new(moments).expect("initials share one dimension")
    }

    /// Minimal polynomial from `history_len()` terms.
    pub fn minimal_polynomial(&self, tol: &Tolerance) -> Result<RealPolynomial> {
        minimal_polynomial(&self.extend(self.history_len() - 1), tol)
    }
}

impl RecurrenceSpec<Matrix> {
    pub fn minimal_polynomial(&self, tol: &Tolerance) -> Result<RealPolynomial> {
        minimal_polynomial_raw(&self.extend_matrices(self.history_len() - 1), tol)
    }
}

/// Whether `Q(W) S = 0` on every window of the sequence, up to a relative
/// residual of `residual_eps`.
pub fn is_characteristic(seq: &MatrixMomentSequence, q: &RealPolynomial, tol: &Tolerance) -> Result<bool> {
    is_characteristic_raw(seq.moments(), q, tol)
}

pub fn is_characteristic_raw<M: AsRef<Matrix>>(seq: &[M], q: &RealPolynomial, tol: &Tolerance) -> Result<bool> {
    let d = q.degree();
    let needed = (2 * d).max(d + 1);
    if seq.len() < needed {
        return Err(Error::InsufficientTerms {
            degree: d,
            needed,
            available: seq.len(),
        });
    }
    let dim = seq[0].as_ref().dim();
    let c = q.coeffs();
    for k in 0..seq.len() - d {
        let mut acc = Matrix::zeros(dim);
        let mut scale = 0.0;
        for (i, &ci) in c.iter().enumerate() {
            let s = seq[k + i].as_ref();
            acc.axpy(ci, s);
            scale += ci.abs() * s.max_abs();
        }
        if acc.max_abs() > tol.residual_eps * scale {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Least-squares monic fit of degree `d` shared by all `seqs`.
/// Returns the coefficients (ascending, trailing 1) and the worst per-row
/// backward error `|sum q_i s_{k+i}| / sum |q_i s_{k+i}|`.
fn fit_monic(seqs: &[&[f64]], d: usize) -> Option<(Vec<f64>, f64)> {
    let mut rows: Vec<&[f64]> = Vec::new();
    for s in seqs {
        if s.len() <= d {
            continue;
        }
        rows.extend(s.windows(d + 1).filter(|w| w.iter().any(|&x| x != 0.0)));
    }
    if d == 0 {
        return Some((vec![1.0], if rows.is_empty() { 0.0 } else { 1.0 }));
    }
    let q: Vec<f64> = if rows.is_empty() {
        let mut q = vec![0.0; d];
        q.push(1.0);
        q
    } else {
        let a = DMatrix::from_fn(rows.len(), d, |k, i| {
            let scale = rows[k].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            rows[k][i] / scale
        });
        let b = DVector::from_fn(rows.len(), |k, _| {
            let scale = rows[k].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            -rows[k][d] / scale
        });
        if rows.len() < d {
            return None;
        }
        // Householder QR: nalgebra's SVD loses digits on some of these small systems
        let qr = a.qr();
        let r = qr.r();
        let rmax = r.diagonal().amax();
        let floor = rmax * f64::EPSILON * rows.len() as f64;
        if r.diagonal().iter().any(|x| x.abs() <= floor) {
            return None;
        }
        let x = r.solve_upper_triangular(&(qr.q().transpose() * b))?;
        let mut q: Vec<f64> = x.iter().copied().collect();
        q.push(1.0);
        q
    };
    if q.iter().any(|c| !c.is_finite()) {
        return None;
    }
    let mut worst = 0.0_f64;
    for w in &rows {
        let (mut num, mut den) = (0.0, 0.0);
        for (qi, si) in q.iter().zip(w.iter()) {
            num += qi * si;
            den += (qi * si).abs();
        }
        if den > 0.0 {
            worst = worst.max(num.abs() / den);
        }
    }
    Some((q, worst))
}

/// Monic polynomial of least degree generating a scalar sequence: the first
/// degree `d` (with at least `2d + 1` terms available) whose fit has relative
/// residual at most `residual_eps`. The zero sequence gives `1`.
pub fn entry_minimal_polynomial(seq: &[f64], tol: &Tolerance) -> Result<RealPolynomial> {
    if seq.iter().all(|&x| x == 0.0) {
        return Ok(RealPolynomial::one());
    }
    if seq.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("scalar sequence".into()));
    }
    let max_degree = seq.len().saturating_sub(1) / 2;
    let mut best_residual = f64::INFINITY;
    for d in 1..=max_degree {
        if let Some((q, residual)) = fit_monic(&[seq], d) {
            if residual <= tol.residual_eps {
                return RealPolynomial::new(q);
            }
            best_residual = best_residual.min(residual);
        }
    }
    Err(Error::NoRecurrenceFound {
        max_degree,
        best_residual,
    })
}

/// Minimal polynomial of a symmetric sequence (upper-triangle entries suffice).
pub fn minimal_polynomial(seq: &MatrixMomentSequence, tol: &Tolerance) -> Result<RealPolynomial> {
    let p = seq.dim();
    let entries: Vec<(usize, usize)> = (0..p).flat_map(|u| (u..p).map(move |v| (u, v))).collect();
    minimal_polynomial_impl(seq.moments(), &entries, tol)
}

/// Minimal polynomial of a general square-matrix sequence (all `p^2` entries).
pub fn minimal_polynomial_raw<M: AsRef<Matrix> + Sync>(seq: &[M], tol: &Tolerance) -> Result<RealPolynomial> {
    let p = seq
        .first()
        .ok_or(Error::InsufficientMoments {
            needed: 1,
            available: 0,
        })?
        .as_ref()
        .dim();
    let entries: Vec<(usize, usize)> = (0..p).flat_map(|u| (0..p).map(move |v| (u, v))).collect();
    minimal_polynomial_impl(seq, &entries, tol)
}

fn same_root(a: Complex<f64>, b: Complex<f64>, tol: &Tolerance) -> bool {
    (a - b).norm() <= MERGE_FACTOR * tol.root_eps * root_scale(a).max(root_scale(b))
}

/// lcm of root multisets: union of clusters with the largest multiplicity.
pub fn lcm_roots(sets: &[RootMultiset], tol: &Tolerance) -> Result<RootMultiset> {
    let mut merged: Vec<Root> = Vec::new();
    for set in sets {
        let mut matched_in_set: Vec<usize> = Vec::new();
        for root in &set.roots {
            let hits: Vec<usize> = merged
                .iter()
                .enumerate()
                .filter(|(_, m)| same_root(m.value(), root.value(), tol))
                .map(|(i, _)| i)
                .collect();
            match hits.as_slice() {
                [] => {
                    matched_in_set.push(merged.len());
                    merged.push(*root);
                }
                [i] => {
                    if matched_in_set.contains(i) {
                        return Err(Error::InconsistentRoots {
                            detail: format!(
                                "two roots of one entry polynomial match the merged root {}",
                                merged[*i].re
                            ),
                        });
                    }
                    matched_in_set.push(*i);
                    merged[*i].multiplicity = merged[*i].multiplicity.max(root.multiplicity);
                }
                _ => {
                    return Err(Error::InconsistentRoots {
                        detail: format!(
                            "root {}{:+}i is close to {} distinct merged roots",
                            root.re,
                            root.im,
                            hits.len()
                        ),
                    })
                }
            }
        }
    }
    let clusters = merged.into_iter().map(|r| (r.value(), r.multiplicity)).collect();
    // merged roots are already separated, so clustering here only normalizes the layout
    Ok(multiset_from_clusters(clusters, tol.root_eps))
}

fn minimal_polynomial_impl<M: AsRef<Matrix> + Sync>(
    seq: &[M],
    entries: &[(usize, usize)],
    tol: &Tolerance,
) -> Result<RealPolynomial> {
    let scales: Vec<f64> = seq.iter().map(|m| m.as_ref().max_abs()).collect();
    let sequences: Vec<Vec<f64>> = entries
        .iter()
        .map(|&(u, v)| seq.iter().map(|m| m.as_ref()[(u, v)]).collect::<Vec<f64>>())
        .filter(|s| {
            s.iter()
                .zip(&scales)
                .any(|(x, scale)| x.abs() > tol.residual_eps * scale)
        })
        .collect();
    if sequences.is_empty() {
        return Ok(RealPolynomial::one());
    }

    let entry_roots: Vec<Result<RootMultiset>> = par::map_slice(&sequences, |s| {
        let p = entry_minimal_polynomial(s, tol)?;
        roots(&p, tol)
    });
    let entry_roots = entry_roots.into_iter().collect::<Result<Vec<_>>>()?;
    let lcm = lcm_roots(&entry_roots, tol)?;
    let degree = lcm.degree();

    // Re-fit the lcm degree on all entries at once for accurate root values.
    let views: Vec<&[f64]> = sequences.iter().map(Vec::as_slice).collect();
    let (q, residual) = fit_monic(&views, degree).ok_or_else(|| Error::InconsistentRoots {
        detail: format!("degree-{degree} joint fit failed"),
    })?;
    if residual > tol.residual_eps {
        return Err(Error::InconsistentRoots {
            detail: format!("lcm of degree {degree} leaves joint residual {residual:e}"),
        });
    }
    let refined = roots(&RealPolynomial::new(q)?, tol)?;
    let refined_points: Vec<Complex<f64>> = refined
        .roots
        .iter()
        .flat_map(|r| std::iter::repeat_n(r.value(), r.multiplicity))
        .collect();

    let mut sums = vec![(Complex::new(0.0, 0.0), 0usize); lcm.roots.len()];
    for z in refined_points {
        let nearest = lcm
            .roots
            .iter()
            .enumerate()
            .filter(|(_, r)| same_root(r.value(), z, tol))
            .min_by(|a, b| (a.1.value() - z).norm().total_cmp(&(b.1.value() - z).norm()))
            .map(|(i, _)| i)
            .ok_or_else(|| Error::InconsistentRoots {
                detail: format!("joint fit root {}{:+}i matches no entry root", z.re, z.im),
            })?;
        sums[nearest].0 += z;
        sums[nearest].1 += 1;
    }
    let mut final_roots = Vec::with_capacity(lcm.roots.len());
    for (root, (sum, count)) in lcm.roots.iter().zip(sums) {
        if count != root.multiplicity {
            return Err(Error::InconsistentRoots {
                detail: format!(
                    "root {} has multiplicity {} entrywise but {} in the joint fit",
                    root.re, root.multiplicity, count
                ),
            });
        }
        final_roots.push((sum / count as f64, count));
    }
    let set = multiset_from_clusters(final_roots, tol.root_eps);
    Ok(RealPolynomial::from_root_multiset(&set))
}

/// Roots of the entry minimal polynomials, for inspecting the lcm structure.
pub fn entry_root_sets(seq: &MatrixMomentSequence, tol: &Tolerance) -> Result<Vec<RootMultiset>> {
    let p = seq.dim();
    let mut out = Vec::new();
    for u in 0..p {
        for v in u..p {
            let poly = entry_minimal_polynomial(&seq.entry(u, v), tol)?;
            out.push(roots(&poly, tol)?);
        }
    }
    Ok(out)
}
