//! Finite atomic matrix measures `sum_i T_i delta(lambda_i)`: recovery from a
//! recurrent sequence, the positivity decision, and the closed forms for two
//! and three nodes with `S_0 = I`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hankel::{build_hankel, MatrixMomentSequence};
use crate::linalg::{eigenvalues, is_psd, Matrix, SymmetricMatrix, Tolerance};
use crate::par;
use crate::poly::{roots, RealPolynomial, RootMultiset};
use crate::recurrence::{minimal_polynomial, RecurrenceSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct Atom<W> {
    pub node: f64,
    pub weight: W,
}

/// Atoms sorted by strictly increasing node.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure<W = SymmetricMatrix> {
    dim: usize,
    atoms: Vec<Atom<W>>,
}

pub type AtomicMatrixMeasure = AtomicMeasure<SymmetricMatrix>;
/// Measure with general (possibly non-symmetric) weights.
pub type RawAtomicMeasure = AtomicMeasure<Matrix>;

impl<W: AsRef<Matrix>> AtomicMeasure<W> {
    /// Sorts by node; rejects repeated nodes and mismatched weight dimensions.
    pub fn new(dim: usize, atoms: impl IntoIterator<Item = (f64, W)>) -> Result<Self> {
        let mut atoms: Vec<Atom<W>> = atoms.into_iter().map(|(node, weight)| Atom { node, weight }).collect();
        for a in &atoms {
            if !a.node.is_finite() {
                return Err(Error::NonFinite("measure node".into()));
            }
            if a.weight.as_ref().dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: a.weight.as_ref().dim(),
                });
            }
        }
        atoms.sort_by(|a, b| a.node.total_cmp(&b.node));
        if let Some(w) = atoms.windows(2).find(|w| w[1].node <= w[0].node) {
            return Err(Error::DegenerateNodes {
                gap: w[1].node - w[0].node,
                limit: 0.0,
            });
        }
        Ok(Self { dim, atoms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom<W>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn nodes(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.node).collect()
    }

    /// `S_k = sum_i lambda_i^k T_i` for one `k`.
    pub fn moment(&self, k: usize) -> Matrix {
        let mut acc = Matrix::zeros(self.dim);
        for a in &self.atoms {
            acc.axpy(a.node.powi(k as i32), a.weight.as_ref());
        }
        acc
    }
}

/// `S_0..S_n` of a measure with symmetric weights.
pub fn reconstruct(measure: &AtomicMatrixMeasure, n: usize) -> MatrixMomentSequence {
    let moments = (0..=n)
        .map(|k| SymmetricMatrix::new_unchecked(measure.moment(k)))
        .collect();
    MatrixMomentSequence::new(moments).expect("measure weights share one dimension")
}

/// `S_0..S_n` of a measure with arbitrary square weights.
pub fn reconstruct_raw<W: AsRef<Matrix>>(measure: &AtomicMeasure<W>, n: usize) -> Vec<Matrix> {
    (0..=n).map(|k| measure.moment(k)).collect()
}

/// Largest relative deviation `|S_k - sum_i lambda_i^k T_i| / scale_k` over the
/// given moments, with `scale_k = max(|S_k|, sum_i |lambda_i|^k |T_i|)`.
pub fn reconstruction_residual<W: AsRef<Matrix>, M: AsRef<Matrix>>(measure: &AtomicMeasure<W>, moments: &[M]) -> f64 {
    let mut worst = 0.0_f64;
    for (k, s) in moments.iter().enumerate() {
        let s = s.as_ref();
        let diff = s.sub(&measure.moment(k)).max_abs();
        let model_scale: f64 = measure
            .atoms
            .iter()
            .map(|a| a.node.abs().powi(k as i32) * a.weight.as_ref().max_abs())
            .sum();
        let scale = s.max_abs().max(model_scale);
        if scale > 0.0 {
            worst = worst.max(diff / scale);
        } else if diff > 0.0 {
            worst = f64::INFINITY;
        }
    }
    worst
}

/// Solves `sum_i nodes[i]^j x_i = rhs[j]` (`j = 0..k-1`) in place by
/// Björck-Pereyra elimination. Nodes must be pairwise distinct.
pub fn solve_vandermonde(nodes: &[f64], rhs: &mut [f64]) {
    let n = nodes.len();
    assert_eq!(rhs.len(), n, "right-hand side length must match node count");
    if n == 0 {
        return;
    }
    let last = n - 1;
    for k in 0..last {
        for i in (k + 1..=last).rev() {
            rhs[i] -= nodes[k] * rhs[i - 1];
        }
    }
    for k in (0..last).rev() {
        for i in k + 1..=last {
            rhs[i] /= nodes[i] - nodes[i - k - 1];
        }
        for i in k..last {
            rhs[i] -= rhs[i + 1];
        }
    }
}

/// Infinity-norm condition number of the Vandermonde matrix `(nodes[i]^j)`.
pub fn vandermonde_condition(nodes: &[f64]) -> f64 {
    let n = nodes.len();
    if n == 0 {
        return 1.0;
    }
    // rows of V are indexed by the power j
    let norm_v = (0..n)
        .map(|j| nodes.iter().map(|x| x.abs().powi(j as i32)).sum::<f64>())
        .fold(0.0, f64::max);
    let mut inv_rows = vec![0.0; n];
    for col in 0..n {
        let mut e = vec![0.0; n];
        e[col] = 1.0;
        solve_vandermonde(nodes, &mut e);
        for (row, x) in inv_rows.iter_mut().zip(&e) {
            *row += x.abs();
        }
    }
    let norm_inv = inv_rows.into_iter().fold(0.0, f64::max);
    norm_v * norm_inv
}

/// Distinct real nodes of `p`, or the structured reason they do not exist.
pub fn nodes_from_roots(roots: &RootMultiset) -> Result<Vec<f64>> {
    if let Some(r) = roots.roots.iter().find(|r| r.multiplicity > 1) {
        return Err(Error::RepeatedRoots {
            root: r.re,
            multiplicity: r.multiplicity,
        });
    }
    if let Some(r) = roots.roots.iter().find(|r| !r.is_real()) {
        return Err(Error::ComplexRoots { re: r.re, im: r.im });
    }
    Ok(roots.roots.iter().map(|r| r.re).collect())
}

fn solve_weights<M: AsRef<Matrix> + Sync>(
    moments: &[M],
    nodes: &[f64],
    symmetric: bool,
    tol: &Tolerance,
) -> Result<Vec<Matrix>> {
    let k = nodes.len();
    let dim = moments
        .first()
        .ok_or(Error::InsufficientMoments {
            needed: k.max(1),
            available: 0,
        })?
        .as_ref()
        .dim();
    if moments.len() < k {
        return Err(Error::InsufficientMoments {
            needed: k,
            available: moments.len(),
        });
    }
    let condition = vandermonde_condition(nodes);
    let limit = 1.0 / tol.residual_eps;
    if !(condition <= limit) {
        return Err(Error::IllConditioned { condition, limit });
    }
    let entries: Vec<(usize, usize)> = (0..dim)
        .flat_map(|u| (if symmetric { u } else { 0 }..dim).map(move |v| (u, v)))
        .collect();
    let solved: Vec<Vec<f64>> = par::map_slice(&entries, |&(u, v)| {
        let mut rhs: Vec<f64> = moments[..k].iter().map(|m| m.as_ref()[(u, v)]).collect();
        solve_vandermonde(nodes, &mut rhs);
        rhs
    });
    let mut weights = vec![Matrix::zeros(dim); k];
    for (i, w) in weights.iter_mut().enumerate() {
        let mut rows = w.to_rows();
        for (&(u, v), x) in entries.iter().zip(&solved) {
            rows[u][v] = x[i];
            if symmetric {
                rows[v][u] = x[i];
            }
        }
        *w = Matrix::from_rows(&rows)?;
    }
    Ok(weights)
}

/// Atomic measure on the (distinct, real) roots of `p` reproducing the first
/// `k` moments, `k = deg p`. Later moments are left for validation.
pub fn recover_measure(seq: &MatrixMomentSequence, p: &RealPolynomial, tol: &Tolerance) -> Result<AtomicMatrixMeasure> {
    let nodes = nodes_from_roots(&roots(p, tol)?)?;
    let weights = solve_weights(seq.moments(), &nodes, true, tol)?;
    AtomicMeasure::new(
        seq.dim(),
        nodes
            .into_iter()
            .zip(weights.into_iter().map(SymmetricMatrix::new_unchecked)),
    )
}

/// As [`recover_measure`] for sequences of general square matrices.
pub fn recover_measure_raw<M: AsRef<Matrix> + Sync>(
    seq: &[M],
    p: &RealPolynomial,
    tol: &Tolerance,
) -> Result<RawAtomicMeasure> {
    let nodes = nodes_from_roots(&roots(p, tol)?)?;
    let weights = solve_weights(seq, &nodes, false, tol)?;
    let dim = seq[0].as_ref().dim();
    AtomicMeasure::new(dim, nodes.into_iter().zip(weights))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub measure: AtomicMatrixMeasure,
    pub all_weights_psd: bool,
    /// Verdict on `H(r-1)` for the recurrence order `r` in force.
    pub hankel_psd: bool,
    pub hankel_min_eigenvalue: f64,
    pub hankel_threshold: f64,
    pub reconstruction_residual: f64,
    pub per_atom_min_eig: Vec<f64>,
    pub per_atom_threshold: Vec<f64>,
    /// Atoms whose weight passes only within the PSD tolerance band.
    pub boundary_atoms: Vec<usize>,
}

fn build_report(
    measure: AtomicMatrixMeasure,
    seq: &MatrixMomentSequence,
    order: usize,
    tol: &Tolerance,
) -> Result<MeasureReport> {
    let (hankel_psd, hankel_min_eigenvalue, hankel_threshold) = hankel_verdict(seq, order, tol)?;
    let mut per_atom_min_eig = Vec::with_capacity(measure.len());
    let mut per_atom_threshold = Vec::with_capacity(measure.len());
    let mut boundary_atoms = Vec::new();
    let mut all_weights_psd = true;
    for (i, a) in measure.atoms().iter().enumerate() {
        let v = is_psd(&a.weight, tol)?;
        all_weights_psd &= v.psd;
        if v.is_boundary() {
            boundary_atoms.push(i);
        }
        per_atom_min_eig.push(v.min_eigenvalue);
        per_atom_threshold.push(v.threshold);
    }
    let reconstruction_residual = reconstruction_residual(&measure, seq.moments());
    Ok(MeasureReport {
        measure,
        all_weights_psd,
        hankel_psd,
        hankel_min_eigenvalue,
        hankel_threshold,
        reconstruction_residual,
        per_atom_min_eig,
        per_atom_threshold,
        boundary_atoms,
    })
}

/// `H(order - 1)` verdict as (psd, min eigenvalue, threshold). Order 0 is vacuous.
fn hankel_verdict(seq: &MatrixMomentSequence, order: usize, tol: &Tolerance) -> Result<(bool, f64, f64)> {
    if order == 0 {
        return Ok((true, 0.0, 0.0));
    }
    let h = build_hankel(seq, order - 1, 0)?;
    let v = is_psd(&h.data, tol)?;
    Ok((v.psd, v.min_eigenvalue, v.threshold))
}

/// What the measure side of the decision produced.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureOutcome {
    Recovered(MeasureReport),
    /// The minimal polynomial has a multiple root: no representing measure.
    RepeatedRoots {
        root: f64,
        multiplicity: usize,
    },
    /// A non-real root: no real atomic representing measure.
    ComplexRoots {
        re: f64,
        im: f64,
    },
}

impl MeasureOutcome {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Recovered(_) => "Recovered",
            Self::RepeatedRoots { .. } => "RepeatedRoots",
            Self::ComplexRoots { .. } => "ComplexRoots",
        }
    }
}

/// Both sides of the positivity equivalence for a recurrent sequence:
/// `H(r-1) >= 0` versus "distinct roots and PSD weights".
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedDecision {
    pub order: usize,
    pub minimal_polynomial: RealPolynomial,
    pub roots: RootMultiset,
    pub hankel_psd: bool,
    pub hankel_min_eigenvalue: f64,
    pub hankel_threshold: f64,
    pub outcome: MeasureOutcome,
    /// Distinct real roots and every weight PSD.
    pub admits_psd_measure: bool,
    /// The two sides disagree; only expected at the tolerance boundary.
    pub numerical_disagreement: bool,
    pub diagnostics: Vec<String>,
}

impl TruncatedDecision {
    pub fn report(&self) -> Option<&MeasureReport> {
        match &self.outcome {
            MeasureOutcome::Recovered(r) => Some(r),
            _ => None,
        }
    }
}

fn decide_impl(seq: &MatrixMomentSequence, order: usize, tol: &Tolerance) -> Result<TruncatedDecision> {
    let (hankel_psd, hankel_min_eigenvalue, hankel_threshold) = hankel_verdict(seq, order, tol)?;
    let minimal_polynomial = minimal_polynomial(seq, tol)?;
    let roots = roots(&minimal_polynomial, tol)?;
    let mut diagnostics = Vec::new();
    let outcome = match nodes_from_roots(&roots) {
        Ok(_) => {
            let measure = recover_measure(seq, &minimal_polynomial, tol)?;
            let report = build_report(measure, seq, order, tol)?;
            for &i in &report.boundary_atoms {
                diagnostics.push(format!(
                    "weight at node {} is PSD only within tolerance (min eigenvalue {:e})",
                    report.measure.atoms()[i].node,
                    report.per_atom_min_eig[i]
                ));
            }
            if report.reconstruction_residual > tol.residual_eps {
                diagnostics.push(format!(
                    "reconstruction residual {:e} exceeds residual_eps {:e}",
                    report.reconstruction_residual, tol.residual_eps
                ));
            }
            MeasureOutcome::Recovered(report)
        }
        Err(Error::RepeatedRoots { root, multiplicity }) => MeasureOutcome::RepeatedRoots { root, multiplicity },
        Err(Error::ComplexRoots { re, im }) => MeasureOutcome::ComplexRoots { re, im },
        Err(e) => return Err(e),
    };
    let admits_psd_measure = matches!(&outcome, MeasureOutcome::Recovered(r) if r.all_weights_psd);
    let numerical_disagreement = admits_psd_measure != hankel_psd;
    if numerical_disagreement {
        diagnostics.push(format!(
            "NumericalDisagreement: H({}) psd = {hankel_psd} (min eigenvalue {hankel_min_eigenvalue:e}) \
             but measure side = {admits_psd_measure}",
            order.saturating_sub(1)
        ));
    }
    if hankel_psd && (hankel_min_eigenvalue.abs() <= hankel_threshold) {
        diagnostics.push(format!(
            "H({}) is PSD only within tolerance (min eigenvalue {hankel_min_eigenvalue:e})",
            order.saturating_sub(1)
        ));
    }
    Ok(TruncatedDecision {
        order,
        minimal_polynomial,
        roots,
        hankel_psd,
        hankel_min_eigenvalue,
        hankel_threshold,
        outcome,
        admits_psd_measure,
        numerical_disagreement,
        diagnostics,
    })
}

/// Decide positivity for a recurrence: `H(r-1)` on one side, minimal
/// polynomial, roots and weights on the other.
pub fn decide_truncated(spec: &RecurrenceSpec, tol: &Tolerance) -> Result<TruncatedDecision> {
    let seq = spec.extend(spec.history_len() - 1);
    decide_impl(&seq, spec.order(), tol)
}

/// Same decision for a plain sequence, using the degree of its minimal
/// polynomial as the recurrence order.
pub fn decide_sequence(seq: &MatrixMomentSequence, tol: &Tolerance) -> Result<TruncatedDecision> {
    let order = minimal_polynomial(seq, tol)?.degree();
    decide_impl(seq, order, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub matrix: Vec<Vec<f64>>,
    pub psd: bool,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormReport {
    pub report: MeasureReport,
    /// Matrices whose positivity is equivalent to positivity of the weights.
    pub conditions: Vec<ConditionCheck>,
    /// Two nodes: `lambda_0 I <= S_1 <= lambda_1 I`, tested on the spectrum of `S_1`.
    /// Three nodes: the necessary bounds on `S_1` and `S_2`.
    pub interval_condition: bool,
}

fn check_gaps(nodes: &[f64], tol: &Tolerance) -> Result<()> {
    for w in nodes.windows(2) {
        let gap = w[1] - w[0];
        if !(gap > tol.root_eps) {
            return Err(Error::DegenerateNodes {
                gap,
                limit: tol.root_eps,
            });
        }
    }
    Ok(())
}

fn condition(name: &str, m: &SymmetricMatrix, tol: &Tolerance) -> Result<ConditionCheck> {
    let v = is_psd(m, tol)?;
    Ok(ConditionCheck {
        name: name.to_string(),
        matrix: m.to_rows(),
        psd: v.psd,
        min_eigenvalue: v.min_eigenvalue,
    })
}

/// `lo I <= m <= hi I` on the spectrum of `m`, with the PSD tolerance.
fn spectrum_within(m: &SymmetricMatrix, lo: f64, hi: f64, tol: &Tolerance) -> Result<bool> {
    let ev = eigenvalues(m)?;
    let slack = tol.psd_eps * m.norm_inf().max(lo.abs()).max(hi.abs()).max(1.0);
    Ok(ev[0] >= lo - slack && ev[ev.len() - 1] <= hi + slack)
}

/// Extends `(I, S_1, ..)` with the recurrence whose characteristic roots are `nodes`.
fn sequence_with_roots(mut terms: Vec<SymmetricMatrix>, nodes: &[f64], len: usize) -> Result<MatrixMomentSequence> {
    let q = RealPolynomial::from_roots(nodes);
    let r = q.degree();
    let p = terms[0].dim();
    while terms.len() < len {
        let n = terms.len();
        let next = SymmetricMatrix::linear_combination(p, (0..r).map(|i| (-q.coeffs()[i], &terms[n - r + i])));
        terms.push(next);
    }
    MatrixMomentSequence::new(terms)
}

/// Two nodes `lambda_0 < lambda_1`, `S_0 = I`:
/// `T_0 = (lambda_1 I - S_1) / (lambda_1 - lambda_0)`, `T_1 = (S_1 - lambda_0 I) / (lambda_1 - lambda_0)`.
pub fn closed_form_r2(s1: &SymmetricMatrix, l0: f64, l1: f64, tol: &Tolerance) -> Result<ClosedFormReport> {
    check_gaps(&[l0, l1], tol)?;
    let p = s1.dim();
    let id = SymmetricMatrix::identity(p);
    let upper = SymmetricMatrix::linear_combination(p, [(l1, &id), (-1.0, s1)]);
    let lower = SymmetricMatrix::linear_combination(p, [(1.0, s1), (-l0, &id)]);
    let width = l1 - l0;
    let measure = AtomicMeasure::new(p, [(l0, upper.scale(1.0 / width)), (l1, lower.scale(1.0 / width))])?;
    let seq = sequence_with_roots(vec![id, s1.clone()], &[l0, l1], 3)?;
    let report = build_report(measure, &seq, 2, tol)?;
    Ok(ClosedFormReport {
        report,
        conditions: vec![
            condition("lambda1*I - S1", &upper, tol)?,
            condition("S1 - lambda0*I", &lower, tol)?,
        ],
        interval_condition: spectrum_within(s1, l0, l1, tol)?,
    })
}

/// Three nodes `lambda_0 < lambda_1 < lambda_2`, `S_0 = I`. Each weight is
/// its condition matrix over the positive Lagrange denominator
/// `|prod_{j != i} (lambda_i - lambda_j)|`.
pub fn closed_form_r3(
    s1: &SymmetricMatrix,
    s2: &SymmetricMatrix,
    l0: f64,
    l1: f64,
    l2: f64,
    tol: &Tolerance,
) -> Result<ClosedFormReport> {
    check_gaps(&[l0, l1, l2], tol)?;
    if s2.dim() != s1.dim() {
        return Err(Error::DimensionMismatch {
            expected: s1.dim(),
            found: s2.dim(),
        });
    }
    let p = s1.dim();
    let id = SymmetricMatrix::identity(p);
    let c0 = SymmetricMatrix::linear_combination(p, [(1.0, s2), (-(l1 + l2), s1), (l1 * l2, &id)]);
    let c1 = SymmetricMatrix::linear_combination(p, [(-1.0, s2), (l0 + l2, s1), (-(l0 * l2), &id)]);
    let c2 = SymmetricMatrix::linear_combination(p, [(1.0, s2), (-(l0 + l1), s1), (l0 * l1, &id)]);
    let d0 = (l1 - l0) * (l2 - l0);
    let d1 = (l1 - l0) * (l2 - l1);
    let d2 = (l2 - l0) * (l2 - l1);
    let measure = AtomicMeasure::new(
        p,
        [
            (l0, c0.scale(1.0 / d0)),
            (l1, c1.scale(1.0 / d1)),
            (l2, c2.scale(1.0 / d2)),
        ],
    )?;
    let seq = sequence_with_roots(vec![id, s1.clone(), s2.clone()], &[l0, l1, l2], 5)?;
    let report = build_report(measure, &seq, 3, tol)?;

    let squares = [l0 * l0, l1 * l1, l2 * l2];
    let sq_lo = squares.iter().copied().fold(f64::INFINITY, f64::min);
    let sq_hi = squares.iter().copied().fold(0.0, f64::max);
    let interval_condition = spectrum_within(s1, l0, l2, tol)? && spectrum_within(s2, sq_lo, sq_hi, tol)?;
    Ok(ClosedFormReport {
        report,
        conditions: vec![
            condition("S2 - (lambda1+lambda2)*S1 + lambda1*lambda2*I", &c0, tol)?,
            condition("-S2 + (lambda0+lambda2)*S1 - lambda0*lambda2*I", &c1, tol)?,
            condition("S2 - (lambda0+lambda1)*S1 + lambda0*lambda1*I", &c2, tol)?,
        ],
        interval_condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn sym(rows: Vec<Vec<f64>>) -> SymmetricMatrix {
        SymmetricMatrix::from_rows_checked(&rows, 0.0).unwrap()
    }

    fn assert_close(a: &Matrix, b: &Matrix, eps: f64) {
        let d = a.sub(b).max_abs();
        assert!(d <= eps, "{a:?} vs {b:?} (diff {d:e})");
    }

    #[test]
    fn bjorck_pereyra_matches_hand_solution() {
        let mut rhs = vec![1.0, 0.0, 1.0];
        solve_vandermonde(&[-1.0, 0.0, 1.0], &mut rhs);
        assert_eq!(rhs, vec![0.5, 0.0, 0.5]);

        let nodes: [f64; 4] = [0.5, 2.0, 3.0, -1.0];
        let w: [f64; 4] = [1.0, -2.0, 0.25, 4.0];
        let mut m: Vec<f64> = (0..4)
            .map(|j| nodes.iter().zip(&w).map(|(x, wi)| x.powi(j) * wi).sum())
            .collect();
        solve_vandermonde(&nodes, &mut m);
        for (got, want) in m.iter().zip(&w) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn vandermonde_condition_grows_with_clustering() {
        assert!(vandermonde_condition(&[0.0, 1.0]) < 10.0);
        assert!(vandermonde_condition(&[0.0, 1e-6]) > 1e6);
    }

    #[test]
    fn single_atom_from_constant_sequence() {
        let seq = MatrixMomentSequence::new(vec![SymmetricMatrix::identity(2); 4]).unwrap();
        let m = recover_measure(&seq, &RealPolynomial::linear(1.0), &tol()).unwrap();
        assert_eq!(m.nodes(), vec![1.0]);
        assert_eq!(m.atoms()[0].weight, SymmetricMatrix::identity(2));
        let back = reconstruct(&m, 5);
        assert!(back.moments().iter().all(|s| *s == SymmetricMatrix::identity(2)));
    }

    #[test]
    fn recovery_rejects_repeated_and_complex_roots() {
        let seq = MatrixMomentSequence::scalar(&[1., 2., 3., 4.]).unwrap();
        let sq = RealPolynomial::linear(1.0).pow(2);
        assert!(matches!(
            recover_measure(&seq, &sq, &tol()),
            Err(Error::RepeatedRoots { multiplicity: 2, .. })
        ));
        let circle = RealPolynomial::new(vec![1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            recover_measure(&seq, &circle, &tol()),
            Err(Error::ComplexRoots { .. })
        ));
    }

    #[test]
    fn recovery_rejects_ill_conditioned_nodes() {
        let seq = MatrixMomentSequence::scalar(&[1.0; 10]).unwrap();
        let nodes: Vec<f64> = (1..=10).map(f64::from).collect();
        let p = RealPolynomial::from_roots(&nodes);
        assert!(matches!(
            recover_measure(&seq, &p, &tol()),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn three_node_weights() {
        let s1 = sym(vec![vec![2., -1., 0.], vec![-1., 2., -1.], vec![0., -1., 2.]]);
        let s2 = sym(vec![vec![5., -4., 1.], vec![-4., 6., -4.], vec![1., -4., 5.]]);
        let spec = RecurrenceSpec::new(vec![6.0, -10.0, 4.0], vec![SymmetricMatrix::identity(3), s1, s2]).unwrap();
        let d = decide_truncated(&spec, &tol()).unwrap();
        assert!(d.hankel_psd && d.admits_psd_measure && !d.numerical_disagreement);
        let report = d.report().unwrap();
        let t0 = sym(vec![
            vec![1., SQRT_2, 1.],
            vec![SQRT_2, 2., SQRT_2],
            vec![1., SQRT_2, 1.],
        ])
        .scale(0.25);
        let t1 = sym(vec![vec![1., 0., -1.], vec![0., 0., 0.], vec![-1., 0., 1.]]).scale(0.5);
        let t2 = sym(vec![
            vec![1., -SQRT_2, 1.],
            vec![-SQRT_2, 2., -SQRT_2],
            vec![1., -SQRT_2, 1.],
        ])
        .scale(0.25);
        let atoms = report.measure.atoms();
        for (atom, want) in atoms.iter().zip([&t0, &t1, &t2]) {
            assert_close(&atom.weight, want, 1e-9);
        }
        assert_eq!(report.boundary_atoms, vec![0, 1, 2]);
    }

    #[test]
    fn linear_growth_has_no_measure() {
        let m = sym(vec![vec![1., 1.], vec![1., 1.]]);
        let spec = RecurrenceSpec::new(vec![2.0, -1.0], vec![m.clone(), m.scale(2.0)]).unwrap();
        let d = decide_truncated(&spec, &tol()).unwrap();
        match d.outcome {
            MeasureOutcome::RepeatedRoots { root, multiplicity } => {
                assert!((root - 1.0).abs() < 1e-7);
                assert_eq!(multiplicity, 2);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
        assert!(!d.admits_psd_measure);
    }

    #[test]
    fn geometric_scalar_sequence() {
        let spec = RecurrenceSpec::new(vec![2.0], vec![SymmetricMatrix::identity(1)]).unwrap();
        let d = decide_truncated(&spec, &tol()).unwrap();
        assert!(d.hankel_psd && d.admits_psd_measure);
        let r = d.report().unwrap();
        assert_eq!(r.measure.nodes().len(), 1);
        assert!((r.measure.nodes()[0] - 2.0).abs() < 1e-12);
        assert!((r.measure.atoms()[0].weight[(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_characteristic_roots() {
        // s_{n+1} = -s_{n-1}: roots +-i
        let spec = RecurrenceSpec::new(
            vec![0.0, -1.0],
            vec![SymmetricMatrix::identity(1), SymmetricMatrix::identity(1)],
        )
        .unwrap();
        let d = decide_truncated(&spec, &tol()).unwrap();
        assert!(matches!(d.outcome, MeasureOutcome::ComplexRoots { .. }));
        assert!(!d.hankel_psd && !d.numerical_disagreement);
    }

    #[test]
    fn closed_form_r2_examples() {
        let (l0, l1) = (-1.0, 3.0);
        let mid = SymmetricMatrix::scaled_identity(2, 1.0);
        let r = closed_form_r2(&mid, l0, l1, &tol()).unwrap();
        for a in r.report.measure.atoms() {
            assert_eq!(a.weight, SymmetricMatrix::scaled_identity(2, 0.5));
        }
        assert!(r.report.all_weights_psd && r.interval_condition);

        let top = SymmetricMatrix::scaled_identity(2, l1);
        let r = closed_form_r2(&top, l0, l1, &tol()).unwrap();
        assert_eq!(r.report.measure.atoms()[0].weight, SymmetricMatrix::zeros(2));
        assert_eq!(r.report.measure.atoms()[1].weight, SymmetricMatrix::identity(2));
        assert!(r.report.all_weights_psd);

        let s1 = SymmetricMatrix::from_diagonal(&[-1.0, 1.0]);
        let r = closed_form_r2(&s1, 0.0, 1.0, &tol()).unwrap();
        assert_eq!(
            r.report.measure.atoms()[0].weight,
            SymmetricMatrix::from_diagonal(&[2.0, 0.0])
        );
        assert_eq!(
            r.report.measure.atoms()[1].weight,
            SymmetricMatrix::from_diagonal(&[-1.0, 1.0])
        );
        assert!(!r.report.all_weights_psd && !r.interval_condition);
        assert_eq!(r.report.per_atom_min_eig[1], -1.0);
        assert!(!r.report.hankel_psd);

        assert!(matches!(
            closed_form_r2(&s1, 1.0, 1.0, &tol()),
            Err(Error::DegenerateNodes { .. })
        ));
    }

    #[test]
    fn closed_form_r3_examples() {
        let s1 = sym(vec![vec![2., -1., 0.], vec![-1., 2., -1.], vec![0., -1., 2.]]);
        let s2 = sym(vec![vec![5., -4., 1.], vec![-4., 6., -4.], vec![1., -4., 5.]]);
        let r = closed_form_r3(&s1, &s2, 2.0 - SQRT_2, 2.0, 2.0 + SQRT_2, &tol()).unwrap();
        let expected = [
            vec![vec![1., SQRT_2, 1.], vec![SQRT_2, 2., SQRT_2], vec![1., SQRT_2, 1.]],
            vec![vec![1., 0., -1.], vec![0., 0., 0.], vec![-1., 0., 1.]],
            vec![vec![1., -SQRT_2, 1.], vec![-SQRT_2, 2., -SQRT_2], vec![1., -SQRT_2, 1.]],
        ];
        for (c, want) in r.conditions.iter().zip(&expected) {
            assert!(c.psd);
            let got = Matrix::from_rows(&c.matrix).unwrap();
            assert_close(&got, &Matrix::from_rows(want).unwrap(), 1e-12);
        }
        assert!(r.report.all_weights_psd && r.report.hankel_psd && r.interval_condition);

        let (l0, l1, l2) = (-1.0, 0.5, 2.0);
        let r = closed_form_r3(
            &SymmetricMatrix::scaled_identity(2, l1),
            &SymmetricMatrix::scaled_identity(2, l1 * l1),
            l0,
            l1,
            l2,
            &tol(),
        )
        .unwrap();
        let w: Vec<_> = r.report.measure.atoms().iter().map(|a| a.weight.clone()).collect();
        assert!(w[0].max_abs() < 1e-15 && w[2].max_abs() < 1e-15);
        assert_close(&w[1], &Matrix::identity(2), 1e-15);
        assert!(r.report.all_weights_psd);

        let r = closed_form_r3(
            &SymmetricMatrix::scaled_identity(1, 0.0),
            &SymmetricMatrix::scaled_identity(1, 1.0),
            -1.0,
            0.0,
            1.0,
            &tol(),
        )
        .unwrap();
        let w: Vec<f64> = r.report.measure.atoms().iter().map(|a| a.weight[(0, 0)]).collect();
        assert_eq!(w, vec![0.5, 0.0, 0.5]);
        assert!(r.report.all_weights_psd);
    }

    #[test]
    fn raw_recovery_of_matrix_powers() {
        let a = Matrix::from_rows(&[vec![5., -3.], vec![6., -4.]]).unwrap();
        let mut seq = vec![Matrix::identity(2)];
        for k in 1..6 {
            let next = seq[k - 1].matmul(&a);
            seq.push(next);
        }
        let p = RealPolynomial::new(vec![-2.0, -1.0, 1.0]).unwrap();
        let m = recover_measure_raw(&seq, &p, &tol()).unwrap();
        let want = [
            Matrix::from_rows(&[vec![-1., 1.], vec![-2., 2.]]).unwrap(),
            Matrix::from_rows(&[vec![2., -1.], vec![2., -1.]]).unwrap(),
        ];
        for (atom, w) in m.atoms().iter().zip(&want) {
            assert_close(&atom.weight, w, 1e-12);
        }
        assert!(reconstruction_residual(&m, &seq) < 1e-14);
    }
}
