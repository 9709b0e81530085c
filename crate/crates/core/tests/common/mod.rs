#![allow(dead_code)]

use matmoment::{Matrix, MatrixMomentSequence, SymmetricMatrix};
use matmoment_oracle::{random_gram, random_symmetric, Dense, OracleMeasureSpec};
use rand::Rng;

pub fn sym(d: &Dense) -> SymmetricMatrix {
    SymmetricMatrix::from_rows_checked(d, 0.0).expect("oracle matrices are symmetric")
}

pub fn dense(m: &Matrix) -> Dense {
    m.to_rows()
}

pub fn sequence(moments: &[Dense]) -> MatrixMomentSequence {
    MatrixMomentSequence::new(moments.iter().map(sym).collect()).unwrap()
}

pub fn identity(p: usize) -> Dense {
    (0..p)
        .map(|i| (0..p).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn scale(d: &Dense, c: f64) -> Dense {
    d.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

pub fn max_abs(d: &Dense) -> f64 {
    d.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// `k` sorted nodes in `[lo, hi]` with pairwise gaps of at least `gap`.
pub fn separated_nodes<R: Rng>(rng: &mut R, k: usize, lo: f64, hi: f64, gap: f64) -> Vec<f64> {
    loop {
        let mut x: Vec<f64> = (0..k).map(|_| rng.random_range(lo..=hi)).collect();
        x.sort_by(f64::total_cmp);
        if x.windows(2).all(|w| w[1] - w[0] >= gap) {
            return x;
        }
    }
}

/// PSD weight of random rank with max entry in `[0.5, 2]`.
pub fn psd_weight<R: Rng>(rng: &mut R, p: usize) -> Dense {
    let rank = rng.random_range(1..=p);
    let g = random_gram(rng, p, rank);
    let s = rng.random_range(0.5..2.0) / max_abs(&g);
    scale(&g, s)
}

/// Symmetric weight with at least one clearly negative eigenvalue.
pub fn indefinite_weight<R: Rng>(rng: &mut R, p: usize) -> Dense {
    let mut w = psd_weight(rng, p);
    let i = rng.random_range(0..p);
    w[i][i] -= rng.random_range(2.5..4.0);
    w
}

pub fn random_weight<R: Rng>(rng: &mut R, p: usize) -> Dense {
    let w = random_symmetric(rng, p);
    let s = rng.random_range(0.5..2.0) / max_abs(&w).max(1e-3);
    scale(&w, s)
}

pub fn psd_measure<R: Rng>(rng: &mut R, k: usize, p: usize, window: (f64, f64), gap: f64) -> OracleMeasureSpec {
    let nodes = separated_nodes(rng, k, window.0, window.1, gap);
    let weights = (0..k).map(|_| psd_weight(rng, p)).collect();
    OracleMeasureSpec::new(nodes, weights, window)
}

/// Recurrence coefficients `a_j` with characteristic roots `roots`.
pub fn recurrence_coeffs(roots: &[f64]) -> Vec<f64> {
    let q = matmoment_oracle::poly_from_roots(roots);
    let r = roots.len();
    (0..r).map(|j| -q[r - 1 - j]).collect()
}
