//! Slow, independent reference computations for cross-checking `matmoment`.
//!
//! Nothing here shares code with the main crate: matrices are plain
//! `Vec<Vec<f64>>`, sums are compensated, and every algorithm is the
//! textbook O(n^2)/O(n^3) version.

use rand::Rng;

pub type Dense = Vec<Vec<f64>>;

/// Finite atomic measure `sum_i weights[i] * delta(nodes[i])` restricted to a support window.
#[derive(Debug, Clone)]
pub struct OracleMeasureSpec {
    pub nodes: Vec<f64>,
    pub weights: Vec<Dense>,
    pub support_window: (f64, f64),
}

impl OracleMeasureSpec {
    pub fn new(nodes: Vec<f64>, weights: Vec<Dense>, support_window: (f64, f64)) -> Self {
        assert_eq!(nodes.len(), weights.len(), "nodes and weights differ in length");
        let (lo, hi) = support_window;
        assert!(nodes.iter().all(|&x| x >= lo && x <= hi), "node outside support window");
        Self {
            nodes,
            weights,
            support_window,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.first().map_or(0, |w| w.len())
    }
}

/// Neumaier-compensated accumulator.
#[derive(Default, Clone, Copy)]
struct Accumulator {
    sum: f64,
    carry: f64,
}

impl Accumulator {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

fn powi_exact(x: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    for _ in 0..k {
        acc *= x;
    }
    acc
}

/// `S_k = sum_i nodes[i]^k * weights[i]` for `k = 0..=n`, by direct summation.
pub fn oracle_moments(spec: &OracleMeasureSpec, n: usize) -> Vec<Dense> {
    let p = spec.dim();
    (0..=n)
        .map(|k| {
            let mut out = vec![vec![0.0; p]; p];
            for (u, row) in out.iter_mut().enumerate() {
                for (v, cell) in row.iter_mut().enumerate() {
                    let mut acc = Accumulator::default();
                    for (x, w) in spec.nodes.iter().zip(&spec.weights) {
                        acc.add(powi_exact(*x, k) * w[u][v]);
                    }
                    *cell = acc.value();
                }
            }
            out
        })
        .collect()
}

fn max_abs(m: &Dense) -> f64 {
    m.iter().flatten().fold(0.0_f64, |a, &b| a.max(b.abs()))
}

fn quad_form(m: &Dense, v: &[f64]) -> f64 {
    let mut acc = Accumulator::default();
    for (i, row) in m.iter().enumerate() {
        for (j, &mij) in row.iter().enumerate() {
            acc.add(v[i] * mij * v[j]);
        }
    }
    acc.value()
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R, p: usize) -> Vec<f64> {
    loop {
        // Box-Muller gives an isotropic direction.
        let v: Vec<f64> = (0..p)
            .map(|_| {
                let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
                let u2: f64 = rng.random();
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Rayleigh-quotient sampling: `false` as soon as a sampled unit vector has
/// `v^T M v < -1e-12 * |M|`. Coordinate axes are always tried first.
pub fn oracle_psd_with<R: Rng + ?Sized>(m: &Dense, trials: usize, rng: &mut R) -> bool {
    assert!(trials >= 1000, "oracle_psd needs at least 1000 trials");
    let p = m.len();
    let threshold = -1e-12 * max_abs(m).max(f64::MIN_POSITIVE);
    for i in 0..p {
        if m[i][i] < threshold {
            return false;
        }
    }
    for _ in 0..trials {
        let v = random_unit(rng, p);
        if quad_form(m, &v) < threshold {
            return false;
        }
    }
    true
}

pub fn oracle_psd(m: &Dense, trials: usize) -> bool {
    oracle_psd_with(m, trials, &mut rand::rng())
}

/// Largest `|s_{n+1} - sum_j coeffs[j] * s_{n-j}|` over all indices where the
/// relation applies.
pub fn oracle_scalar_recurrence(seq: &[f64], coeffs: &[f64]) -> f64 {
    let r = coeffs.len();
    assert!(seq.len() > r, "sequence shorter than recurrence order");
    let mut worst = 0.0_f64;
    for next in r..seq.len() {
        let mut acc = Accumulator::default();
        acc.add(seq[next]);
        for (j, a) in coeffs.iter().enumerate() {
            acc.add(-a * seq[next - 1 - j]);
        }
        worst = worst.max(acc.value().abs());
    }
    worst
}

/// Composite Simpson rule with `intervals` (rounded up to even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut acc = Accumulator::default();
    acc.add(f(a));
    acc.add(f(b));
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(w * f(a + i as f64 * h));
    }
    acc.value() * h / 3.0
}

/// Determinant by cofactor expansion. Only sensible for tiny matrices.
pub fn det(m: &Dense) -> f64 {
    let n = m.len();
    match n {
        0 => 1.0,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            let mut acc = Accumulator::default();
            for col in 0..n {
                let minor: Dense = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != col)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
                acc.add(sign * m[0][col] * det(&minor));
            }
            acc.value()
        }
    }
}

/// All leading principal minors nonnegative is necessary for PSD; for the
/// tiny matrices used in tests combined with Sylvester it is a handy cross-check.
pub fn leading_minors(m: &Dense) -> Vec<f64> {
    (1..=m.len())
        .map(|k| {
            let sub: Dense = m[..k].iter().map(|row| row[..k].to_vec()).collect();
            det(&sub)
        })
        .collect()
}

/// Gaussian elimination with partial pivoting. Panics on a singular matrix.
pub fn gauss_solve(a: &Dense, b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut aug: Dense = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| aug[i][col].abs().total_cmp(&aug[j][col].abs()))
            .unwrap();
        assert!(aug[piv][col].abs() > 0.0, "singular system");
        aug.swap(col, piv);
        for row in col + 1..n {
            let f = aug[row][col] / aug[col][col];
            for k in col..=n {
                aug[row][k] -= f * aug[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = Accumulator::default();
        acc.add(aug[row][n]);
        for k in row + 1..n {
            acc.add(-aug[row][k] * x[k]);
        }
        x[row] = acc.value() / aug[row][row];
    }
    x
}

/// Weights of `sum_i w_i x_i^j = moments[j]` (j < k) by plain elimination on the
/// explicit Vandermonde matrix.
pub fn vandermonde_weights(nodes: &[f64], moments: &[f64]) -> Vec<f64> {
    let k = nodes.len();
    let a: Dense = (0..k)
        .map(|j| nodes.iter().map(|&x| powi_exact(x, j)).collect())
        .collect();
    gauss_solve(&a, &moments[..k])
}

/// Coefficients (ascending) of `prod_i (X - roots[i])`.
pub fn poly_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= r * ci;
        }
        c = next;
    }
    c
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let m = b[0].len();
    let inner = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Accumulator::default();
                    for k in 0..inner {
                        acc.add(a[i][k] * b[k][j]);
                    }
                    acc.value()
                })
                .collect()
        })
        .collect()
}

pub fn transpose(a: &Dense) -> Dense {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|row| row[j]).collect()).collect()
}

/// `G^T G` for a random Gaussian `G` with `rank` rows: a PSD matrix of rank <= `rank`.
pub fn random_gram<R: Rng + ?Sized>(rng: &mut R, p: usize, rank: usize) -> Dense {
    let g: Dense = (0..rank)
        .map(|_| (0..p).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    matmul(&transpose(&g), &g)
}

pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, p: usize) -> Dense {
    let mut m = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in i..p {
            let x = rng.random_range(-1.0..1.0);
            m[i][j] = x;
            m[j][i] = x;
        }
    }
    m
}
