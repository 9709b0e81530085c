//! Real polynomials and their clustered root multisets.

use std::fmt;

use nalgebra::{Complex, DMatrix, Schur};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Tolerance;

/// Real polynomial with coefficients in ascending order: `c_0 + c_1 X + ... + c_d X^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    /// Trailing zero coefficients are dropped; the zero polynomial is rejected.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("polynomial coefficients".into()));
        }
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::Schema("zero polynomial".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn one() -> Self {
        Self { coeffs: vec![1.0] }
    }

    /// `X - root`.
    pub fn linear(root: f64) -> Self {
        Self {
            coeffs: vec![-root, 1.0],
        }
    }

    /// `prod (X - r)` over real roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots.iter().fold(Self::one(), |acc, &r| acc.mul(&Self::linear(r)))
    }

    /// Monic polynomial with exactly the given roots and multiplicities.
    /// Non-real roots must come in conjugate pairs; only the real part of the
    /// expansion is kept.
    pub fn from_root_multiset(roots: &RootMultiset) -> Self {
        let mut c = vec![Complex::new(1.0, 0.0)];
        for root in &roots.roots {
            let z = Complex::new(root.re, root.im);
            for _ in 0..root.multiplicity {
                let mut next = vec![Complex::new(0.0, 0.0); c.len() + 1];
                for (i, ci) in c.iter().enumerate() {
                    next[i + 1] += ci;
                    next[i] -= z * ci;
                }
                c = next;
            }
        }
        Self {
            coeffs: c.into_iter().map(|z| z.re).collect(),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1.0
    }

    pub fn monic(&self) -> Self {
        let lead = self.leading();
        Self {
            coeffs: self.coeffs.iter().map(|c| c / lead).collect(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex<f64>) -> Complex<f64> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self { coeffs: vec![0.0] };
        }
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }
}

impl fmt::Display for RealPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            match (i, a == 1.0) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => f.write_str("X")?,
                (1, false) => write!(f, "{a}X")?,
                (_, true) => write!(f, "X^{i}")?,
                (_, false) => write!(f, "{a}X^{i}")?,
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

impl Root {
    pub fn is_real(&self) -> bool {
        self.im == 0.0
    }

    pub fn value(&self) -> Complex<f64> {
        Complex::new(self.re, self.im)
    }
}

/// Zeros of a polynomial after clustering. Real roots have `im == 0` exactly.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RootMultiset {
    pub roots: Vec<Root>,
}

impl RootMultiset {
    pub fn degree(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn all_real(&self) -> bool {
        self.roots.iter().all(Root::is_real)
    }

    pub fn all_simple(&self) -> bool {
        self.roots.iter().all(|r| r.multiplicity == 1)
    }

    /// Real root values, ascending, repeated by multiplicity.
    pub fn real_values(&self) -> Vec<f64> {
        self.roots
            .iter()
            .filter(|r| r.is_real())
            .flat_map(|r| std::iter::repeat_n(r.re, r.multiplicity))
            .collect()
    }

    fn sort(&mut self) {
        self.roots
            .sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    }
}

pub(crate) fn root_scale(z: Complex<f64>) -> f64 {
    z.norm().max(1.0)
}

/// Parlett-Reinsch balancing (radix 2) of a square matrix, in place.
fn balance(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let radix = 2.0_f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut c2 = c;
            let g = r / radix;
            while c2 < g {
                f *= radix;
                c2 *= radix * radix;
            }
            let g = r * radix;
            while c2 > g {
                f /= radix;
                c2 /= radix * radix;
            }
            if (c2 + r / (f * f)) / s < 0.95 {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

fn companion_eigenvalues(monic: &RealPolynomial) -> Result<Vec<Complex<f64>>> {
    let d = monic.degree();
    let c = monic.coeffs();
    let mut comp = DMatrix::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        comp[(i, d - 1)] = -c[i];
    }
    balance(&mut comp);
    let schur = Schur::try_new(comp, f64::EPSILON, 1000 * d.max(4)).ok_or(Error::ConvergenceFailure { dim: d })?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Newton steps that are kept only while they reduce `|P(z)|`.
fn polish(p: &RealPolynomial, dp: &RealPolynomial, mut z: Complex<f64>) -> Complex<f64> {
    let mut best = p.eval_complex(z).norm();
    for _ in 0..8 {
        if best == 0.0 {
            break;
        }
        let d = dp.eval_complex(z);
        if d.norm() == 0.0 {
            break;
        }
        let cand = z - p.eval_complex(z) / d;
        let val = p.eval_complex(cand).norm();
        if !(val < best) {
            break;
        }
        z = cand;
        best = val;
    }
    z
}

/// Single-linkage clustering of complex points under the relative radius
/// `eps * max(1, |z|)`. Returns cluster means and sizes.
pub(crate) fn cluster(points: &[Complex<f64>], eps: f64) -> Vec<(Complex<f64>, usize)> {
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let radius = eps * root_scale(points[i]).max(root_scale(points[j]));
            if (points[i] - points[j]).norm() <= radius {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(usize, Complex<f64>, usize)> = Vec::new();
    for i in 0..n {
        let root = find(&mut label, i);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => {
                g.1 += points[i];
                g.2 += 1;
            }
            None => groups.push((root, points[i], 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, sum, count)| (sum / count as f64, count))
        .collect()
}

pub(crate) fn multiset_from_clusters(clusters: Vec<(Complex<f64>, usize)>, eps: f64) -> RootMultiset {
    let mut set = RootMultiset {
        roots: clusters
            .into_iter()
            .map(|(z, multiplicity)| {
                let real = z.im.abs() <= eps * root_scale(z);
                Root {
                    re: z.re,
                    im: if real { 0.0 } else { z.im },
                    multiplicity,
                }
            })
            .collect(),
    };
    set.sort();
    set
}

/// All complex roots of `p` from the eigenvalues of its balanced companion
/// matrix, polished by Newton and clustered within `root_eps`.
pub fn roots(p: &RealPolynomial, tol: &Tolerance) -> Result<RootMultiset> {
    if p.degree() == 0 {
        return Ok(RootMultiset::default());
    }
    let monic = p.monic();
    let dp = monic.derivative();
    let raw = companion_eigenvalues(&monic)?;
    let polished: Vec<Complex<f64>> = raw.into_iter().map(|z| polish(&monic, &dp, z)).collect();
    Ok(multiset_from_clusters(cluster(&polished, tol.root_eps), tol.root_eps))
}
