//! Symmetric tridiagonal pencils: Sturm counts, bisection and inverse
//! iteration.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix; `off[i]` couples rows `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTri {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTri {
    pub fn zeros(n: usize) -> Self {
        Self { diag: vec![0.0; n], off: vec![0.0; n.saturating_sub(1)] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `self + s * other`
    pub fn axpy(&self, s: f64, other: &SymTri) -> SymTri {
        SymTri {
            diag: self.diag.iter().zip(&other.diag).map(|(a, b)| a + s * b).collect(),
            off: self.off.iter().zip(&other.off).map(|(a, b)| a + s * b).collect(),
        }
    }

    pub fn quad(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.len() {
            acc += self.diag[i] * x[i] * x[i];
        }
        for i in 0..self.off.len() {
            acc += 2.0 * self.off[i] * x[i] * x[i + 1];
        }
        acc
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for i in 0..self.off.len() {
            m[(i, i + 1)] = self.off[i];
            m[(i + 1, i)] = self.off[i];
        }
        m
    }

    fn norm_inf(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let l = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let r = self.off.get(i).map_or(0.0, |v| v.abs());
                self.diag[i].abs() + l + r
            })
            .fold(0.0, f64::max)
    }
}

/// Number of eigenvalues of the pencil `(a, b)` strictly above `mu`, with
/// `b` positive definite: the count of positive pivots of `a - mu b`.
pub fn count_above(a: &SymTri, b: &SymTri, mu: f64) -> usize {
    let n = a.len();
    let tiny = f64::MIN_POSITIVE.sqrt() * (1.0 + a.norm_inf() + mu.abs() * b.norm_inf());
    let mut count = 0;
    let mut d = 0.0;
    for i in 0..n {
        let t = a.diag[i] - mu * b.diag[i];
        d = if i == 0 {
            t
        } else {
            let e = a.off[i - 1] - mu * b.off[i - 1];
            t - e * e / d
        };
        if d == 0.0 {
            d = -tiny;
        }
        if d > 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue of `a x = mu b x` by bisection on the Sturm count.
pub fn largest_eigenvalue(a: &SymTri, b: &SymTri) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EigenFailure("empty pencil".into()));
    }
    // Rayleigh quotients on unit vectors give a lower bound
    let mut lo = (0..a.len()).map(|i| a.diag[i] / b.diag[i]).fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() {
        return Err(Error::EigenFailure("mass pencil is not positive definite".into()));
    }
    let mut step = lo.abs().max(1.0);
    let mut hi = lo + step;
    let mut guard = 0;
    while count_above(a, b, hi) > 0 {
        lo = hi;
        step *= 2.0;
        hi += step;
        guard += 1;
        if guard > 200 {
            return Err(Error::EigenFailure("no upper bound for the spectrum".into()));
        }
    }
    lo -= 1e-12 * lo.abs().max(1.0);
    while count_above(a, b, lo) == 0 {
        step = (hi - lo).max(1.0);
        lo -= step;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_above(a, b, mid) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Smallest eigenvalue of `a x = mu b x`.
pub fn smallest_eigenvalue(a: &SymTri, b: &SymTri) -> Result<f64> {
    let neg = SymTri::zeros(a.len()).axpy(-1.0, a);
    Ok(-largest_eigenvalue(&neg, b)?)
}

/// Eigenvector for the eigenvalue `mu` of `(a, b)`, normalised to
/// `x b x = 1` with its largest component positive.
pub fn eigenvector(a: &SymTri, b: &SymTri, mu: f64) -> Result<Vec<f64>> {
    let n = a.len();
    let scale = a.norm_inf() + mu.abs() * b.norm_inf();
    let shift = mu + 1e-10 * scale.max(f64::MIN_POSITIVE);
    let op = a.to_dense() - b.to_dense() * shift;
    let lu = op.lu();
    let bd = b.to_dense();
    let mut x = DVector::from_fn(n, |i, _| 1.0 + 0.1 * ((i * 7919) % 13) as f64);
    for _ in 0..4 {
        let rhs = &bd * &x;
        x = lu.solve(&rhs).ok_or_else(|| Error::EigenFailure("singular shifted pencil".into()))?;
        let nrm = x.dot(&(&bd * &x)).sqrt();
        if !(nrm > 0.0 && nrm.is_finite()) {
            return Err(Error::EigenFailure("inverse iteration broke down".into()));
        }
        x /= nrm;
    }
    let imax = x.iamax();
    if x[imax] < 0.0 {
        x = -x;
    }
    Ok(x.iter().copied().collect())
}
