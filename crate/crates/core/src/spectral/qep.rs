use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::assemble::ModalOperators;
use crate::energy::{ModalField, ModeSpec};
use crate::error::{Error, Result};

/// Largest block size `n` solved through the dense companion matrix.
pub const DENSE_MAX_N: usize = 256;

/// Pairs kept from a dense solve besides those with positive real part.
const KEEP_MIN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Qep,
    FixedPoint,
    Ivp,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Qep => "qep",
            Method::FixedPoint => "fixed_point",
            Method::Ivp => "ivp",
        }
    }
}

/// One growth rate with its eigenfunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthResult {
    pub lam: Complex64,
    /// Unit-mass eigenfunction; for complex `lam` the real part after the
    /// phase is fixed so the largest component is real.
    pub field: ModalField,
    pub method: Method,
    /// Backward error `|r| / ((|lam|^2 |M| + |lam| |D| + |K|) |x|)` in the
    /// mass-scaled norm for the eigen methods, fit RMS for `ivp`.
    pub residual: f64,
    pub mode: ModeSpec,
    pub accepted: bool,
}

/// Output of [`solve_qep`]: eigenpairs by descending real part.
///
/// The dense path keeps every pair with `Re lam > 0` and at least the top
/// eight overall. The iterative path for large grids only returns the
/// largest real eigenvalue and sets `complete = false`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QepSolution {
    pub pairs: Vec<GrowthResult>,
    pub complete: bool,
}

impl QepSolution {
    pub fn top(&self) -> Option<&GrowthResult> {
        self.pairs.first()
    }
}

/// Diagonal of `M^{-1/2}`.
pub(crate) fn inv_sqrt_mass(ops: &ModalOperators) -> Result<Vec<f64>> {
    (0..ops.dim())
        .map(|i| {
            let m = ops.mass[(i, i)];
            if m > 0.0 {
                Ok(1.0 / m.sqrt())
            } else {
                Err(Error::EigenFailure(format!("mass matrix not positive at row {i}")))
            }
        })
        .collect()
}

pub(crate) fn scale_sym(a: &DMatrix<f64>, s: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| s[i] * a[(i, j)] * s[j])
}

fn norm_inf(a: &DMatrix<f64>) -> f64 {
    a.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `|(lam^2 M + lam D - K) x|_{M^-1} / |x|_M`.
pub fn qep_residual(lam: Complex64, x: &[Complex64], ops: &ModalOperators) -> Result<f64> {
    let n = ops.dim();
    assert_eq!(x.len(), n, "vector length does not match the operators");
    let xn: f64 = (0..n).map(|i| ops.mass[(i, i)] * x[i].norm_sqr()).sum::<f64>().sqrt();
    if xn == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut acc = 0.0;
    for i in 0..n {
        let mut r = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let q = lam * lam * ops.mass[(i, j)] + lam * ops.damping[(i, j)] - ops.stiffness[(i, j)];
            r += q * x[j];
        }
        acc += r.norm_sqr() / ops.mass[(i, i)];
    }
    Ok(acc.sqrt() / xn)
}

fn backward_error(lam: Complex64, x: &[Complex64], ops: &ModalOperators, norms: (f64, f64)) -> Result<f64> {
    let r = qep_residual(lam, x, ops)?;
    let l = lam.norm();
    Ok(r / (l * l + l * norms.0 + norms.1).max(f64::MIN_POSITIVE))
}

fn to_field(x: &[Complex64], ops: &ModalOperators) -> ModalField {
    let imax = (0..x.len()).max_by(|&a, &b| x[a].norm().total_cmp(&x[b].norm())).unwrap_or(0);
    let phase = if x[imax].norm() > 0.0 { x[imax].conj() / x[imax].norm() } else { Complex64::new(1.0, 0.0) };
    let re: Vec<f64> = x.iter().map(|v| (v * phase).re).collect();
    ops.field(&re)
}

/// Quadratic eigenproblem `(Lambda^2 M + Lambda D - K) x = 0`.
///
/// Up to [`DENSE_MAX_N`] the problem is scaled by `M^{-1/2}` and the
/// companion matrix `[[0, I], [K~, -D~]]` is diagonalised densely. Larger
/// grids locate the largest real eigenvalue by shift-invert iteration on
/// `Q(s) = s^2 M + s D - K`.
pub fn solve_qep(ops: &ModalOperators, tol: f64) -> Result<QepSolution> {
    if ops.n <= DENSE_MAX_N {
        solve_dense(ops, tol)
    } else {
        solve_shift_invert(ops, tol)
    }
}

fn solve_dense(ops: &ModalOperators, tol: f64) -> Result<QepSolution> {
    let n = ops.dim();
    let s = inv_sqrt_mass(ops)?;
    let kt = scale_sym(&ops.stiffness, &s);
    let dt = scale_sym(&ops.damping, &s);
    let norms = (norm_inf(&dt), norm_inf(&kt));
    let comp = Mat::<f64>::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => 0.0,
        (true, false) => f64::from(u8::from(j - n == i)),
        (false, true) => kt[(i - n, j)],
        (false, false) => -dt[(i - n, j - n)],
    });
    let eig = comp.eigen().map_err(|e| Error::EigenFailure(format!("{e:?}")))?;
    let vals = eig.S().column_vector();
    let vecs = eig.U();
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| vals[b].re.total_cmp(&vals[a].re).then(vals[b].im.total_cmp(&vals[a].im)));
    let mut pairs = Vec::new();
    for (rank, &c) in order.iter().enumerate() {
        let lam = vals[c];
        if rank >= KEEP_MIN && lam.re <= 0.0 {
            break;
        }
        // x = M^{-1/2} y with y the upper half of the companion vector
        let mut x: Vec<Complex64> = (0..n).map(|i| vecs[(i, c)] * s[i]).collect();
        let mn: f64 = (0..n).map(|i| ops.mass[(i, i)] * x[i].norm_sqr()).sum::<f64>().sqrt();
        if mn == 0.0 {
            continue;
        }
        x.iter_mut().for_each(|v| *v /= mn);
        let residual = backward_error(lam, &x, ops, norms)?;
        pairs.push(GrowthResult {
            lam,
            field: to_field(&x, ops),
            method: Method::Qep,
            residual,
            mode: ops.mode,
            accepted: residual <= tol,
        });
    }
    if pairs.is_empty() {
        return Err(Error::EigenFailure("no eigenpairs recovered".into()));
    }
    Ok(QepSolution { pairs, complete: true })
}

fn shifted(ops: &ModalOperators, sigma: f64) -> Mat<f64> {
    let n = ops.dim();
    Mat::from_fn(n, n, |i, j| {
        sigma * sigma * ops.mass[(i, j)] + sigma * ops.damping[(i, j)] - ops.stiffness[(i, j)]
    })
}

fn positive_definite(ops: &ModalOperators, sigma: f64) -> bool {
    shifted(ops, sigma).llt(Side::Lower).is_ok()
}

/// Positive root of `lam^2 m + lam d - k = 0` for the Rayleigh
/// coefficients of `x`.
fn rayleigh_root(ops: &ModalOperators, x: &DVector<f64>) -> Option<f64> {
    let m = x.dot(&(&ops.mass * x));
    let d = x.dot(&(&ops.damping * x));
    let k = x.dot(&(&ops.stiffness * x));
    if k <= 0.0 {
        return None;
    }
    Some(2.0 * k / (d + (d * d + 4.0 * m * k).sqrt()))
}

fn solve_with(a: &Mat<f64>, rhs: &DVector<f64>, spd: bool) -> Option<DVector<f64>> {
    let n = rhs.len();
    let b = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
    let sol = if spd { a.llt(Side::Lower).ok()?.solve(&b) } else { a.partial_piv_lu().solve(&b) };
    let out = DVector::from_fn(n, |i, _| sol[(i, 0)]);
    out.iter().all(|v| v.is_finite()).then_some(out)
}

pub(crate) fn solve_shift_invert(ops: &ModalOperators, tol: f64) -> Result<QepSolution> {
    let n = ops.dim();
    let s = inv_sqrt_mass(ops)?;
    let kt = scale_sym(&ops.stiffness, &s);
    let dt = scale_sym(&ops.damping, &s);
    let norms = (norm_inf(&dt), norm_inf(&kt));
    // Q(0) = -K positive definite means no eigenvalue in [0, inf)
    if positive_definite(ops, 0.0) {
        return Ok(QepSolution { pairs: vec![], complete: false });
    }
    // Q(s) is positive definite exactly for s above the largest real
    // eigenvalue; K~ <= |K~| bounds it by sqrt(|K~|)
    let mut hi = norms.1.sqrt() * (1.0 + 1e-8) + f64::MIN_POSITIVE;
    let mut guard = 0;
    while !positive_definite(ops, hi) {
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            return Err(Error::EigenFailure("no positive-definite shift found".into()));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-3 * hi {
        let mid = 0.5 * (lo + hi);
        if positive_definite(ops, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // inverse iteration at the upper shift, then Rayleigh-functional steps
    let q_hi = shifted(ops, hi);
    let mut x = DVector::from_fn(n, |i, _| 1.0 + 0.01 * (i % 7) as f64);
    for _ in 0..6 {
        let rhs = &ops.mass * &x;
        x = solve_with(&q_hi, &rhs, true).ok_or_else(|| Error::EigenFailure("shift factorisation failed".into()))?;
        let nrm = x.dot(&(&ops.mass * &x)).sqrt();
        x /= nrm;
    }
    let mut lam = rayleigh_root(ops, &x).ok_or_else(|| Error::EigenFailure("no positive Rayleigh root".into()))?;
    for _ in 0..30 {
        let rhs = &ops.mass * &x;
        let Some(y) = solve_with(&shifted(ops, lam), &rhs, false) else { break };
        let nrm = y.dot(&(&ops.mass * &y)).sqrt();
        if !(nrm > 0.0 && nrm.is_finite()) {
            break;
        }
        x = y / nrm;
        let next = rayleigh_root(ops, &x).ok_or_else(|| Error::EigenFailure("Rayleigh root lost".into()))?;
        let done = (next - lam).abs() <= 1e-15 * next.abs();
        lam = next;
        if done {
            break;
        }
    }
    let imax = x.iamax();
    if x[imax] < 0.0 {
        x = -x;
    }
    let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let lam = Complex64::new(lam, 0.0);
    let residual = backward_error(lam, &xc, ops, norms)?;
    let res = GrowthResult {
        lam,
        field: ops.field(x.as_slice()),
        method: Method::Qep,
        residual,
        mode: ops.mode,
        accepted: residual <= tol,
    };
    Ok(QepSolution { pairs: vec![res], complete: false })
}
