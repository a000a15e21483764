use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::assemble::ModalOperators;
use super::qep::{inv_sqrt_mass, qep_residual, scale_sym, GrowthResult, Method};
use crate::energy::ModalField;
use crate::error::{Error, Result};

/// `alpha(s)`: largest eigenvalue of `(K - s D) x = alpha M x` and its
/// unit-mass maximiser.
pub fn alpha_of_s(ops: &ModalOperators, s: f64) -> Result<(f64, ModalField)> {
    let (a, x) = alpha_vec(ops, s)?;
    Ok((a, ops.field(&x)))
}

fn alpha_vec(ops: &ModalOperators, s: f64) -> Result<(f64, Vec<f64>)> {
    let sc = inv_sqrt_mass(ops)?;
    let pencil = &ops.stiffness - &ops.damping * s;
    let eig = SymmetricEigen::try_new(scale_sym(&pencil, &sc), f64::EPSILON, 0)
        .ok_or_else(|| Error::EigenFailure("symmetric eigensolver did not converge".into()))?;
    let top = eig.eigenvalues.imax();
    let mut x: Vec<f64> = eig.eigenvectors.column(top).iter().zip(&sc).map(|(y, s)| y * s).collect();
    let imax = (0..x.len()).max_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs())).unwrap_or(0);
    if x[imax] < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    Ok((eig.eigenvalues[top], x))
}

fn quad(a: &nalgebra::DMatrix<f64>, x: &[f64]) -> f64 {
    let v = nalgebra::DVector::from_column_slice(x);
    v.dot(&(a * &v))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FixedPointOutcome {
    Growth(GrowthResult),
    /// `alpha(0) <= 0`: no positive growth rate exists.
    Stable { alpha0: f64 },
}

impl FixedPointOutcome {
    pub fn growth(&self) -> Option<&GrowthResult> {
        match self {
            FixedPointOutcome::Growth(g) => Some(g),
            FixedPointOutcome::Stable { .. } => None,
        }
    }

    /// Growth rate, with 0 standing for a stable mode.
    pub fn rate(&self) -> f64 {
        self.growth().map_or(0.0, |g| g.lam.re)
    }
}

/// Solve `Lambda^2 = alpha(Lambda)` for `Lambda > 0`.
///
/// `Phi(s) = s^2 - alpha(s)` is increasing because `alpha' = -x.D x <= 0`.
/// Safeguarded Newton steps stay inside a bisection bracket that starts at
/// `[0, sqrt(alpha(0))]`.
pub fn growth_rate_fixed_point(ops: &ModalOperators, tol: f64) -> Result<FixedPointOutcome> {
    let sc = inv_sqrt_mass(ops)?;
    let knorm = scale_sym(&ops.stiffness, &sc).abs().max();
    let (alpha0, _) = alpha_vec(ops, 0.0)?;
    if alpha0 <= 1e-11 * knorm.max(f64::MIN_POSITIVE) {
        return Ok(FixedPointOutcome::Stable { alpha0 });
    }
    let mut samples = vec![(0.0, alpha0)];
    let (mut lo, mut hi) = (0.0, alpha0.sqrt());
    let mut probe = alpha_vec(ops, hi)?;
    samples.push((hi, probe.0));
    let mut doublings = 0;
    while hi * hi - probe.0 <= 0.0 {
        lo = hi;
        hi *= 2.0;
        probe = alpha_vec(ops, hi)?;
        samples.push((hi, probe.0));
        doublings += 1;
        if doublings > 60 {
            return Err(Error::BracketFailure(format!("Phi stayed negative up to s = {hi}")));
        }
    }
    let (mut s, mut x) = (hi, probe.1);
    let mut a = probe.0;
    for _ in 0..100 {
        let phi = s * s - a;
        if phi > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        let dphi = 2.0 * s + quad(&ops.damping, &x);
        let newton = s - phi / dphi;
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let step = (next - s).abs();
        (a, x) = alpha_vec(ops, next)?;
        samples.push((next, a));
        s = next;
        if step <= 1e-3 * tol * s || hi - lo <= tol * s * 1e-3 {
            break;
        }
    }
    check_monotone(&mut samples, knorm)?;
    let lam = Complex64::new(s, 0.0);
    let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let dnorm = scale_sym(&ops.damping, &sc).abs().max();
    let residual = qep_residual(lam, &xc, ops)? / (s * s + s * dnorm + knorm);
    Ok(FixedPointOutcome::Growth(GrowthResult {
        lam,
        field: ops.field(&x),
        method: Method::FixedPoint,
        residual,
        mode: ops.mode,
        accepted: residual <= tol,
    }))
}

fn check_monotone(samples: &mut [(f64, f64)], scale: f64) -> Result<()> {
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in samples.windows(2) {
        if w[1].1 > w[0].1 + 1e-10 * scale {
            return Err(Error::BracketFailure(format!(
                "alpha increased from {} at s = {} to {} at s = {}",
                w[0].1, w[0].0, w[1].1, w[1].0
            )));
        }
    }
    Ok(())
}
