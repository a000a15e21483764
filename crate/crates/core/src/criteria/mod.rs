//! Pointwise instability criteria and the variational threshold constants.
//!
//! The suprema over `H^1_0` are largest eigenvalues of pairs of discrete
//! quadratic forms on the staggered grid: zeroth-order terms integrate the
//! midpoint average of the node field, gradient terms use the flux form.
//! These are the same forms the modal operators are built from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{count_above, eigenvector, largest_eigenvalue, smallest_eigenvalue, SymTri};
use crate::profiles::{build_grid, EquilibriumProfile};
use crate::stagger::{avg_form, dot, flux_form, node_avg, node_diff, quad};

mod pointwise;

pub use pointwise::{
    buoyancy_margin, rt_margin, schwarzschild_margin, tserkovnikov_margin, varpi_and_strip_bound,
    StripBound,
};

/// Everything the stability verdict needs from one profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaReport {
    pub schwarzschild_margin: Vec<f64>,
    pub buoyancy: Vec<f64>,
    pub tserkovnikov_margin: Vec<f64>,
    pub rt_margin: Vec<f64>,
    pub varpi: f64,
    pub strip_bound: f64,
    pub strip_stable_sufficient: bool,
    pub kappa: f64,
    pub xi2d: f64,
    pub xi3d: f64,
    pub schwarzschild: bool,
    pub buoyancy_flag: bool,
    pub tserkovnikov: bool,
    pub rayleigh_taylor: bool,
}

/// Evaluate every criterion. `strip` is the `x1` extent `(a, b)` used for
/// the sufficient stability bound and `l2` the transverse period length.
pub fn evaluate_criteria(prof: &EquilibriumProfile, strip: (f64, f64), l2: f64) -> Result<CriteriaReport> {
    let (schwarzschild_margin, schwarzschild) = schwarzschild_margin(prof);
    let (buoyancy, buoyancy_flag) = buoyancy_margin(prof);
    let (tserkovnikov_margin, tserkovnikov) = tserkovnikov_margin(prof);
    let (rt_margin, rayleigh_taylor) = rt_margin(prof);
    let sb = varpi_and_strip_bound(prof, strip.0, strip.1)?;
    Ok(CriteriaReport {
        schwarzschild_margin,
        buoyancy,
        tserkovnikov_margin,
        rt_margin,
        varpi: sb.varpi,
        strip_bound: sb.bound,
        strip_stable_sufficient: sb.sufficient,
        kappa: kappa(prof)?,
        xi2d: xi_2d(prof)?,
        xi3d: xi_3d(prof, l2)?,
        schwarzschild,
        buoyancy_flag,
        tserkovnikov,
        rayleigh_taylor,
    })
}

/// `sup sqrt(int psi^2 / int |psi'|^2)` over `H^1_0(a, b)`, from the
/// smallest eigenvalue of the second-difference operator on `n` nodes.
pub fn poincare_ratio(a: f64, b: f64, n: usize) -> Result<f64> {
    let grid = build_grid(a, b, n)?;
    let h2 = grid.h * grid.h;
    let lap = SymTri { diag: vec![2.0 / h2; n], off: vec![-1.0 / h2; n - 1] };
    let id = SymTri { diag: vec![1.0; n], off: vec![0.0; n - 1] };
    Ok(1.0 / smallest_eigenvalue(&lap, &id)?.sqrt())
}

/// `sqrt` of the top pencil eigenvalue, 0 unless the numerator form is
/// positive somewhere.
fn top_root(a: &SymTri, b: &SymTri) -> Result<f64> {
    if count_above(a, b, 0.0) == 0 {
        return Ok(0.0);
    }
    Ok(largest_eigenvalue(a, b)?.sqrt())
}

fn mid_weight(prof: &EquilibriumProfile) -> Vec<f64> {
    (0..prof.mids.len()).map(|k| prof.mids.weight(prof.params.gamma, k)).collect()
}

fn mid_lambda_m2(prof: &EquilibriumProfile) -> Vec<f64> {
    (0..prof.mids.len()).map(|k| prof.params.lambda * prof.mids.m2(k)).collect()
}

/// `kappa(l)`: square root of the top eigenvalue of
/// `int W psi^2` against `int lambda m^2 |psi'|^2`, or 0 when that is not
/// positive. `W = g^2 rho^2 / (gamma P) + g rho'`.
pub fn kappa(prof: &EquilibriumProfile) -> Result<f64> {
    prof.require_field()?;
    let h = prof.grid.h;
    let a = avg_form(&mid_weight(prof), h);
    let b = flux_form(&mid_lambda_m2(prof), h);
    top_root(&a, &b)
}

/// `xi_2D`: top eigenvalue of `int (W psi^2 - lambda m^2 |psi'|^2)` against
/// `int lambda m^2 psi^2`.
pub fn xi_2d(prof: &EquilibriumProfile) -> Result<f64> {
    prof.require_field()?;
    let h = prof.grid.h;
    let lm2 = mid_lambda_m2(prof);
    let a = avg_form(&mid_weight(prof), h).axpy(-1.0, &flux_form(&lm2, h));
    let b = avg_form(&lm2, h);
    top_root(&a, &b)
}

/// Reduced form `Q_{xi1}` whose positivity for some `psi` means the mode
/// `xi1` can be destabilised.
pub fn reduced_form(prof: &EquilibriumProfile, xi1: f64, l2: f64) -> SymTri {
    let h = prof.grid.h;
    let x2 = xi1 * xi1;
    let lm2 = mid_lambda_m2(prof);
    let w = mid_weight(prof);
    let zero_order: Vec<f64> = w.iter().zip(&lm2).map(|(w, c)| w - x2 * c).collect();
    let tension: Vec<f64> = lm2.iter().map(|c| c * x2 / (x2 + 1.0 / (l2 * l2))).collect();
    avg_form(&zero_order, h).axpy(-1.0, &flux_form(&tension, h))
}

fn node_mass(n: usize, h: f64) -> SymTri {
    SymTri { diag: vec![h; n], off: vec![0.0; n.saturating_sub(1)] }
}

fn form_positive(prof: &EquilibriumProfile, xi1: f64, l2: f64) -> bool {
    let q = reduced_form(prof, xi1, l2);
    count_above(&q, &node_mass(q.len(), prof.grid.h), 0.0) > 0
}

/// `xi_3D`: the supremum of `xi1 > 0` for which `Q_{xi1}` is positive on
/// some discrete `psi`, located by bisection. Returns 0 when even the
/// field-free weight form is nonpositive.
pub fn xi_3d(prof: &EquilibriumProfile, l2: f64) -> Result<f64> {
    prof.require_field()?;
    if !(l2 > 0.0) {
        return Err(Error::InvalidParams(format!("L2 must be positive, got {l2}")));
    }
    if !form_positive(prof, 0.0, l2) {
        return Ok(0.0);
    }
    let lm2 = mid_lambda_m2(prof);
    let w = mid_weight(prof);
    let ratio = w.iter().zip(&lm2).map(|(w, c)| w / c).fold(0.0, f64::max);
    let mut lo = 0.0;
    let mut hi = ratio.sqrt() * (1.0 + 1e-12);
    if !(hi > 0.0) || form_positive(prof, hi, l2) {
        return Err(Error::BisectionFailure(format!("invalid bracket [0, {hi}]")));
    }
    for _ in 0..48 {
        let mid = 0.5 * (lo + hi);
        if form_positive(prof, mid, l2) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-8 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Top eigenvector of `Q_{xi1}` (node values, unit `int psi^2`), a witness
/// that the reduced form is positive when `xi1 < xi_3D`.
pub fn reduced_form_maximizer(prof: &EquilibriumProfile, xi1: f64, l2: f64) -> Result<(f64, Vec<f64>)> {
    let q = reduced_form(prof, xi1, l2);
    let b = node_mass(q.len(), prof.grid.h);
    let top = largest_eigenvalue(&q, &b)?;
    Ok((top, eigenvector(&q, &b, top)?))
}

/// Closed-form threshold for one test function: the positive root in
/// `xi1^2` of `Q_{xi1}(psi) = 0`, written through `chi(psi)`.
pub fn xi_3d_of_psi(prof: &EquilibriumProfile, psi: &[f64], l2: f64) -> Result<f64> {
    let h = prof.grid.h;
    let avg = node_avg(psi);
    let dif = node_diff(psi, h);
    let lm2 = mid_lambda_m2(prof);
    let w = mid_weight(prof);
    let a = quad(&lm2, &avg, &avg, h);
    let b = quad(&w, &avg, &avg, h);
    if a == 0.0 {
        return Err(Error::ZeroDenominator("int lambda m^2 psi^2"));
    }
    if b <= 0.0 {
        return Ok(0.0);
    }
    let inv_l2 = 1.0 / (l2 * l2);
    let chi = quad(&lm2, &dif, &dif, h) + inv_l2 * a - b;
    let root = ((chi * chi + 4.0 * inv_l2 * a * b).sqrt() - chi) / (2.0 * a);
    Ok(root.max(0.0).sqrt())
}

/// `int psi^2` at the nodes; handy for normalising test functions.
pub fn node_norm2(prof: &EquilibriumProfile, psi: &[f64]) -> f64 {
    dot(psi, psi, prof.grid.h)
}

#[cfg(test)]
mod tests;
