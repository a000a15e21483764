use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::EquilibriumProfile;

fn per_node(prof: &EquilibriumProfile, f: impl Fn(usize) -> f64) -> Vec<f64> {
    (0..prof.nodes.len()).map(f).collect()
}

fn any_positive(v: &[f64]) -> bool {
    v.iter().any(|&x| x > 0.0)
}

/// `S = g rho^2 / (gamma P) + rho'`; the flag is `max S > 0`.
pub fn schwarzschild_margin(prof: &EquilibriumProfile) -> (Vec<f64>, bool) {
    let s = &prof.nodes;
    let gamma = prof.params.gamma;
    let v = per_node(prof, |j| s.g[j] * s.rho[j] * s.rho[j] / (gamma * s.pressure[j]) + s.drho[j]);
    let flag = any_positive(&v);
    (v, flag)
}

/// `(m^2)'`; the flag is `min (m^2)' < 0`.
pub fn buoyancy_margin(prof: &EquilibriumProfile) -> (Vec<f64>, bool) {
    let v = prof.nodes.m2prime.clone();
    let flag = v.iter().any(|&x| x < 0.0);
    (v, flag)
}

/// `T = g rho' + g^2 rho^2 / (gamma P + lambda m^2)`; the flag is `max T > 0`.
pub fn tserkovnikov_margin(prof: &EquilibriumProfile) -> (Vec<f64>, bool) {
    let s = &prof.nodes;
    let (gamma, lambda) = (prof.params.gamma, prof.params.lambda);
    let v = per_node(prof, |j| {
        let (g, r) = (s.g[j], s.rho[j]);
        g * s.drho[j] + g * g * r * r / (gamma * s.pressure[j] + lambda * s.m2(j))
    });
    let flag = any_positive(&v);
    (v, flag)
}

/// `rho'`; the flag is `max rho' > 0` (heavy fluid above light).
pub fn rt_margin(prof: &EquilibriumProfile) -> (Vec<f64>, bool) {
    let v = prof.nodes.drho.clone();
    let flag = any_positive(&v);
    (v, flag)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripBound {
    pub varpi: f64,
    pub bound: f64,
    /// `min |m| > bound`: sufficient for stability on the strip
    pub sufficient: bool,
}

/// `varpi = sqrt(max |g rho' + g^2 rho^2 / (gamma P)| / lambda)` and the
/// strip bound `(b - a) varpi / pi`.
pub fn varpi_and_strip_bound(prof: &EquilibriumProfile, a: f64, b: f64) -> Result<StripBound> {
    if !(a < b) {
        return Err(Error::InvalidParams(format!("strip needs a < b, got ({a}, {b})")));
    }
    let gamma = prof.params.gamma;
    let wmax = (0..prof.nodes.len()).map(|j| prof.nodes.weight(gamma, j).abs()).fold(0.0, f64::max);
    let varpi = (wmax / prof.params.lambda).sqrt();
    let bound = (b - a) * varpi / std::f64::consts::PI;
    let min_m = prof.nodes.m.iter().map(|m| m.abs()).fold(f64::INFINITY, f64::min);
    Ok(StripBound { varpi, bound, sufficient: min_m > bound })
}
