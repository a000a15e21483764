//! Energy functionals of the linearised problem and the test-function
//! constructions that make them positive.
//!
//! Modal fields live on the staggered grid: `phi` and `theta` at the `n + 1`
//! cell midpoints, `psi` at the `n` interior nodes. Every integrand is
//! evaluated at the midpoints, where `psi` enters through its average and
//! its difference.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::EquilibriumProfile;
use crate::stagger::{node_avg, node_diff};

mod grid3d;

pub use grid3d::{energy_e_grid, energy_e_rewritten, GridField3D};

/// Horizontal wavenumber pair; `xi1` runs along the field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub xi1: f64,
    pub xi2: f64,
}

impl ModeSpec {
    pub fn new(xi1: f64, xi2: f64) -> Result<Self> {
        if !(xi1 >= 0.0 && xi2 >= 0.0 && xi1.is_finite() && xi2.is_finite()) {
            return Err(Error::InvalidMode(format!("wavenumbers must be finite and >= 0, got ({xi1}, {xi2})")));
        }
        Ok(Self { xi1, xi2 })
    }

    pub fn norm2(&self) -> f64 {
        self.xi1 * self.xi1 + self.xi2 * self.xi2
    }

    pub fn is_zero(&self) -> bool {
        self.norm2() == 0.0
    }

    fn require_nonzero(&self) -> Result<()> {
        if self.is_zero() {
            Err(Error::ZeroWavenumber)
        } else {
            Ok(())
        }
    }
}

/// Vertical amplitudes of one Fourier mode: `u1 = -i phi e^{i xi.x}`,
/// `u2 = -i theta e^{i xi.x}`, `u3 = psi e^{i xi.x}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalField {
    /// midpoint values
    pub phi: Vec<f64>,
    /// midpoint values
    pub theta: Vec<f64>,
    /// node values
    pub psi: Vec<f64>,
    pub mode: ModeSpec,
}

impl ModalField {
    pub fn zeros(n: usize, mode: ModeSpec) -> Self {
        Self { phi: vec![0.0; n + 1], theta: vec![0.0; n + 1], psi: vec![0.0; n], mode }
    }

    /// Stacked unknown `[phi, theta, psi]` used by the modal operators.
    pub fn stacked(&self) -> Vec<f64> {
        self.phi.iter().chain(&self.theta).chain(&self.psi).copied().collect()
    }

    pub fn from_stacked(x: &[f64], n: usize, mode: ModeSpec) -> Self {
        assert_eq!(x.len(), 3 * n + 2, "stacked vector has the wrong length");
        let (phi, rest) = x.split_at(n + 1);
        let (theta, psi) = rest.split_at(n + 1);
        Self { phi: phi.to_vec(), theta: theta.to_vec(), psi: psi.to_vec(), mode }
    }

    fn check(&self, prof: &EquilibriumProfile) {
        let n = prof.grid.n;
        assert!(
            self.phi.len() == n + 1 && self.theta.len() == n + 1 && self.psi.len() == n,
            "modal field does not match the profile grid"
        );
    }
}

/// Midpoint quantities shared by the functionals.
struct Mids {
    avg: Vec<f64>,
    dif: Vec<f64>,
    div: Vec<f64>,
}

fn mids(f: &ModalField, h: f64) -> Mids {
    let avg = node_avg(&f.psi);
    let dif = node_diff(&f.psi, h);
    let div = (0..avg.len()).map(|k| f.mode.xi1 * f.phi[k] + f.mode.xi2 * f.theta[k] + dif[k]).collect();
    Mids { avg, dif, div }
}

/// Frequency energy `E~(phi, theta, psi)` in its defining form.
pub fn energy_tilde(f: &ModalField, prof: &EquilibriumProfile) -> f64 {
    f.check(prof);
    let s = &prof.mids;
    let (gamma, lambda, h) = (prof.params.gamma, prof.params.lambda, prof.grid.h);
    let (x1, x2) = (f.mode.xi1, f.mode.xi2);
    let q = mids(f, h);
    let mut acc = 0.0;
    for k in 0..s.len() {
        let (g, rho, p, m2) = (s.g[k], s.rho[k], s.pressure[k], s.m2(k));
        let (psi, div, th) = (q.avg[k], q.div[k], f.theta[k]);
        let tv = x2 * th + q.dif[k];
        acc += g * s.drho[k] * psi * psi + 2.0 * g * rho * psi * div
            - gamma * p * div * div
            - lambda * m2 * (x1 * x1 * (th * th + psi * psi) + tv * tv);
    }
    acc * h
}

/// `E~` written with both squares completed; needs `|xi|^2 > 0`.
pub fn energy_tilde_completed(f: &ModalField, prof: &EquilibriumProfile) -> Result<f64> {
    f.check(prof);
    f.mode.require_nonzero()?;
    let s = &prof.mids;
    let (gamma, lambda, h) = (prof.params.gamma, prof.params.lambda, prof.grid.h);
    let (x1, x2, k2) = (f.mode.xi1, f.mode.xi2, f.mode.norm2());
    let q = mids(f, h);
    let mut acc = 0.0;
    for k in 0..s.len() {
        let (g, rho, gp, lm2) = (s.g[k], s.rho[k], gamma * s.pressure[k], lambda * s.m2(k));
        let (psi, d) = (q.avg[k], q.dif[k]);
        let sq1 = q.div[k] - g * rho * psi / gp;
        let sq2 = f.theta[k] + x2 * d / k2;
        acc += (s.weight(gamma, k) - lm2 * x1 * x1) * psi * psi - lm2 * x1 * x1 / k2 * d * d
            - gp * sq1 * sq1
            - lm2 * k2 * sq2 * sq2;
    }
    Ok(acc * h)
}

/// Reduced integral left after both squares are eliminated:
/// `int (W - lambda xi1^2 m^2) psi^2 - lambda xi1^2 m^2 / |xi|^2 |psi'|^2`.
pub fn reduced_integral(psi: &[f64], mode: ModeSpec, prof: &EquilibriumProfile) -> Result<f64> {
    mode.require_nonzero()?;
    let s = &prof.mids;
    let (gamma, lambda, h) = (prof.params.gamma, prof.params.lambda, prof.grid.h);
    let x1s = mode.xi1 * mode.xi1;
    let (avg, dif) = (node_avg(psi), node_diff(psi, h));
    let acc: f64 = (0..s.len())
        .map(|k| {
            let lm2 = lambda * s.m2(k);
            (s.weight(gamma, k) - lm2 * x1s) * avg[k] * avg[k] - lm2 * x1s / mode.norm2() * dif[k] * dif[k]
        })
        .sum();
    Ok(acc * h)
}

/// Two-dimensional frequency energy with unknowns `phi` (midpoints) and
/// `psi` (nodes).
pub fn energy_tilde_2d(phi: &[f64], psi: &[f64], xi1: f64, prof: &EquilibriumProfile) -> f64 {
    let mode = ModeSpec { xi1, xi2: 0.0 };
    let f = ModalField { phi: phi.to_vec(), theta: vec![0.0; phi.len()], psi: psi.to_vec(), mode };
    energy_tilde(&f, prof)
}

/// Completed-square form of the two-dimensional energy.
pub fn energy_tilde_2d_completed(phi: &[f64], psi: &[f64], xi1: f64, prof: &EquilibriumProfile) -> f64 {
    let s = &prof.mids;
    let (gamma, lambda, h) = (prof.params.gamma, prof.params.lambda, prof.grid.h);
    let (avg, dif) = (node_avg(psi), node_diff(psi, h));
    let mut acc = 0.0;
    for k in 0..s.len() {
        let (gp, lm2) = (gamma * s.pressure[k], lambda * s.m2(k));
        let sq = xi1 * phi[k] + dif[k] - s.g[k] * s.rho[k] * avg[k] / gp;
        acc += (s.weight(gamma, k) - lm2 * xi1 * xi1) * avg[k] * avg[k] - lm2 * dif[k] * dif[k] - gp * sq * sq;
    }
    acc * h
}

/// `phi_0 = (g rho psi / (gamma P) - psi') / xi1`, which removes the
/// pressure square from the two-dimensional energy.
pub fn construction_2d(psi0: &[f64], xi1: f64, prof: &EquilibriumProfile) -> Result<Vec<f64>> {
    if xi1 == 0.0 {
        return Err(Error::ZeroXi1);
    }
    let s = &prof.mids;
    let (avg, dif) = (node_avg(psi0), node_diff(psi0, prof.grid.h));
    let gamma = prof.params.gamma;
    Ok((0..s.len())
        .map(|k| (s.g[k] * s.rho[k] * avg[k] / (gamma * s.pressure[k]) - dif[k]) / xi1)
        .collect())
}

/// Viscous dissipation `int mu1 |grad w|^2 + mu2 |div w|^2` for one mode.
///
/// The midpoint unknowns are differenced between neighbouring midpoints,
/// with a ghost value `-f[0]` (resp. `-f[n]`) across each wall.
pub fn dissipation(f: &ModalField, prof: &EquilibriumProfile) -> f64 {
    f.check(prof);
    let h = prof.grid.h;
    let (mu1, mu2) = (prof.params.mu1, prof.params.mu2());
    let q = mids(f, h);
    let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    let cell_grad = |v: &[f64]| {
        let inner: f64 = v.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum::<f64>() / h;
        inner + 2.0 * (v[0] * v[0] + v[v.len() - 1] * v[v.len() - 1]) / h
    };
    let zero_order = f.mode.norm2() * h * (sq(&f.phi) + sq(&f.theta) + sq(&f.psi));
    let grads = cell_grad(&f.phi) + cell_grad(&f.theta) + h * sq(&q.dif);
    mu1 * (zero_order + grads) + mu2 * h * sq(&q.div)
}

/// Mass `int rho (phi^2 + theta^2 + psi^2)`.
pub fn mass(f: &ModalField, prof: &EquilibriumProfile) -> f64 {
    f.check(prof);
    let h = prof.grid.h;
    let mid: f64 = (0..prof.mids.len()).map(|k| prof.mids.rho[k] * (f.phi[k].powi(2) + f.theta[k].powi(2))).sum();
    let node: f64 = (0..prof.nodes.len()).map(|j| prof.nodes.rho[j] * f.psi[j].powi(2)).sum();
    h * (mid + node)
}

/// `E_c(f, s) = E~(f) - s * dissipation(f)`.
pub fn energy_ec(f: &ModalField, s: f64, prof: &EquilibriumProfile) -> f64 {
    energy_tilde(f, prof) - s * dissipation(f, prof)
}

/// Test field that eliminates both squares of the completed form:
/// `theta_0 = -xi2 psi_0' / |xi|^2`,
/// `phi_0 = (g rho psi_0 / (gamma P) - psi_0' - xi2 theta_0) / xi1`.
pub fn newcomb_construction(psi0: &[f64], mode: ModeSpec, prof: &EquilibriumProfile) -> Result<ModalField> {
    if mode.xi1 == 0.0 {
        return Err(Error::ZeroXi1);
    }
    let s = &prof.mids;
    let (avg, dif) = (node_avg(psi0), node_diff(psi0, prof.grid.h));
    let gamma = prof.params.gamma;
    let k2 = mode.norm2();
    let theta: Vec<f64> = dif.iter().map(|d| -mode.xi2 * d / k2).collect();
    let phi = (0..s.len())
        .map(|k| (s.g[k] * s.rho[k] * avg[k] / (gamma * s.pressure[k]) - dif[k] - mode.xi2 * theta[k]) / mode.xi1)
        .collect();
    Ok(ModalField { phi, theta, psi: psi0.to_vec(), mode })
}

/// Field at `xi1 = 0` with
/// `theta_0 = (g rho psi_0 / (gamma P + lambda m^2) - psi_0') / xi2`;
/// `phi` is irrelevant there and stored as zero.
pub fn tserkovnikov_construction(psi0: &[f64], xi2: f64, prof: &EquilibriumProfile) -> Result<ModalField> {
    if xi2 == 0.0 {
        return Err(Error::ZeroXi2);
    }
    let s = &prof.mids;
    let (avg, dif) = (node_avg(psi0), node_diff(psi0, prof.grid.h));
    let (gamma, lambda) = (prof.params.gamma, prof.params.lambda);
    let theta = (0..s.len())
        .map(|k| (s.g[k] * s.rho[k] * avg[k] / (gamma * s.pressure[k] + lambda * s.m2(k)) - dif[k]) / xi2)
        .collect();
    Ok(ModalField { phi: vec![0.0; s.len()], theta, psi: psi0.to_vec(), mode: ModeSpec { xi1: 0.0, xi2 } })
}

/// `int (g rho' + g^2 rho^2 / (gamma P + lambda m^2)) psi^2`.
pub fn tserkovnikov_integral(psi: &[f64], prof: &EquilibriumProfile) -> f64 {
    let s = &prof.mids;
    let (gamma, lambda) = (prof.params.gamma, prof.params.lambda);
    let avg = node_avg(psi);
    let acc: f64 = (0..s.len())
        .map(|k| {
            let (g, r) = (s.g[k], s.rho[k]);
            (g * s.drho[k] + g * g * r * r / (gamma * s.pressure[k] + lambda * s.m2(k))) * avg[k] * avg[k]
        })
        .sum();
    acc * prof.grid.h
}
