use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::ModalField;
use crate::profiles::EquilibriumProfile;
use crate::stagger::{node_avg, node_diff};

/// Real vector field on the periodic cell `[0, 2 pi L1) x [0, 2 pi L2)`
/// times the vertical interval.
///
/// Horizontally the samples sit on a uniform `n1 x n2` tensor grid.
/// Vertically `w1`, `w2` live at the `n + 1` cell midpoints and `w3` at the
/// `n` interior nodes. Storage is column-major in `x3`:
/// `index = (i1 * n2 + i2) * len + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField3D {
    pub n1: usize,
    pub n2: usize,
    pub l1: f64,
    pub l2: f64,
    pub n: usize,
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub w3: Vec<f64>,
}

impl GridField3D {
    pub fn zeros(n1: usize, n2: usize, l1: f64, l2: f64, n: usize) -> Self {
        let cols = n1 * n2;
        Self { n1, n2, l1, l2, n, w1: vec![0.0; cols * (n + 1)], w2: vec![0.0; cols * (n + 1)], w3: vec![0.0; cols * n] }
    }

    pub fn x1(&self, i1: usize) -> f64 {
        2.0 * PI * self.l1 * i1 as f64 / self.n1 as f64
    }

    pub fn x2(&self, i2: usize) -> f64 {
        2.0 * PI * self.l2 * i2 as f64 / self.n2 as f64
    }

    /// Real lift `w = (phi sin(xi.x), theta sin(xi.x), psi cos(xi.x))` of a
    /// modal field. Horizontal integrals are exact when `xi_i L_i` are
    /// integers below `n_i / 2`.
    pub fn from_modal(f: &ModalField, n1: usize, n2: usize, l1: f64, l2: f64) -> Self {
        let n = f.psi.len();
        let mut w = Self::zeros(n1, n2, l1, l2, n);
        for i1 in 0..n1 {
            for i2 in 0..n2 {
                let arg = f.mode.xi1 * w.x1(i1) + f.mode.xi2 * w.x2(i2);
                let (s, c) = arg.sin_cos();
                let col = i1 * n2 + i2;
                for k in 0..=n {
                    w.w1[col * (n + 1) + k] = f.phi[k] * s;
                    w.w2[col * (n + 1) + k] = f.theta[k] * s;
                }
                for j in 0..n {
                    w.w3[col * n + j] = f.psi[j] * c;
                }
            }
        }
        w
    }

    fn cell_area(&self) -> f64 {
        (2.0 * PI * self.l1 / self.n1 as f64) * (2.0 * PI * self.l2 / self.n2 as f64)
    }

    /// Spectral `(d/dx1, d/dx2)` of a component with `len` vertical samples.
    fn horizontal_derivs(&self, comp: &[f64], len: usize) -> (Vec<f64>, Vec<f64>) {
        let (n1, n2) = (self.n1, self.n2);
        let mut planner = FftPlanner::<f64>::new();
        let (f1, i1f) = (planner.plan_fft_forward(n1), planner.plan_fft_inverse(n1));
        let (f2, i2f) = (planner.plan_fft_forward(n2), planner.plan_fft_inverse(n2));
        let wave = |j: usize, nn: usize, l: f64| -> f64 {
            if 2 * j == nn {
                0.0
            } else if 2 * j < nn {
                j as f64 / l
            } else {
                (j as f64 - nn as f64) / l
            }
        };
        let mut d1 = vec![0.0; comp.len()];
        let mut d2 = vec![0.0; comp.len()];
        let mut plane = vec![Complex64::new(0.0, 0.0); n1 * n2];
        let mut row = vec![Complex64::new(0.0, 0.0); n1];
        for k in 0..len {
            for a in 0..n1 {
                for b in 0..n2 {
                    plane[a * n2 + b] = Complex64::new(comp[(a * n2 + b) * len + k], 0.0);
                }
            }
            // forward transform: rows along x2, then columns along x1
            for a in 0..n1 {
                f2.process(&mut plane[a * n2..(a + 1) * n2]);
            }
            for b in 0..n2 {
                (0..n1).for_each(|a| row[a] = plane[a * n2 + b]);
                f1.process(&mut row);
                (0..n1).for_each(|a| plane[a * n2 + b] = row[a]);
            }
            for (which, out) in [(0, &mut d1), (1, &mut d2)] {
                let mut spec = plane.clone();
                for a in 0..n1 {
                    for b in 0..n2 {
                        let kk = if which == 0 { wave(a, n1, self.l1) } else { wave(b, n2, self.l2) };
                        spec[a * n2 + b] *= Complex64::new(0.0, kk);
                    }
                }
                for a in 0..n1 {
                    i2f.process(&mut spec[a * n2..(a + 1) * n2]);
                }
                for b in 0..n2 {
                    (0..n1).for_each(|a| row[a] = spec[a * n2 + b]);
                    i1f.process(&mut row);
                    (0..n1).for_each(|a| spec[a * n2 + b] = row[a]);
                }
                let norm = (n1 * n2) as f64;
                for a in 0..n1 {
                    for b in 0..n2 {
                        out[(a * n2 + b) * len + k] = spec[a * n2 + b].re / norm;
                    }
                }
            }
        }
        (d1, d2)
    }
}

fn energy_with(w: &GridField3D, prof: &EquilibriumProfile, first: impl Fn(usize) -> f64) -> f64 {
    let n = w.n;
    assert_eq!(n, prof.grid.n, "field and profile grids differ");
    let (gamma, lambda, h) = (prof.params.gamma, prof.params.lambda, prof.grid.h);
    let s = &prof.mids;
    let (d1w1, _) = w.horizontal_derivs(&w.w1, n + 1);
    let (d1w2, d2w2) = w.horizontal_derivs(&w.w2, n + 1);
    let (d1w3, _) = w.horizontal_derivs(&w.w3, n);
    let mut acc = 0.0;
    for col in 0..w.n1 * w.n2 {
        let mid = |v: &[f64]| v[col * (n + 1)..(col + 1) * (n + 1)].to_vec();
        let node = |v: &[f64]| v[col * n..(col + 1) * n].to_vec();
        let w3 = node(&w.w3);
        let (w3a, w3d) = (node_avg(&w3), node_diff(&w3, h));
        let d1w3a = node_avg(&node(&d1w3));
        let (a1, b2, c1) = (mid(&d1w1), mid(&d2w2), mid(&d1w2));
        for k in 0..=n {
            let gp = gamma * s.pressure[k];
            let div_v = b2[k] + w3d[k];
            let div = a1[k] + div_v;
            let sq = s.g[k] * s.rho[k] * w3a[k] - gp * div;
            acc += first(k) * w3a[k] * w3a[k] - sq * sq / gp
                - lambda * s.m2(k) * (c1[k] * c1[k] + d1w3a[k] * d1w3a[k] + div_v * div_v);
        }
    }
    acc * h * w.cell_area()
}

/// `E(w)` with the buoyancy term `g (rho' + g rho^2 / (gamma P)) w3^2`.
pub fn energy_e_grid(w: &GridField3D, prof: &EquilibriumProfile) -> f64 {
    let s = &prof.mids;
    let gamma = prof.params.gamma;
    energy_with(w, prof, |k| s.weight(gamma, k))
}

/// `E(w)` with the buoyancy term written through the field,
/// `-lambda g rho m m' w3^2 / (gamma P)`; equal to [`energy_e_grid`] on an
/// equilibrium.
pub fn energy_e_rewritten(w: &GridField3D, prof: &EquilibriumProfile) -> f64 {
    let s = &prof.mids;
    let (gamma, lambda) = (prof.params.gamma, prof.params.lambda);
    energy_with(w, prof, |k| -lambda * s.g[k] * s.rho[k] * s.m[k] * s.dm[k] / (gamma * s.pressure[k]))
}
