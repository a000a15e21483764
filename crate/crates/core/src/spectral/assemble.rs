use nalgebra::DMatrix;

use crate::energy::{ModalField, ModeSpec};
use crate::profiles::EquilibriumProfile;

/// Mass, damping and stiffness of one mode acting on the stacked unknown
/// `[phi (n+1 midpoints), theta (n+1 midpoints), psi (n nodes)]`.
///
/// `x.M x`, `x.D x` and `x.K x` equal the mass, dissipation and frequency
/// energy of the field `x`, so a growth rate solves
/// `(Lambda^2 M + Lambda D - K) x = 0`.
#[derive(Debug, Clone)]
pub struct ModalOperators {
    pub n: usize,
    pub mode: ModeSpec,
    pub mass: DMatrix<f64>,
    pub damping: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
}

impl ModalOperators {
    pub fn dim(&self) -> usize {
        self.mass.nrows()
    }

    pub fn field(&self, x: &[f64]) -> ModalField {
        ModalField::from_stacked(x, self.n, self.mode)
    }
}

type Functional = Vec<(usize, f64)>;

/// Accumulates `w * (u.x) (v.x)` terms into a matrix.
struct FormBuilder(DMatrix<f64>);

impl FormBuilder {
    fn new(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    fn add(&mut self, w: f64, u: &Functional, v: &Functional) {
        if w == 0.0 {
            return;
        }
        for &(i, a) in u {
            for &(j, b) in v {
                self.0[(i, j)] += w * a * b;
            }
        }
    }

    fn finish(self) -> DMatrix<f64> {
        let m = self.0;
        (&m + m.transpose()) * 0.5
    }
}

fn scaled(f: &Functional, s: f64) -> Functional {
    f.iter().map(|&(i, a)| (i, s * a)).collect()
}

fn sum(a: &Functional, b: &Functional) -> Functional {
    a.iter().chain(b).copied().filter(|&(_, c)| c != 0.0).collect()
}

pub fn assemble_operators(prof: &EquilibriumProfile, mode: ModeSpec) -> ModalOperators {
    let n = prof.grid.n;
    let nm = n + 1;
    let dim = 3 * n + 2;
    let h = prof.grid.h;
    let (gamma, lambda) = (prof.params.gamma, prof.params.lambda);
    let (mu1, mu2) = (prof.params.mu1, prof.params.mu2());
    let (x1, x2) = (mode.xi1, mode.xi2);
    let k2 = mode.norm2();
    let s = &prof.mids;

    let phi = |k: usize| -> Functional { vec![(k, 1.0)] };
    let theta = |k: usize| -> Functional { vec![(nm + k, 1.0)] };
    let psi_avg = |k: usize| -> Functional {
        let mut f = vec![];
        if k > 0 {
            f.push((2 * nm + k - 1, 0.5));
        }
        if k < n {
            f.push((2 * nm + k, 0.5));
        }
        f
    };
    let psi_dif = |k: usize| -> Functional {
        let mut f = vec![];
        if k > 0 {
            f.push((2 * nm + k - 1, -1.0 / h));
        }
        if k < n {
            f.push((2 * nm + k, 1.0 / h));
        }
        f
    };

    let mut kb = FormBuilder::new(dim);
    let mut db = FormBuilder::new(dim);
    let mut mass = DMatrix::zeros(dim, dim);
    for k in 0..nm {
        let (g, rho, gp, lm2) = (s.g[k], s.rho[k], gamma * s.pressure[k], lambda * s.m2(k));
        let (pa, pd, th) = (psi_avg(k), psi_dif(k), theta(k));
        let div = sum(&sum(&scaled(&phi(k), x1), &scaled(&th, x2)), &pd);
        let tv = sum(&scaled(&th, x2), &pd);
        kb.add(h * g * s.drho[k], &pa, &pa);
        kb.add(2.0 * h * g * rho, &pa, &div);
        kb.add(-h * gp, &div, &div);
        kb.add(-h * lm2 * x1 * x1, &th, &th);
        kb.add(-h * lm2 * x1 * x1, &pa, &pa);
        kb.add(-h * lm2, &tv, &tv);

        db.add(h * mu1 * k2, &phi(k), &phi(k));
        db.add(h * mu1 * k2, &th, &th);
        db.add(h * mu1, &pd, &pd);
        db.add(h * mu2, &div, &div);

        mass[(k, k)] = h * rho;
        mass[(nm + k, nm + k)] = h * rho;
    }
    for j in 0..n {
        db.add(h * mu1 * k2, &vec![(2 * nm + j, 1.0)], &vec![(2 * nm + j, 1.0)]);
        mass[(2 * nm + j, 2 * nm + j)] = h * prof.nodes.rho[j];
    }
    // cell-centred gradients of phi and theta, ghost reflection at walls
    for base in [0, nm] {
        for k in 0..n {
            let d: Functional = vec![(base + k, -1.0 / h), (base + k + 1, 1.0 / h)];
            db.add(h * mu1, &d, &d);
        }
        for k in [0, n] {
            let d: Functional = vec![(base + k, 1.0)];
            db.add(2.0 * mu1 / h, &d, &d);
        }
    }

    ModalOperators { n, mode, mass, damping: db.finish(), stiffness: kb.finish() }
}
