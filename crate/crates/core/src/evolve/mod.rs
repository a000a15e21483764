//! Time integration of one Fourier mode of the linearised system, used as
//! an independent check on the spectral growth rates.
//!
//! The discretisation is a marker-and-cell layout in `x3`: density,
//! horizontal velocity and horizontal field at cell midpoints, vertical
//! velocity and vertical field at the interior nodes. Horizontal
//! derivatives become multiplications by `i xi1`, `i xi2`.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{ModalField, ModeSpec};
use crate::error::{Error, Result};
use crate::profiles::EquilibriumProfile;

type C = Complex64;

/// Absolute slack on a fitted rate before it counts as growth.
pub const FIT_TOLERANCE: f64 = 1e-3;

/// Largest fit RMS for which a fitted rate is compared with a spectral one.
pub const AGREEMENT_RMS: f64 = 1e-3;

const I: C = C::new(0.0, 1.0);

/// Complex amplitudes of `(rho, v, N)` for one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    /// midpoints
    pub rho_hat: Vec<C>,
    /// `v1`, `v2` at midpoints, `v3` at nodes
    pub v_hat: [Vec<C>; 3],
    /// `N1`, `N2` at midpoints, `N3` at nodes
    pub n_hat: [Vec<C>; 3],
    pub t: f64,
}

impl ModeState {
    pub fn zeros(n: usize) -> Self {
        let z = |len| vec![C::new(0.0, 0.0); len];
        Self { rho_hat: z(n + 1), v_hat: [z(n + 1), z(n + 1), z(n)], n_hat: [z(n + 1), z(n + 1), z(n)], t: 0.0 }
    }

    fn n(&self) -> usize {
        self.v_hat[2].len()
    }

    fn axpy(&self, a: f64, d: &ModeState) -> ModeState {
        let f = |x: &[C], y: &[C]| x.iter().zip(y).map(|(x, y)| x + y * a).collect::<Vec<_>>();
        ModeState {
            rho_hat: f(&self.rho_hat, &d.rho_hat),
            v_hat: [f(&self.v_hat[0], &d.v_hat[0]), f(&self.v_hat[1], &d.v_hat[1]), f(&self.v_hat[2], &d.v_hat[2])],
            n_hat: [f(&self.n_hat[0], &d.n_hat[0]), f(&self.n_hat[1], &d.n_hat[1]), f(&self.n_hat[2], &d.n_hat[2])],
            t: self.t,
        }
    }

    pub fn scaled(&self, a: f64) -> ModeState {
        ModeState::zeros(self.n()).axpy(a, self)
    }

    /// Discrete `i xi1 N1 + i xi2 N2 + N3'` at the midpoints.
    pub fn div_n(&self, mode: ModeSpec, h: f64) -> Vec<C> {
        let d3 = diff_to_mid(&self.n_hat[2], h);
        (0..d3.len()).map(|k| I * mode.xi1 * self.n_hat[0][k] + I * mode.xi2 * self.n_hat[1][k] + d3[k]).collect()
    }

    /// `sqrt(int |N|^2)` with the staggered quadrature.
    pub fn n_norm(&self, h: f64) -> f64 {
        let s: f64 = self.n_hat.iter().flat_map(|c| c.iter()).map(|v| v.norm_sqr()).sum();
        (s * h).sqrt()
    }
}

/// Node field to midpoints: difference, with Dirichlet zeros at the walls.
fn diff_to_mid(f: &[C], h: f64) -> Vec<C> {
    let n = f.len();
    let z = C::new(0.0, 0.0);
    (0..=n).map(|k| ((if k < n { f[k] } else { z }) - (if k > 0 { f[k - 1] } else { z })) / h).collect()
}

fn avg_to_mid(f: &[C]) -> Vec<C> {
    let n = f.len();
    let z = C::new(0.0, 0.0);
    (0..=n).map(|k| ((if k < n { f[k] } else { z }) + (if k > 0 { f[k - 1] } else { z })) * 0.5).collect()
}

/// Midpoint field to nodes.
fn diff_to_node(q: &[C], h: f64) -> Vec<C> {
    q.windows(2).map(|w| (w[1] - w[0]) / h).collect()
}

fn avg_to_node(q: &[C]) -> Vec<C> {
    q.windows(2).map(|w| (w[1] + w[0]) * 0.5).collect()
}

/// Midpoint Laplacian with the wall value reflected as `-f`.
fn lap_mid(f: &[C], h: f64) -> Vec<C> {
    let n = f.len();
    (0..n)
        .map(|k| {
            let l = if k > 0 { f[k - 1] } else { -f[0] };
            let r = if k + 1 < n { f[k + 1] } else { -f[n - 1] };
            (l - f[k] * 2.0 + r) / (h * h)
        })
        .collect()
}

fn lap_node(f: &[C], h: f64) -> Vec<C> {
    let n = f.len();
    let z = C::new(0.0, 0.0);
    (0..n)
        .map(|j| {
            let l = if j > 0 { f[j - 1] } else { z };
            let r = if j + 1 < n { f[j + 1] } else { z };
            (l - f[j] * 2.0 + r) / (h * h)
        })
        .collect()
}

/// Linearised right-hand side for one mode.
struct Rhs<'a> {
    prof: &'a EquilibriumProfile,
    mode: ModeSpec,
    /// `P'(rho)` as a function of density, `A gamma rho^(gamma-1)`
    sound2_mid: Vec<f64>,
}

impl<'a> Rhs<'a> {
    fn new(prof: &'a EquilibriumProfile, mode: ModeSpec) -> Self {
        let p = &prof.params;
        let sound2_mid = prof.mids.rho.iter().map(|r| p.a * p.gamma * r.powf(p.gamma - 1.0)).collect();
        Self { prof, mode, sound2_mid }
    }

    fn div_v(&self, v: &[Vec<C>; 3]) -> Vec<C> {
        let (x1, x2, h) = (self.mode.xi1, self.mode.xi2, self.prof.grid.h);
        let d3 = diff_to_mid(&v[2], h);
        (0..d3.len()).map(|k| I * x1 * v[0][k] + I * x2 * v[1][k] + d3[k]).collect()
    }

    /// `-div(rho v)`
    fn continuity(&self, v: &[Vec<C>; 3]) -> Vec<C> {
        let (x1, x2, h) = (self.mode.xi1, self.mode.xi2, self.prof.grid.h);
        let rv3: Vec<C> = v[2].iter().zip(&self.prof.nodes.rho).map(|(v, r)| v * r).collect();
        let d3 = diff_to_mid(&rv3, h);
        let r = &self.prof.mids.rho;
        (0..d3.len()).map(|k| -(I * x1 * r[k] * v[0][k] + I * x2 * r[k] * v[1][k] + d3[k])).collect()
    }

    /// `m d1 v - v3 M' - M div v`, with the `m' v3` term written as
    /// `(m v3)' - m v3'` so that `div N` is conserved exactly.
    fn induction(&self, v: &[Vec<C>; 3]) -> [Vec<C>; 3] {
        let (x1, h) = (self.mode.xi1, self.prof.grid.h);
        let (mm, mn) = (&self.prof.mids.m, &self.prof.nodes.m);
        let div = self.div_v(v);
        let mv3: Vec<C> = v[2].iter().zip(mn).map(|(v, m)| v * m).collect();
        let dmv3 = diff_to_mid(&mv3, h);
        let dv3 = diff_to_mid(&v[2], h);
        let n1 = (0..div.len()).map(|k| I * x1 * mm[k] * v[0][k] - (dmv3[k] - mm[k] * dv3[k]) - mm[k] * div[k]).collect();
        let n2 = (0..div.len()).map(|k| I * x1 * mm[k] * v[1][k]).collect();
        let n3 = v[2].iter().zip(mn).map(|(v, m)| I * x1 * m * v).collect();
        [n1, n2, n3]
    }

    fn eval(&self, s: &ModeState) -> ModeState {
        let prof = self.prof;
        let (x1, x2, h) = (self.mode.xi1, self.mode.xi2, prof.grid.h);
        let k2 = self.mode.norm2();
        let (mu1, mu2, lambda) = (prof.params.mu1, prof.params.mu2(), prof.params.lambda);
        let (mid, node) = (&prof.mids, &prof.nodes);
        let v = &s.v_hat;
        let nn = &s.n_hat;

        let div = self.div_v(v);
        let pi: Vec<C> = (0..div.len()).map(|k| self.sound2_mid[k] * s.rho_hat[k] + lambda * mid.m[k] * nn[0][k]).collect();
        let n3_mid = avg_to_mid(&nn[2]);
        let rho_node = avg_to_node(&s.rho_hat);
        let dpi = diff_to_node(&pi, h);
        let ddiv = diff_to_node(&div, h);
        let (l1, l2, l3) = (lap_mid(&v[0], h), lap_mid(&v[1], h), lap_node(&v[2], h));

        let a1 = (0..div.len())
            .map(|k| {
                (-I * x1 * pi[k] + (l1[k] - v[0][k] * k2) * mu1 + I * x1 * mu2 * div[k]
                    + lambda * mid.dm[k] * n3_mid[k]
                    + I * x1 * lambda * mid.m[k] * nn[0][k])
                    / mid.rho[k]
            })
            .collect();
        let a2 = (0..div.len())
            .map(|k| {
                (-I * x2 * pi[k] + (l2[k] - v[1][k] * k2) * mu1 + I * x2 * mu2 * div[k]
                    + I * x1 * lambda * mid.m[k] * nn[1][k])
                    / mid.rho[k]
            })
            .collect();
        let a3 = (0..v[2].len())
            .map(|j| {
                (-dpi[j] + (l3[j] - v[2][j] * k2) * mu1 + ddiv[j] * mu2 + I * x1 * lambda * node.m[j] * nn[2][j]
                    - rho_node[j] * node.g[j])
                    / node.rho[j]
            })
            .collect();
        ModeState { rho_hat: self.continuity(v), v_hat: [a1, a2, a3], n_hat: self.induction(v), t: 0.0 }
    }
}

/// Mass-weighted velocity norm `sqrt(int rho |v|^2)`.
pub fn amplitude(s: &ModeState, prof: &EquilibriumProfile) -> f64 {
    let h = prof.grid.h;
    let mid: f64 = (0..prof.mids.len()).map(|k| prof.mids.rho[k] * (s.v_hat[0][k].norm_sqr() + s.v_hat[1][k].norm_sqr())).sum();
    let node: f64 = (0..prof.nodes.len()).map(|j| prof.nodes.rho[j] * s.v_hat[2][j].norm_sqr()).sum();
    (h * (mid + node)).sqrt()
}

/// Default step: the smaller of the viscous limit `0.2 h^2 / nu_max` and
/// half a fast-wave crossing of one cell.
pub fn stable_dt(prof: &EquilibriumProfile, mode: ModeSpec) -> f64 {
    let h = prof.grid.h;
    let p = &prof.params;
    let all = || prof.mids.rho.iter().zip(&prof.mids.pressure).zip(&prof.mids.m);
    let nu_max = all().map(|((r, _), _)| (p.mu1 + p.mu2()) / r).fold(0.0, f64::max);
    let c_max = all().map(|((r, pr), m)| ((p.gamma * pr + p.lambda * m * m) / r).sqrt()).fold(0.0, f64::max);
    let reach = 2.0 / h + mode.norm2().sqrt();
    (0.2 * h * h / nu_max).min(1.0 / (c_max * reach))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub amplitude: Vec<f64>,
    /// `max_t |div N(t) - div N(0)| / max(|N(t)|, tiny)`
    pub div_drift: f64,
    pub dt: f64,
    pub steps: usize,
}

/// Integrate one mode with classical RK4 from `init` up to `t_end`,
/// recording about `samples` amplitudes.
pub fn evolve_mode(
    prof: &EquilibriumProfile,
    mode: ModeSpec,
    init: &ModeState,
    t_end: f64,
    dt: f64,
    samples: usize,
) -> Result<(Trajectory, ModeState)> {
    let n = prof.grid.n;
    if init.n() != n || init.rho_hat.len() != n + 1 {
        return Err(Error::InvalidMode("initial state does not match the grid".into()));
    }
    if !(dt > 0.0 && t_end > 0.0) {
        return Err(Error::InvalidParams(format!("need dt > 0 and t_end > 0, got {dt}, {t_end}")));
    }
    // beyond the RK4 stability interval the run is meaningless
    let limit = 2.5 * stable_dt(prof, mode);
    if dt > limit {
        return Err(Error::StepTooLarge { t: 0.0, rate: 1.0 / limit });
    }
    let rhs = Rhs::new(prof, mode);
    let h = prof.grid.h;
    let steps = (t_end / dt).ceil() as usize;
    let stride = (steps / samples.max(1)).max(1);
    let div0 = init.div_n(mode, h);
    let mut state = init.clone();
    state.t = 0.0;
    let mut traj = Trajectory { times: vec![0.0], amplitude: vec![amplitude(&state, prof)], div_drift: 0.0, dt, steps };
    for step in 1..=steps {
        let k1 = rhs.eval(&state);
        let k2 = rhs.eval(&state.axpy(0.5 * dt, &k1));
        let k3 = rhs.eval(&state.axpy(0.5 * dt, &k2));
        let k4 = rhs.eval(&state.axpy(dt, &k3));
        let t = state.t;
        state = state.axpy(dt / 6.0, &k1).axpy(dt / 3.0, &k2).axpy(dt / 3.0, &k3).axpy(dt / 6.0, &k4);
        state.t = t + dt;
        if step % stride == 0 || step == steps {
            let a = amplitude(&state, prof);
            let (t0, a0) = (*traj.times.last().unwrap(), *traj.amplitude.last().unwrap());
            if !a.is_finite() || (a0 > 0.0 && (a / a0).ln() / (state.t - t0) > 1.0 / dt) {
                return Err(Error::StepTooLarge { t: state.t, rate: (a / a0).ln() / (state.t - t0) });
            }
            let div = state.div_n(mode, h);
            let drift = div.iter().zip(&div0).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt() * h.sqrt();
            let scale = state.n_norm(h).max(f64::MIN_POSITIVE);
            traj.div_drift = traj.div_drift.max(drift / scale);
            traj.times.push(state.t);
            traj.amplitude.push(a);
        }
    }
    Ok((traj, state))
}

/// Initial state of an exact normal mode: `v = (-i phi, -i theta, psi)`,
/// `rho = -div(rho v) / Lambda`, `N = induction(v) / Lambda`.
pub fn lift_eigenfunction(prof: &EquilibriumProfile, field: &ModalField, lam: f64) -> Result<ModeState> {
    if lam == 0.0 {
        return Err(Error::ZeroDenominator("growth rate"));
    }
    let rhs = Rhs::new(prof, field.mode);
    let v = [
        field.phi.iter().map(|&p| -I * p).collect::<Vec<_>>(),
        field.theta.iter().map(|&p| -I * p).collect(),
        field.psi.iter().map(|&p| C::new(p, 0.0)).collect(),
    ];
    let rho_hat = rhs.continuity(&v).into_iter().map(|c| c / lam).collect();
    let n_hat = rhs.induction(&v).map(|c| c.into_iter().map(|x| x / lam).collect());
    Ok(ModeState { rho_hat, v_hat: v, n_hat, t: 0.0 })
}

/// Random smooth initial state: low sine harmonics in every component,
/// with `N` the induction of a random velocity so `div N = 0` exactly.
pub fn random_init(prof: &EquilibriumProfile, mode: ModeSpec, seed: u64) -> ModeState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, len) = (prof.grid.lo, prof.grid.hi - prof.grid.lo);
    let mut smooth = |xs: &[f64]| -> Vec<C> {
        let coef: Vec<(f64, f64)> = (0..6).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        xs.iter()
            .map(|x| {
                coef.iter().enumerate().fold(C::new(0.0, 0.0), |acc, (j, (a, b))| {
                    let s = ((j + 1) as f64 * std::f64::consts::PI * (x - lo) / len).sin() / (j + 1) as f64;
                    acc + C::new(*a, *b) * s
                })
            })
            .collect()
    };
    let (xm, xn) = (prof.mids.x.clone(), prof.nodes.x.clone());
    let v = [smooth(&xm), smooth(&xm), smooth(&xn)];
    let w = [smooth(&xm), smooth(&xm), smooth(&xn)];
    let rho_hat = smooth(&xm);
    let n_hat = Rhs::new(prof, mode).induction(&w);
    ModeState { rho_hat, v_hat: v, n_hat, t: 0.0 }
}

/// Least-squares slope of `ln amplitude` against `t` over the final
/// `window` fraction of the samples, with the RMS of the fit.
pub fn fit_growth_rate(traj: &Trajectory, window: f64) -> Result<(f64, f64)> {
    const NEED: usize = 16;
    if traj.amplitude.iter().all(|&a| a == 0.0) {
        return Err(Error::ZeroAmplitude);
    }
    let len = traj.times.len();
    let start = len - ((window.clamp(0.0, 1.0) * len as f64).round() as usize).min(len);
    let pts: Vec<(f64, f64)> = (start..len)
        .filter(|&i| traj.amplitude[i] > f64::MIN_POSITIVE)
        .map(|i| (traj.times[i], traj.amplitude[i].ln()))
        .collect();
    if pts.len() < NEED {
        return Err(Error::InsufficientData { got: pts.len(), need: NEED });
    }
    let m = pts.len() as f64;
    let (st, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t, b + y));
    let (tm, ym) = (st / m, sy / m);
    let (stt, sty) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + (t - tm).powi(2), b + (t - tm) * (y - ym)));
    let slope = sty / stt;
    let rms = (pts.iter().map(|(t, y)| (y - ym - slope * (t - tm)).powi(2)).sum::<f64>() / m).sqrt();
    Ok((slope, rms))
}
