use serde::{Deserialize, Serialize};

use super::density::{DensitySpec, Gravity};
use super::grid::Grid1D;
use crate::error::{Error, Result};

/// Fluid and field constants. The pressure law is `P = A rho^gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub lambda: f64,
    pub gamma: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub mu1: f64,
    pub nu: f64,
    pub gravity: Gravity,
}

impl PhysicalParams {
    pub fn new(lambda: f64, gamma: f64, a: f64, mu1: f64, nu: f64, gravity: Gravity) -> Result<Self> {
        let p = Self { lambda, gamma, a, mu1, nu, gravity };
        p.validate()?;
        Ok(p)
    }

    /// Bulk-corrected viscosity `nu + mu1 / 3`.
    pub fn mu2(&self) -> f64 {
        self.nu + self.mu1 / 3.0
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("lambda", self.lambda), ("A", self.a), ("mu1", self.mu1), ("nu", self.nu)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.gamma >= 1.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParams(format!("gamma must be >= 1, got {}", self.gamma)));
        }
        match &self.gravity {
            Gravity::Constant(g) if !(*g >= 0.0 && g.is_finite()) => {
                Err(Error::InvalidParams(format!("gravity must be nonnegative, got {g}")))
            }
            Gravity::Sampled(s) => match s.knots().1.iter().find(|g| !(**g >= 0.0)) {
                Some(g) => Err(Error::InvalidParams(format!("sampled gravity has negative value {g}"))),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        self.a * rho.powf(self.gamma)
    }
}

/// Equilibrium quantities sampled on one set of abscissae.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSamples {
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub drho: Vec<f64>,
    pub pressure: Vec<f64>,
    pub dpressure: Vec<f64>,
    pub g: Vec<f64>,
    /// `F(g rho)`, the primitive of `g rho` vanishing at the lower endpoint
    pub primitive: Vec<f64>,
    pub m: Vec<f64>,
    pub dm: Vec<f64>,
    /// `(m^2)'`
    pub m2prime: Vec<f64>,
}

impl ProfileSamples {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `m^2` at sample `i`.
    pub fn m2(&self, i: usize) -> f64 {
        self.m[i] * self.m[i]
    }

    /// Buoyancy weight `g^2 rho^2 / (gamma P) + g rho'`, the integrand that
    /// drives every instability functional.
    pub fn weight(&self, gamma: f64, i: usize) -> f64 {
        let (g, r) = (self.g[i], self.rho[i]);
        g * g * r * r / (gamma * self.pressure[i]) + g * self.drho[i]
    }

    fn reversed(&self) -> Self {
        let rev = |v: &Vec<f64>| v.iter().rev().copied().collect::<Vec<_>>();
        Self {
            x: self.x.iter().rev().map(|x| -x).collect(),
            rho: rev(&self.rho),
            drho: rev(&self.drho),
            pressure: rev(&self.pressure),
            dpressure: rev(&self.dpressure),
            g: rev(&self.g),
            primitive: rev(&self.primitive),
            m: rev(&self.m),
            dm: rev(&self.dm),
            m2prime: rev(&self.m2prime),
        }
    }
}

/// Magnetohydrostatic state `(rho, 0, m e1)` on a vertical grid.
///
/// Samples are kept at the interior nodes and at the cell midpoints; the
/// quadratic forms of the other modules integrate over the midpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumProfile {
    pub grid: Grid1D,
    pub params: PhysicalParams,
    /// integration constant in `lambda m^2 / 2 = C - P - F(g rho)`
    pub c: f64,
    pub nodes: ProfileSamples,
    pub mids: ProfileSamples,
    /// Product of all synthetic field scalings applied; 1 for a genuine
    /// equilibrium.
    pub field_scale: f64,
}

impl EquilibriumProfile {
    /// Same density and gravity with the field replaced by `s m`. The result
    /// no longer satisfies the balance equation; it is a coefficient
    /// override for probing how thresholds depend on field strength.
    pub fn with_field_scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for samples in [&mut out.nodes, &mut out.mids] {
            samples.m.iter_mut().for_each(|v| *v *= s);
            samples.dm.iter_mut().for_each(|v| *v *= s);
            samples.m2prime.iter_mut().for_each(|v| *v *= s * s);
        }
        out.field_scale *= s;
        out
    }

    /// Same field with `m` replaced by `-m`.
    pub fn with_flipped_field(&self) -> Self {
        let mut out = self.clone();
        for samples in [&mut out.nodes, &mut out.mids] {
            samples.m.iter_mut().for_each(|v| *v = -*v);
            samples.dm.iter_mut().for_each(|v| *v = -*v);
        }
        out
    }

    /// Coefficient arrays reversed under `x3 -> -x3` on the mirrored grid.
    /// Derivative arrays are carried over unchanged, so this is a
    /// relabelling of coefficients rather than the equilibrium of the
    /// mirrored density.
    pub fn reflected(&self) -> Self {
        let grid = Grid1D::new(-self.grid.hi, -self.grid.lo, self.grid.n)
            .expect("mirrored grid of a valid grid is valid");
        Self {
            grid,
            params: self.params.clone(),
            c: self.c,
            nodes: self.nodes.reversed(),
            mids: self.mids.reversed(),
            field_scale: self.field_scale,
        }
    }

    pub fn is_synthetic(&self) -> bool {
        self.field_scale != 1.0
    }

    pub fn min_m2(&self) -> f64 {
        self.nodes.m.iter().chain(&self.mids.m).map(|m| m * m).fold(f64::INFINITY, f64::min)
    }

    /// Errors with [`Error::DegenerateField`] unless `m^2 > 0` everywhere.
    pub fn require_field(&self) -> Result<()> {
        let min_m2 = self.min_m2();
        if min_m2 > 0.0 {
            Ok(())
        } else {
            Err(Error::DegenerateField { min_m2 })
        }
    }
}

const GAUSS4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_8),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_8),
];

/// Default additive margin for `C`: half the largest pressure.
pub fn default_margin(params: &PhysicalParams, dens: &DensitySpec, grid: &Grid1D) -> f64 {
    let n2 = 2 * (grid.n + 1);
    (0..=n2)
        .map(|k| params.pressure(dens.eval(grid.lo + k as f64 * 0.5 * grid.h).0))
        .fold(0.0, f64::max)
        * 0.5
}

/// Build the equilibrium with `F(lo) = 0`, `C = max(P + F) + margin` over
/// all samples (endpoints included) and the positive branch of `m`.
///
/// Derivatives come from exact relations: `rho'` from the density spec,
/// `P' = A gamma rho^(gamma-1) rho'` and `(m^2)' = -(2/lambda)(P' + g rho)`.
/// `F` is accumulated with four-point Gauss rules on half cells.
pub fn build_equilibrium(
    params: PhysicalParams,
    dens: &DensitySpec,
    grid: Grid1D,
    margin: f64,
) -> Result<EquilibriumProfile> {
    params.validate()?;
    dens.validate()?;
    if !(margin > 0.0 && margin.is_finite()) {
        return Err(Error::InvalidParams(format!("margin must be positive, got {margin}")));
    }
    if let Some((a, b)) = dens.support() {
        let slack = 1e-12 * (b - a);
        if grid.lo < a - slack || grid.hi > b + slack {
            return Err(Error::InvalidParams(format!(
                "tabulated density covers [{a}, {b}] but the grid spans [{}, {}]",
                grid.lo, grid.hi
            )));
        }
    }

    let half = 0.5 * grid.h;
    let n2 = 2 * (grid.n + 1);
    let xs: Vec<f64> = (0..=n2).map(|k| grid.lo + k as f64 * half).collect();
    let g_rho = |x: f64| -> Result<f64> {
        let (rho, _) = dens.eval(x);
        if !(rho > 0.0) {
            return Err(Error::NonPositiveDensity { x, rho });
        }
        Ok(params.gravity.at(x) * rho)
    };

    let mut prim = vec![0.0; n2 + 1];
    for k in 0..n2 {
        let c = xs[k] + 0.5 * half;
        let mut acc = 0.0;
        for (t, w) in GAUSS4 {
            acc += w * g_rho(c + 0.5 * half * t)?;
        }
        prim[k + 1] = prim[k] + 0.5 * half * acc;
    }

    let mut total = Vec::with_capacity(n2 + 1);
    for (k, &x) in xs.iter().enumerate() {
        let (rho, _) = dens.eval(x);
        if !(rho > 0.0) {
            return Err(Error::NonPositiveDensity { x, rho });
        }
        total.push(params.pressure(rho) + prim[k]);
    }
    let c = total.iter().copied().fold(f64::NEG_INFINITY, f64::max) + margin;

    let sample = |idx: &mut dyn Iterator<Item = usize>| -> Result<ProfileSamples> {
        let mut s = ProfileSamples {
            x: vec![],
            rho: vec![],
            drho: vec![],
            pressure: vec![],
            dpressure: vec![],
            g: vec![],
            primitive: vec![],
            m: vec![],
            dm: vec![],
            m2prime: vec![],
        };
        for k in idx {
            let x = xs[k];
            let (rho, drho) = dens.eval(x);
            let g = params.gravity.at(x);
            let p = params.pressure(rho);
            let dp = params.a * params.gamma * rho.powf(params.gamma - 1.0) * drho;
            let radicand = c - total[k];
            if !(radicand > 0.0) {
                return Err(Error::NegativeRadicand { x, value: radicand });
            }
            let m = (2.0 / params.lambda * radicand).sqrt();
            let m2p = -2.0 / params.lambda * (dp + g * rho);
            s.x.push(x);
            s.rho.push(rho);
            s.drho.push(drho);
            s.pressure.push(p);
            s.dpressure.push(dp);
            s.g.push(g);
            s.primitive.push(prim[k]);
            s.m.push(m);
            s.dm.push(m2p / (2.0 * m));
            s.m2prime.push(m2p);
        }
        Ok(s)
    };
    let nodes = sample(&mut (1..=grid.n).map(|j| 2 * j))?;
    let mids = sample(&mut (0..=grid.n).map(|k| 2 * k + 1))?;
    // reuse the exact node abscissae from the grid
    let mut nodes = nodes;
    nodes.x.clone_from(&grid.nodes);

    Ok(EquilibriumProfile { grid, params, c, nodes, mids, field_scale: 1.0 })
}

/// `max_j |P' + lambda m m' + g rho|` at the nodes from the stored
/// derivative arrays.
pub fn equilibrium_residual(prof: &EquilibriumProfile) -> f64 {
    let s = &prof.nodes;
    let lambda = prof.params.lambda;
    (0..s.len())
        .map(|j| (s.dpressure[j] + lambda * s.m[j] * s.dm[j] + s.g[j] * s.rho[j]).abs())
        .fold(0.0, f64::max)
}

/// Same residual with `P'` and `m'` replaced by second-order differences
/// of the node arrays (one-sided at the first and last node).
pub fn equilibrium_residual_fd(prof: &EquilibriumProfile) -> f64 {
    let s = &prof.nodes;
    let dp = central_diff(&s.pressure, prof.grid.h);
    let dm = central_diff(&s.m, prof.grid.h);
    let lambda = prof.params.lambda;
    (0..s.len())
        .map(|j| (dp[j] + lambda * s.m[j] * dm[j] + s.g[j] * s.rho[j]).abs())
        .fold(0.0, f64::max)
}

/// Tolerance `1e-6 max|g rho| + 1e-12` for the balance residual.
pub fn balance_tolerance(prof: &EquilibriumProfile) -> f64 {
    let s = &prof.nodes;
    let scale = (0..s.len()).map(|j| (s.g[j] * s.rho[j]).abs()).fold(0.0, f64::max);
    1e-6 * scale + 1e-12
}

pub(crate) fn central_diff(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 3, "need three samples for a second-order derivative");
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    for j in 1..n - 1 {
        d[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::grid::build_grid;

    fn params(g: f64, lambda: f64) -> PhysicalParams {
        PhysicalParams::new(lambda, 1.0, 1.0, 0.01, 0.01, Gravity::Constant(g)).unwrap()
    }

    #[test]
    fn uniform_without_gravity() {
        let grid = build_grid(-1.0, 1.0, 16).unwrap();
        let p = build_equilibrium(params(0.0, 2.0), &DensitySpec::Constant { rho0: 1.0 }, grid, 1.0).unwrap();
        assert_eq!(p.c, 2.0);
        assert!(p.nodes.m.iter().all(|&m| m == 1.0));
        assert!(p.nodes.dm.iter().all(|&d| d == 0.0));
        assert!(p.nodes.primitive.iter().all(|&f| f == 0.0));
        assert_eq!(equilibrium_residual(&p), 0.0);
    }

    #[test]
    fn linear_primitive_closed_form() {
        let (lo, hi) = (-1.0, 1.0);
        let grid = build_grid(lo, hi, 512).unwrap();
        let p = build_equilibrium(params(1.0, 2.0), &DensitySpec::Constant { rho0: 1.0 }, grid, 1.0).unwrap();
        let c = 1.0 + (hi - lo) + 1.0;
        assert!((p.c - c).abs() < 1e-13);
        for (x, m) in p.nodes.x.iter().zip(&p.nodes.m) {
            let exact = (c - 1.0 - (x - lo)).sqrt();
            assert!((m - exact).abs() < 1e-13);
        }
        assert!(p.nodes.m.windows(2).all(|w| w[1] < w[0]));
        assert!(equilibrium_residual(&p) <= 1e-8);
        // differenced residual is only second order but still small here
        assert!(equilibrium_residual_fd(&p) < 1e-4);
    }

    #[test]
    fn exponential_balance_and_fd_convergence() {
        let dens = DensitySpec::Exponential { rho0: 1.0, scale_height: 1.0, x_ref: 0.0 };
        let mut prev = None;
        for n in [63, 127, 255] {
            let grid = build_grid(-1.0, 1.0, n).unwrap();
            let pr = PhysicalParams::new(1.0, 1.2, 1.0, 0.01, 0.01, Gravity::Constant(2.0)).unwrap();
            let m = default_margin(&pr, &dens, &grid);
            let p = build_equilibrium(pr, &dens, grid, m).unwrap();
            assert!(equilibrium_residual(&p) <= balance_tolerance(&p));
            let fd = equilibrium_residual_fd(&p);
            if let Some(e) = prev {
                let ratio: f64 = e / fd;
                assert!(ratio > 3.0 && ratio < 5.0, "ratio {ratio}");
            }
            prev = Some(fd);
        }
    }

    #[test]
    fn primitive_matches_closed_form() {
        let dens = DensitySpec::Exponential { rho0: 1.0, scale_height: 0.5, x_ref: 0.0 };
        let grid = build_grid(-1.0, 1.0, 32).unwrap();
        let p = build_equilibrium(params(3.0, 1.0), &dens, grid, 1.0).unwrap();
        for (x, f) in p.mids.x.iter().zip(&p.mids.primitive) {
            let exact = 3.0 * 0.5 * ((2.0f64).exp() - (-2.0 * x).exp());
            assert!((f - exact).abs() < 1e-10 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn no_gravity_field_tracks_pressure() {
        let dens = DensitySpec::TanhLayer { rho0: 1.0, jump: -0.3, center: 0.0, width: 0.2 };
        let grid = build_grid(-1.0, 1.0, 64).unwrap();
        let p = build_equilibrium(params(0.0, 1.5), &dens, grid, 0.5).unwrap();
        for j in 0..p.nodes.len() {
            let m2 = p.nodes.m2(j);
            assert!((m2 - 2.0 / 1.5 * (p.c - p.nodes.pressure[j])).abs() < 1e-12);
            assert!((p.nodes.m2prime[j] + 2.0 / 1.5 * p.nodes.dpressure[j]).abs() < 1e-12);
        }
        let dp = central_diff(&p.nodes.pressure, p.grid.h);
        for j in 1..p.nodes.len() - 1 {
            assert!((dp[j] - p.nodes.dpressure[j]).abs() < 2e-2);
        }
    }

    #[test]
    fn sign_flip_keeps_balance_terms() {
        let dens = DensitySpec::Exponential { rho0: 1.0, scale_height: 1.0, x_ref: 0.0 };
        let grid = build_grid(-1.0, 1.0, 16).unwrap();
        let p = build_equilibrium(params(1.0, 1.0), &dens, grid, 0.5).unwrap();
        let q = p.with_flipped_field();
        for j in 0..p.nodes.len() {
            assert_eq!(p.nodes.m2(j), q.nodes.m2(j));
            assert_eq!(p.nodes.m[j] * p.nodes.dm[j], q.nodes.m[j] * q.nodes.dm[j]);
            assert_eq!(p.nodes.m2prime[j], q.nodes.m2prime[j]);
        }
        assert_eq!(equilibrium_residual(&p), equilibrium_residual(&q));
    }

    #[test]
    fn rejects_bad_inputs() {
        let grid = build_grid(-1.0, 1.0, 16).unwrap();
        let neg = DensitySpec::TanhLayer { rho0: 0.1, jump: 1.0, center: 0.0, width: 0.1 };
        assert!(matches!(
            build_equilibrium(params(1.0, 1.0), &neg, grid.clone(), 1.0),
            Err(Error::NonPositiveDensity { .. })
        ));
        let one = DensitySpec::Constant { rho0: 1.0 };
        assert!(build_equilibrium(params(1.0, 1.0), &one, grid, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, 0.9, 1.0, 0.1, 0.1, Gravity::Constant(1.0)).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, 1.0, 0.1, 0.1, Gravity::Constant(-1.0)).is_err());
        let p = PhysicalParams::new(1.0, 1.0, 1.0, 0.3, 0.1, Gravity::Constant(1.0)).unwrap();
        assert_eq!(p.mu2(), 0.1 + 0.3 / 3.0);
    }
}
