use std::path::Path;

use serde::{Deserialize, Serialize};

use super::spline::CubicSpline;
use crate::error::{Error, Result};

/// Equilibrium density profile, evaluable anywhere on the vertical interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DensitySpec {
    Constant { rho0: f64 },
    /// `rho0 * exp(-(x3 - x_ref) / scale_height)`
    Exponential { rho0: f64, scale_height: f64, x_ref: f64 },
    /// `rho0 + jump * tanh((x3 - center) / width)`; `jump > 0` puts the
    /// heavy fluid on top.
    TanhLayer { rho0: f64, jump: f64, center: f64, width: f64 },
    Tabulated { spline: CubicSpline },
}

impl DensitySpec {
    pub fn tabulated(x: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        if let Some((i, &r)) = rho.iter().enumerate().find(|(_, r)| !(**r > 0.0)) {
            return Err(Error::NonPositiveDensity { x: x.get(i).copied().unwrap_or(f64::NAN), rho: r });
        }
        Ok(DensitySpec::Tabulated { spline: CubicSpline::natural(x, rho)? })
    }

    /// `(rho, d rho / d x3)` at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        match *self {
            DensitySpec::Constant { rho0 } => (rho0, 0.0),
            DensitySpec::Exponential { rho0, scale_height, x_ref } => {
                let r = rho0 * (-(x - x_ref) / scale_height).exp();
                (r, -r / scale_height)
            }
            DensitySpec::TanhLayer { rho0, jump, center, width } => {
                let t = ((x - center) / width).tanh();
                (rho0 + jump * t, jump * (1.0 - t * t) / width)
            }
            DensitySpec::Tabulated { ref spline } => spline.eval(x),
        }
    }

    /// Interval on which the density may be evaluated.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            DensitySpec::Tabulated { spline } => Some(spline.domain()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParams(format!("density: {what}")));
        match *self {
            DensitySpec::Constant { rho0 } if !(rho0 > 0.0) => bad("rho0 must be positive"),
            DensitySpec::Exponential { rho0, scale_height, .. }
                if !(rho0 > 0.0 && scale_height > 0.0) =>
            {
                bad("rho0 and scale_height must be positive")
            }
            DensitySpec::TanhLayer { width, .. } if !(width > 0.0) => bad("width must be positive"),
            _ => Ok(()),
        }
    }
}

/// Gravity `g(x3) >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gravity {
    Constant(f64),
    Sampled(CubicSpline),
}

impl Gravity {
    pub fn at(&self, x: f64) -> f64 {
        match self {
            Gravity::Constant(g) => *g,
            Gravity::Sampled(s) => s.eval(x).0,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Gravity::Constant(_))
    }
}

/// Read a two-column `x3 rho` table. `#` starts a comment line; at least
/// four data rows with strictly increasing `x3` are required.
pub fn load_tabulated_profile(path: impl AsRef<Path>) -> Result<DensitySpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_table(&text, path)
}

pub(crate) fn parse_table(text: &str, path: &Path) -> Result<DensitySpec> {
    let perr = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
    let mut xs = Vec::new();
    let mut rhos = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(perr(i + 1, format!("expected `x3 rho`, found {} fields", fields.len())));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| perr(i + 1, format!("not a finite number: `{s}`")))
        };
        let (x, rho) = (num(fields[0])?, num(fields[1])?);
        if let Some(&prev) = xs.last() {
            if !(x > prev) {
                return Err(Error::NonMonotoneAbscissa { row: xs.len(), prev, next: x });
            }
        }
        if !(rho > 0.0) {
            return Err(Error::NonPositiveDensity { x, rho });
        }
        xs.push(x);
        rhos.push(rho);
    }
    if xs.len() < 4 {
        return Err(perr(0, format!("need at least 4 data rows, found {}", xs.len())));
    }
    DensitySpec::tabulated(xs, rhos)
}
