//! Built-in equilibria covering each instability branch.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{build_equilibrium, build_grid, DensitySpec, EquilibriumProfile, Gravity, PhysicalParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub density: DensitySpec,
    pub lambda: f64,
    pub gamma: f64,
    pub a: f64,
    pub mu1: f64,
    pub nu: f64,
    pub g: f64,
    pub margin: f64,
    pub lo: f64,
    pub hi: f64,
    pub l1: f64,
    pub l2: f64,
}

impl Preset {
    pub fn params(&self) -> Result<PhysicalParams> {
        PhysicalParams::new(self.lambda, self.gamma, self.a, self.mu1, self.nu, Gravity::Constant(self.g))
    }

    /// Equilibrium on `n` interior nodes.
    pub fn build(&self, n: usize) -> Result<EquilibriumProfile> {
        build_equilibrium(self.params()?, &self.density, build_grid(self.lo, self.hi, n)?, self.margin)
    }
}

pub const PRESET_NAMES: [&str; 5] = ["uniform-g0", "schwarzschild-exp", "strong-field", "tserkovnikov-layer", "rt-tanh"];

const EXP: DensitySpec = DensitySpec::Exponential { rho0: 1.0, scale_height: 1.0, x_ref: 0.0 };

fn base(name: &'static str, summary: &'static str, density: DensitySpec) -> Preset {
    Preset {
        name,
        summary,
        density,
        lambda: 1.0,
        gamma: 1.4,
        a: 1.0,
        mu1: 0.02,
        nu: 0.01,
        g: 1.0,
        margin: 0.5,
        lo: -1.0,
        hi: 1.0,
        l1: 4.0,
        l2: 1.0,
    }
}

pub fn preset(name: &str) -> Result<Preset> {
    Ok(match name {
        "uniform-g0" => Preset { g: 0.0, l1: 1.0, ..base(name_of(name), "uniform density without gravity", DensitySpec::Constant { rho0: 1.0 }) },
        "schwarzschild-exp" => Preset {
            gamma: 1.2,
            g: 2.0,
            margin: 0.3,
            ..base(name_of(name), "exponential atmosphere, Schwarzschild unstable, Tserkovnikov stable", EXP)
        },
        "strong-field" => Preset {
            gamma: 1.2,
            g: 4.0,
            margin: 0.05,
            ..base(name_of(name), "exponential atmosphere with kappa just above 1, for field-scaling sweeps", EXP)
        },
        "tserkovnikov-layer" => Preset {
            g: 2.0,
            margin: 0.3,
            l2: 0.5,
            ..base(
                name_of(name),
                "decreasing tanh layer, Tserkovnikov unstable",
                DensitySpec::TanhLayer { rho0: 1.0, jump: -0.4, center: 0.0, width: 0.2 },
            )
        },
        "rt-tanh" => Preset {
            ..base(
                name_of(name),
                "increasing tanh layer, heavy fluid on top",
                DensitySpec::TanhLayer { rho0: 1.0, jump: 0.3, center: 0.0, width: 0.2 },
            )
        },
        _ => {
            return Err(Error::config("profile.preset", format!("unknown preset `{name}`; known: {}", PRESET_NAMES.join(", "))))
        }
    })
}

fn name_of(name: &str) -> &'static str {
    PRESET_NAMES.iter().find(|n| **n == name).copied().unwrap_or("")
}
