//! Run configuration: defaults, then the preset, then a TOML file, then
//! command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::presets::preset;
use crate::error::{Error, Result};
use crate::profiles::{load_tabulated_profile, DensitySpec, Gravity, PhysicalParams};
use crate::scan::{Domain, ScanMethod, ScanSpec, DEFAULT_HARMONICS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Equilibrium,
    Criteria,
    Growth,
    Scan,
    Evolve,
    Verdict,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Equilibrium => "equilibrium",
            Command::Criteria => "criteria",
            Command::Growth => "growth",
            Command::Scan => "scan",
            Command::Evolve => "evolve",
            Command::Verdict => "verdict",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Slab3d,
    Slab2d,
    Strip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    /// lifted spectral eigenfunction
    Eigen,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    pub margin: f64,
    pub lo: f64,
    pub hi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<DensitySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub lambda: f64,
    pub gamma: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub mu1: f64,
    pub nu: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub kind: DomainKind,
    pub l1: f64,
    pub l2: f64,
    pub strip_a: f64,
    pub strip_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsConfig {
    pub n_grid: usize,
    pub tol: f64,
    pub method: ScanMethod,
    pub xi1: f64,
    pub xi2: f64,
    /// explicit scan values; harmonics `k / L` when absent
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi1_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi2_values: Option<Vec<f64>>,
    pub harmonics: usize,
    /// evolve horizon; seven growth times of the spectral rate when absent
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// evolve step; the stability estimate when absent
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub init: InitKind,
    pub seed: u64,
    pub window: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: Format,
}

/// Fully resolved configuration; written to `effective_config.toml`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub profile: ProfileConfig,
    pub params: ParamsConfig,
    pub domain: DomainConfig,
    pub numerics: NumericsConfig,
    pub output: OutputConfig,
}

pub const EFFECTIVE_CONFIG: &str = "effective_config.toml";

impl RunConfig {
    fn defaults(command: Command) -> Self {
        RunConfig {
            command,
            profile: ProfileConfig { preset: None, file: None, margin: 0.5, lo: -1.0, hi: 1.0, density: None },
            params: ParamsConfig { lambda: 1.0, gamma: 1.4, a: 1.0, mu1: 0.02, nu: 0.01, g: 1.0 },
            domain: DomainConfig { kind: DomainKind::Slab3d, l1: 1.0, l2: 1.0, strip_a: 0.0, strip_b: 1.0 },
            numerics: NumericsConfig {
                n_grid: 128,
                tol: 1e-8,
                method: ScanMethod::Both,
                xi1: 0.0,
                xi2: 0.0,
                xi1_values: None,
                xi2_values: None,
                harmonics: DEFAULT_HARMONICS,
                t_end: None,
                dt: None,
                init: InitKind::Eigen,
                seed: 0,
                window: 0.5,
                samples: 2000,
            },
            output: OutputConfig { dir: PathBuf::from("parker-out"), format: Format::Csv },
        }
    }

    fn with_preset(mut self, name: &str) -> Result<Self> {
        let p = preset(name)?;
        self.profile.preset = Some(name.to_string());
        self.profile.margin = p.margin;
        self.profile.lo = p.lo;
        self.profile.hi = p.hi;
        self.params = ParamsConfig { lambda: p.lambda, gamma: p.gamma, a: p.a, mu1: p.mu1, nu: p.nu, g: p.g };
        self.domain.l1 = p.l1;
        self.domain.l2 = p.l2;
        self.numerics.xi1 = 1.0 / p.l1;
        self.numerics.xi2 = 1.0 / p.l2;
        Ok(self)
    }

    /// Resolve layered settings. `file` and `flags` are partial TOML
    /// tables with the same layout as the effective config.
    pub fn resolve(command: Command, file: Option<toml::Table>, flags: toml::Table) -> Result<Self> {
        let pick = |t: &toml::Table, key: &str| -> Option<toml::Value> {
            t.get("profile").and_then(|p| p.get(key)).cloned()
        };
        let mut merged = file.unwrap_or_default();
        merge(&mut merged, flags.clone());
        let has = |k: &str| pick(&merged, k).is_some();
        let sources = ["preset", "file", "density"].iter().filter(|k| has(k)).count();
        if sources > 1 {
            return Err(Error::config("profile", "choose one of preset, file and density"));
        }
        if sources == 0 {
            return Err(Error::config("profile", "no profile given; use --preset, --profile-file or a [profile.density] table"));
        }
        let mut cfg = Self::defaults(command);
        if let Some(v) = pick(&merged, "preset") {
            let name = v.as_str().ok_or_else(|| Error::config("profile.preset", "must be a string"))?;
            cfg = cfg.with_preset(name)?;
        }
        if let Some(v) = pick(&merged, "file") {
            let path = PathBuf::from(v.as_str().ok_or_else(|| Error::config("profile.file", "must be a string"))?);
            let dens = load_tabulated_profile(&path)?;
            if let Some((a, b)) = dens.support() {
                cfg.profile.lo = a;
                cfg.profile.hi = b;
            }
            cfg.profile.file = Some(path);
        }
        let mut value = toml::Table::try_from(&cfg).map_err(|e| Error::config("config", e.to_string()))?;
        merge(&mut value, merged);
        value.insert("command".into(), toml::Value::String(command.as_str().into()));
        let cfg: RunConfig = toml::Value::Table(value).try_into().map_err(|e: toml::de::Error| Error::config("config", e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(field, format!("must be positive, got {v}")))
            }
        };
        positive("profile.margin", self.profile.margin)?;
        if !(self.profile.lo < self.profile.hi) {
            return Err(Error::config("profile.lo", "need lo < hi"));
        }
        positive("domain.l1", self.domain.l1)?;
        positive("domain.l2", self.domain.l2)?;
        positive("numerics.tol", self.numerics.tol)?;
        if self.domain.kind == DomainKind::Strip && !(self.domain.strip_a < self.domain.strip_b) {
            return Err(Error::config("domain.strip_a", "need strip_a < strip_b"));
        }
        if !(self.numerics.window > 0.0 && self.numerics.window <= 1.0) {
            return Err(Error::config("numerics.window", "must lie in (0, 1]"));
        }
        if let Some(t) = self.numerics.t_end {
            positive("numerics.t_end", t)?;
        }
        if let Some(dt) = self.numerics.dt {
            positive("numerics.dt", dt)?;
        }
        if self.numerics.samples < 16 {
            return Err(Error::config("numerics.samples", "need at least 16"));
        }
        if let Some(f) = &self.profile.file {
            if !f.exists() {
                return Err(Error::config("profile.file", format!("{} does not exist", f.display())));
            }
        }
        self.physical_params()?.validate()
    }

    pub fn physical_params(&self) -> Result<PhysicalParams> {
        let p = &self.params;
        PhysicalParams::new(p.lambda, p.gamma, p.a, p.mu1, p.nu, Gravity::Constant(p.g))
    }

    pub fn density(&self) -> Result<DensitySpec> {
        if let Some(name) = &self.profile.preset {
            return Ok(preset(name)?.density);
        }
        if let Some(path) = &self.profile.file {
            return load_tabulated_profile(path);
        }
        self.profile.density.clone().ok_or_else(|| Error::config("profile", "no density"))
    }

    pub fn domain(&self) -> Domain {
        match self.domain.kind {
            DomainKind::Slab3d => Domain::Slab3d,
            DomainKind::Slab2d => Domain::Slab2d,
            DomainKind::Strip => Domain::Strip { a: self.domain.strip_a, b: self.domain.strip_b },
        }
    }

    pub fn scan_spec(&self) -> ScanSpec {
        let n = &self.numerics;
        let mut spec = ScanSpec::harmonics(self.domain.l1, self.domain.l2, n.harmonics, n.n_grid, n.method);
        if let Some(v) = &n.xi1_values {
            spec.xi1_values = v.clone();
        }
        if let Some(v) = &n.xi2_values {
            spec.xi2_values = v.clone();
        }
        spec.tol = n.tol;
        spec
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn write_effective(&self, dir: &Path) -> Result<()> {
        std::fs::write(dir.join(EFFECTIVE_CONFIG), self.to_toml()?)?;
        Ok(())
    }
}

pub fn read_table(path: &Path) -> Result<toml::Table> {
    let text = std::fs::read_to_string(path)?;
    text.parse::<toml::Table>().map_err(|e| Error::Parse { path: path.to_path_buf(), line: 0, msg: e.message().to_string() })
}

/// Recursive merge of `over` into `base`; tables merge, values replace.
fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}
