//! Command-line front end for the `parker` binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};

mod commands;
mod config;
mod presets;

pub use commands::{build_profile, run};
pub use config::{read_table, Command, DomainKind, Format, InitKind, RunConfig, EFFECTIVE_CONFIG};
pub use presets::{preset, Preset, PRESET_NAMES};

#[derive(Debug, Parser)]
#[command(name = "parker", version, about = "Linear stability of magnetised stratified atmospheres")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Build the equilibrium and report the balance residual
    Equilibrium(Common),
    /// Pointwise criteria and threshold constants
    Criteria {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        strip: StripArgs,
    },
    /// Growth rate of one mode
    Growth {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Dispersion scan over horizontal wavenumbers
    Scan {
        #[command(flatten)]
        common: Common,
        /// comma-separated xi1 values (default: harmonics k/L1)
        #[arg(long)]
        xi1_values: Option<String>,
        /// comma-separated xi2 values (default: harmonics k/L2)
        #[arg(long)]
        xi2_values: Option<String>,
        #[arg(long)]
        harmonics: Option<usize>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Time integration of one mode and a fitted growth rate
    Evolve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, value_enum)]
        init: Option<InitArg>,
        #[arg(long)]
        seed: Option<u64>,
        /// final fraction of samples used by the fit
        #[arg(long)]
        window: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Instability hypotheses checked against a scan
    Verdict {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        domain: Option<DomainArg>,
        #[command(flatten)]
        strip: StripArgs,
        #[arg(long)]
        harmonics: Option<usize>,
    },
    /// Rerun from a saved configuration (for example an effective_config.toml)
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in presets
    Presets,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    /// two-column `x3 rho` table
    #[arg(long)]
    pub profile_file: Option<PathBuf>,
    /// output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long = "n")]
    pub n_grid: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub margin: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long = "a")]
    pub a: Option<f64>,
    #[arg(long)]
    pub mu1: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub l1: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ModeArgs {
    #[arg(long)]
    pub xi1: Option<f64>,
    #[arg(long)]
    pub xi2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct StripArgs {
    #[arg(long)]
    pub strip_a: Option<f64>,
    #[arg(long)]
    pub strip_b: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Qep,
    FixedPoint,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InitArg {
    Eigen,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DomainArg {
    Slab3d,
    Slab2d,
    Strip,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

/// Flag overlay in the layout of the config file.
#[derive(Default)]
struct Overlay(toml::Table);

impl Overlay {
    fn set(&mut self, section: &str, key: &str, v: Option<impl Into<toml::Value>>) {
        if let Some(v) = v {
            let t = self.0.entry(section).or_insert_with(|| toml::Value::Table(toml::Table::new()));
            if let toml::Value::Table(t) = t {
                t.insert(key.into(), v.into());
            }
        }
    }

    fn set_str(&mut self, section: &str, key: &str, v: Option<&str>) {
        self.set(section, key, v.map(str::to_string));
    }
}

fn parse_list(field: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| Error::config(field, format!("`{t}`: {e}"))))
        .collect()
}

fn common_overlay(c: &Common, o: &mut Overlay) -> Result<Option<toml::Table>> {
    o.set_str("profile", "preset", c.preset.as_deref());
    o.set("profile", "file", c.profile_file.as_ref().map(|p| p.display().to_string()));
    o.set("profile", "margin", c.margin);
    o.set("output", "dir", c.out.as_ref().map(|p| p.display().to_string()));
    o.set_str("output", "format", c.format.map(|f| match f {
        FormatArg::Csv => "csv",
        FormatArg::Json => "json",
    }));
    o.set("numerics", "n_grid", c.n_grid.map(|n| n as i64));
    o.set("numerics", "tol", c.tol);
    for (k, v) in [("lambda", c.lambda), ("gamma", c.gamma), ("A", c.a), ("mu1", c.mu1), ("nu", c.nu), ("g", c.g)] {
        o.set("params", k, v);
    }
    o.set("domain", "l1", c.l1);
    o.set("domain", "l2", c.l2);
    c.config.as_deref().map(read_table).transpose()
}

fn method_str(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Qep => "qep",
        MethodArg::FixedPoint => "fixed_point",
        MethodArg::Both => "both",
    }
}

/// Turn parsed arguments into a resolved configuration.
pub fn parse_config(cli: &Cli) -> Result<Option<RunConfig>> {
    let mut o = Overlay::default();
    let (command, file) = match &cli.command {
        Sub::Presets => return Ok(None),
        Sub::Run { config, out } => {
            let file = read_table(config)?;
            let cmd: Command = file
                .get("command")
                .cloned()
                .ok_or_else(|| Error::config("command", "missing"))?
                .try_into()
                .map_err(|e: toml::de::Error| Error::config("command", e.message().to_string()))?;
            o.set("output", "dir", out.as_ref().map(|p| p.display().to_string()));
            (cmd, Some(file))
        }
        Sub::Equilibrium(c) => (Command::Equilibrium, common_overlay(c, &mut o)?),
        Sub::Criteria { common, strip } => {
            o.set("domain", "strip_a", strip.strip_a);
            o.set("domain", "strip_b", strip.strip_b);
            (Command::Criteria, common_overlay(common, &mut o)?)
        }
        Sub::Growth { common, mode, method } => {
            o.set("numerics", "xi1", mode.xi1);
            o.set("numerics", "xi2", mode.xi2);
            o.set_str("numerics", "method", method.map(method_str));
            (Command::Growth, common_overlay(common, &mut o)?)
        }
        Sub::Scan { common, xi1_values, xi2_values, harmonics, method } => {
            if let Some(s) = xi1_values {
                o.set("numerics", "xi1_values", Some(parse_list("numerics.xi1_values", s)?));
            }
            if let Some(s) = xi2_values {
                o.set("numerics", "xi2_values", Some(parse_list("numerics.xi2_values", s)?));
            }
            o.set("numerics", "harmonics", harmonics.map(|h| h as i64));
            o.set_str("numerics", "method", method.map(method_str));
            (Command::Scan, common_overlay(common, &mut o)?)
        }
        Sub::Evolve { common, mode, t_end, dt, init, seed, window, samples } => {
            o.set("numerics", "xi1", mode.xi1);
            o.set("numerics", "xi2", mode.xi2);
            o.set("numerics", "t_end", *t_end);
            o.set("numerics", "dt", *dt);
            o.set_str("numerics", "init", init.map(|i| match i {
                InitArg::Eigen => "eigen",
                InitArg::Random => "random",
            }));
            o.set("numerics", "seed", seed.map(|s| s as i64));
            o.set("numerics", "window", *window);
            o.set("numerics", "samples", samples.map(|s| s as i64));
            (Command::Evolve, common_overlay(common, &mut o)?)
        }
        Sub::Verdict { common, domain, strip, harmonics } => {
            o.set_str("domain", "kind", domain.map(|d| match d {
                DomainArg::Slab3d => "slab3d",
                DomainArg::Slab2d => "slab2d",
                DomainArg::Strip => "strip",
            }));
            o.set("domain", "strip_a", strip.strip_a);
            o.set("domain", "strip_b", strip.strip_b);
            o.set("numerics", "harmonics", harmonics.map(|h| h as i64));
            (Command::Verdict, common_overlay(common, &mut o)?)
        }
    };
    RunConfig::resolve(command, file, o.0).map(Some)
}

/// Parse, run and map the outcome to an exit code: 0 success, 1 invalid
/// input, 2 numerical failure.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = parse_config(&cli).and_then(|cfg| match cfg {
        None => {
            for name in PRESET_NAMES {
                println!("{name:20} {}", preset(name).map(|p| p.summary).unwrap_or(""));
            }
            Ok(0)
        }
        Some(cfg) => run(&cfg),
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}
