use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::config::{Command, Format, InitKind, RunConfig};
use crate::criteria::evaluate_criteria;
use crate::energy::{ModalField, ModeSpec};
use crate::error::{Error, Result};
use crate::evolve::{evolve_mode, fit_growth_rate, lift_eigenfunction, random_init, stable_dt};
use crate::profiles::{balance_tolerance, build_equilibrium, build_grid, equilibrium_residual, equilibrium_residual_fd, EquilibriumProfile};
use crate::scan::{dispersion_scan, stability_verdict, DispersionTable};
use crate::spectral::{assemble_operators, growth_rate_fixed_point, solve_qep, FixedPointOutcome, GrowthResult};

pub fn build_profile(cfg: &RunConfig) -> Result<EquilibriumProfile> {
    let grid = build_grid(cfg.profile.lo, cfg.profile.hi, cfg.numerics.n_grid)?;
    build_equilibrium(cfg.physical_params()?, &cfg.density()?, grid, cfg.profile.margin)
}

enum Cell {
    Num(f64),
    Text(String),
}

struct Table {
    name: &'static str,
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(name: &'static str, header: &[&'static str]) -> Self {
        Self { name, header: header.to_vec(), rows: Vec::new() }
    }

    fn push_nums(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&v| Cell::Num(v)).collect());
    }

    fn write(&self, dir: &Path, format: Format) -> Result<()> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", self.name)))?;
                w.write_record(&self.header)?;
                for r in &self.rows {
                    w.write_record(r.iter().map(|c| match c {
                        Cell::Num(v) => format!("{v:.16e}"),
                        Cell::Text(s) => s.clone(),
                    }))?;
                }
                w.flush()?;
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let obj: Map<String, Value> = self
                            .header
                            .iter()
                            .zip(r)
                            .map(|(h, c)| {
                                let v = match c {
                                    Cell::Num(v) => json!(v),
                                    Cell::Text(s) => json!(s),
                                };
                                (h.to_string(), v)
                            })
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                write_json(dir, self.name, &rows)?;
            }
        }
        Ok(())
    }
}

fn write_json<T: Serialize + ?Sized>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(dir.join(format!("{name}.json")), text + "\n")?;
    Ok(())
}

/// Execute the configured command, writing its artifacts and the
/// effective configuration into the output directory.
pub fn run(cfg: &RunConfig) -> Result<i32> {
    let dir = cfg.output.dir.as_path();
    std::fs::create_dir_all(dir)?;
    cfg.write_effective(dir)?;
    let prof = build_profile(cfg)?;
    match cfg.command {
        Command::Equilibrium => equilibrium(cfg, &prof, dir),
        Command::Criteria => criteria(cfg, &prof, dir),
        Command::Growth => growth(cfg, &prof, dir),
        Command::Scan => scan(cfg, &prof, dir),
        Command::Evolve => evolve(cfg, &prof, dir),
        Command::Verdict => verdict(cfg, &prof, dir),
    }
}

fn equilibrium(cfg: &RunConfig, prof: &EquilibriumProfile, dir: &Path) -> Result<i32> {
    let mut t = Table::new("profile", &["x", "rho", "drho", "pressure", "dpressure", "g", "primitive", "m", "dm", "m2prime"]);
    let s = &prof.nodes;
    for i in 0..s.len() {
        t.push_nums(&[s.x[i], s.rho[i], s.drho[i], s.pressure[i], s.dpressure[i], s.g[i], s.primitive[i], s.m[i], s.dm[i], s.m2prime[i]]);
    }
    t.write(dir, cfg.output.format)?;
    let residual = equilibrium_residual(prof);
    let tolerance = balance_tolerance(prof);
    let balanced = residual <= tolerance;
    write_json(
        dir,
        "equilibrium",
        &json!({
            "n": prof.grid.n,
            "h": prof.grid.h,
            "c": prof.c,
            "residual": residual,
            "residual_fd": equilibrium_residual_fd(prof),
            "tolerance": tolerance,
            "balanced": balanced,
            "min_m2": prof.min_m2(),
        }),
    )?;
    println!("equilibrium residual {residual:.3e} (tolerance {tolerance:.3e})");
    Ok(if balanced { 0 } else { 2 })
}

fn criteria(cfg: &RunConfig, prof: &EquilibriumProfile, dir: &Path) -> Result<i32> {
    let r = evaluate_criteria(prof, (cfg.domain.strip_a, cfg.domain.strip_b), cfg.domain.l2)?;
    let mut t = Table::new("criteria", &["x", "schwarzschild", "buoyancy", "tserkovnikov", "rayleigh_taylor"]);
    for i in 0..prof.nodes.len() {
        t.push_nums(&[prof.nodes.x[i], r.schwarzschild_margin[i], r.buoyancy[i], r.tserkovnikov_margin[i], r.rt_margin[i]]);
    }
    t.write(dir, cfg.output.format)?;
    write_json(
        dir,
        "criteria",
        &json!({
            "kappa": r.kappa,
            "xi2d": r.xi2d,
            "xi3d": r.xi3d,
            "l2": cfg.domain.l2,
            "varpi": r.varpi,
            "strip": [cfg.domain.strip_a, cfg.domain.strip_b],
            "strip_bound": r.strip_bound,
            "strip_stable_sufficient": r.strip_stable_sufficient,
            "schwarzschild": r.schwarzschild,
            "buoyancy": r.buoyancy_flag,
            "tserkovnikov": r.tserkovnikov,
            "rayleigh_taylor": r.rayleigh_taylor,
        }),
    )?;
    println!("kappa {:.6} xi2d {:.6} xi3d {:.6}", r.kappa, r.xi2d, r.xi3d);
    Ok(0)
}

fn brief(g: &GrowthResult) -> Value {
    json!({ "re": g.lam.re, "im": g.lam.im, "residual": g.residual, "accepted": g.accepted })
}

fn eigenfunction_table(f: &ModalField, prof: &EquilibriumProfile) -> Table {
    let mut t = Table::new("eigenfunction", &["component", "x", "value"]);
    for (name, xs, vs) in [("phi", &prof.mids.x, &f.phi), ("theta", &prof.mids.x, &f.theta), ("psi", &prof.nodes.x, &f.psi)] {
        for (x, v) in xs.iter().zip(vs.iter()) {
            t.rows.push(vec![Cell::Text(name.into()), Cell::Num(*x), Cell::Num(*v)]);
        }
    }
    t
}

fn growth(cfg: &RunConfig, prof: &EquilibriumProfile, dir: &Path) -> Result<i32> {
    use crate::scan::ScanMethod;
    let mode = ModeSpec::new(cfg.numerics.xi1, cfg.numerics.xi2)?;
    let ops = assemble_operators(prof, mode);
    let tol = cfg.numerics.tol;
    let mut report = json!({ "xi1": mode.xi1, "xi2": mode.xi2, "n": prof.grid.n });
    let mut field = None;
    let mut code = 0;
    if matches!(cfg.numerics.method, ScanMethod::Qep | ScanMethod::Both) {
        let sol = solve_qep(&ops, tol)?;
        let positive: Vec<Value> = sol.pairs.iter().filter(|p| p.lam.re > 0.0).map(brief).collect();
        if let Some(t) = sol.top() {
            if !t.accepted {
                code = 2;
            }
            field = Some(t.field.clone());
            println!("qep: Lambda = {:.10} {:+.3e}i (residual {:.2e})", t.lam.re, t.lam.im, t.residual);
        }
        report["qep"] = json!({ "top": sol.top().map(brief), "positive": positive, "complete": sol.complete });
    }
    if matches!(cfg.numerics.method, ScanMethod::FixedPoint | ScanMethod::Both) {
        match growth_rate_fixed_point(&ops, tol)? {
            FixedPointOutcome::Growth(g) => {
                println!("fixed point: Lambda = {:.10}", g.lam.re);
                report["fixed_point"] = json!({ "status": "growth", "lambda": g.lam.re, "residual": g.residual });
                field.get_or_insert(g.field);
            }
            FixedPointOutcome::Stable { alpha0 } => {
                println!("fixed point: no positive growth rate");
                report["fixed_point"] = json!({ "status": "stable", "alpha0": alpha0 });
            }
        }
    }
    write_json(dir, "growth", &report)?;
    if let Some(f) = field {
        eigenfunction_table(&f, prof).write(dir, cfg.output.format)?;
    }
    Ok(code)
}

fn write_table(table: &DispersionTable, dir: &Path, format: Format) -> Result<()> {
    let mut t = Table::new("dispersion", &["xi1", "xi2", "re_lambda", "im_lambda", "method", "residual"]);
    for r in &table.rows {
        t.rows.push(vec![
            Cell::Num(r.xi1),
            Cell::Num(r.xi2),
            Cell::Num(r.re_lambda),
            Cell::Num(r.im_lambda),
            Cell::Text(r.method.clone()),
            Cell::Num(r.residual),
        ]);
    }
    t.write(dir, format)
}

fn scan(cfg: &RunConfig, prof: &EquilibriumProfile, dir: &Path) -> Result<i32> {
    let spec = cfg.scan_spec();
    let table = dispersion_scan(prof, &spec)?;
    write_table(&table, dir, cfg.output.format)?;
    write_json(dir, "summary", &json!({ "spec": spec, "summary": table.summary }))?;
    println!("{} rows, max growth {:.6e} at {:?}, {} flagged", table.rows.len(), table.summary.max_growth, table.summary.argmax, table.summary.flagged);
    Ok(if table.summary.flagged > 0 { 2 } else { 0 })
}

fn evolve(cfg: &RunConfig, prof: &EquilibriumProfile, dir: &Path) -> Result<i32> {
    let n = &cfg.numerics;
    let mode = ModeSpec::new(n.xi1, n.xi2)?;
    let ops = assemble_operators(prof, mode);
    let reference = solve_qep(&ops, n.tol)?.top().filter(|t| t.lam.re > 0.0 && t.lam.im == 0.0).cloned();
    let init = match n.init {
        InitKind::Eigen => {
            let r = reference
                .as_ref()
                .ok_or_else(|| Error::InvalidMode("no real unstable eigenpair to lift; use --init random".into()))?;
            lift_eigenfunction(prof, &r.field, r.lam.re)?
        }
        InitKind::Random => random_init(prof, mode, n.seed),
    };
    let dt = n.dt.unwrap_or_else(|| stable_dt(prof, mode));
    let t_end = n.t_end.unwrap_or_else(|| reference.as_ref().map_or(50.0, |r| 7.0 / r.lam.re));
    let (traj, _) = evolve_mode(prof, mode, &init, t_end, dt, n.samples)?;
    let mut t = Table::new("trajectory", &["t", "amplitude"]);
    for (a, b) in traj.times.iter().zip(&traj.amplitude) {
        t.push_nums(&[*a, *b]);
    }
    t.write(dir, cfg.output.format)?;
    let fit = fit_growth_rate(&traj, n.window);
    let (sigma, rms) = match &fit {
        Ok((s, r)) => (Some(*s), Some(*r)),
        Err(_) => (None, None),
    };
    let lam = reference.as_ref().map(|r| r.lam.re);
    let rel = match (sigma, lam) {
        (Some(s), Some(l)) => Some((s - l).abs() / l),
        _ => None,
    };
    write_json(
        dir,
        "evolve",
        &json!({
            "xi1": mode.xi1, "xi2": mode.xi2, "dt": dt, "t_end": t_end, "steps": traj.steps,
            "sigma": sigma, "rms": rms, "div_drift": traj.div_drift,
            "reference_lambda": lam, "relative_error": rel,
            "fit_error": fit.as_ref().err().map(|e| e.to_string()),
        }),
    )?;
    match sigma {
        Some(s) => println!("fitted sigma {s:.8} (spectral {lam:?}), div drift {:.2e}", traj.div_drift),
        None => println!("fit failed: {}", fit.as_ref().err().map(|e| e.to_string()).unwrap_or_default()),
    }
    fit.map(|_| 0)
}

fn verdict(cfg: &RunConfig, prof: &EquilibriumProfile, dir: &Path) -> Result<i32> {
    let mut v = stability_verdict(prof, &cfg.scan_spec(), cfg.domain())?;
    if let Some(table) = v.table.take() {
        write_table(&table, dir, cfg.output.format)?;
    }
    let mut value = serde_json::to_value(&v)?;
    if let Value::Object(m) = &mut value {
        m.remove("table");
        if let Some(Value::Object(c)) = m.get_mut("criteria") {
            for k in ["schwarzschild_margin", "buoyancy", "tserkovnikov_margin", "rt_margin"] {
                c.remove(k);
            }
        }
    }
    write_json(dir, "verdict", &value)?;
    println!("{}; consistent: {}", v.status, v.consistent);
    for d in &v.diagnostics {
        println!("  {d}");
    }
    Ok(0)
}
