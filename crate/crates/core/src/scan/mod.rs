//! Wavenumber sweeps and the combined stability verdict.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{evaluate_criteria, CriteriaReport};
use crate::energy::ModeSpec;
use crate::error::{Error, Result};
use crate::profiles::EquilibriumProfile;
use crate::spectral::{assemble_operators, growth_rate_fixed_point, solve_qep, FixedPointOutcome};

/// Growth rates at or below this count as no growth.
pub const UNSTABLE_FLOOR: f64 = 1e-8;

/// Harmonics `k / L` for `k = 0..=DEFAULT_HARMONICS`.
pub const DEFAULT_HARMONICS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMethod {
    Qep,
    FixedPoint,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub xi1_values: Vec<f64>,
    pub xi2_values: Vec<f64>,
    pub l1: f64,
    pub l2: f64,
    /// Must equal the node count of the profile grid.
    pub n_grid: usize,
    pub method: ScanMethod,
    pub tol: f64,
}

impl ScanSpec {
    /// The modes admitted by periods `2 pi L1`, `2 pi L2`: `k / L` for
    /// `k = 0..=harmonics`.
    pub fn harmonics(l1: f64, l2: f64, harmonics: usize, n_grid: usize, method: ScanMethod) -> Self {
        let h = |l: f64| (0..=harmonics).map(|k| k as f64 / l).collect();
        Self { xi1_values: h(l1), xi2_values: h(l2), l1, l2, n_grid, method, tol: 1e-8 }
    }

    pub fn validate(&self, prof: &EquilibriumProfile) -> Result<()> {
        if self.xi1_values.is_empty() || self.xi2_values.is_empty() {
            return Err(Error::InvalidSpec("empty wavenumber grid".into()));
        }
        let bad = |v: &[f64]| v.iter().any(|x| !(x.is_finite() && *x >= 0.0));
        if bad(&self.xi1_values) || bad(&self.xi2_values) {
            return Err(Error::InvalidSpec("wavenumbers must be finite and non-negative".into()));
        }
        if !(self.l1 > 0.0 && self.l2 > 0.0) {
            return Err(Error::InvalidSpec(format!("period lengths must be positive, got L1={}, L2={}", self.l1, self.l2)));
        }
        if self.n_grid != prof.grid.n {
            return Err(Error::InvalidSpec(format!("n_grid {} does not match the profile grid ({})", self.n_grid, prof.grid.n)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidSpec(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionRow {
    pub xi1: f64,
    pub xi2: f64,
    pub re_lambda: f64,
    pub im_lambda: f64,
    pub method: String,
    pub residual: f64,
    /// residual above tolerance or solver failure
    pub flagged: bool,
}

/// Unstable `xi1` range at one `xi2`; `None` bounds mean no unstable row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub xi2: f64,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    /// Largest real part over all modes except `(0, 0)`.
    pub max_growth: f64,
    pub argmax: Option<(f64, f64)>,
    pub bands: Vec<Band>,
    pub flagged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionTable {
    pub rows: Vec<DispersionRow>,
    pub summary: ScanSummary,
}

impl DispersionTable {
    pub const HEADER: &'static str = "xi1,xi2,re_lambda,im_lambda,method,residual";

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(Self::HEADER.split(','))?;
        for r in &self.rows {
            let f = |v: f64| format!("{v:.16e}");
            out.write_record([f(r.xi1), f(r.xi2), f(r.re_lambda), f(r.im_lambda), r.method.clone(), f(r.residual)])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Rows at `xi2` (exact match) by ascending `xi1`.
    pub fn at_xi2(&self, xi2: f64) -> impl Iterator<Item = &DispersionRow> {
        self.rows.iter().filter(move |r| r.xi2 == xi2)
    }
}

fn failed_row(mode: ModeSpec, method: &str) -> DispersionRow {
    DispersionRow { xi1: mode.xi1, xi2: mode.xi2, re_lambda: f64::NAN, im_lambda: f64::NAN, method: method.into(), residual: f64::NAN, flagged: true }
}

fn solve_mode(prof: &EquilibriumProfile, mode: ModeSpec, spec: &ScanSpec) -> Vec<DispersionRow> {
    let ops = assemble_operators(prof, mode);
    let mut rows = Vec::new();
    if matches!(spec.method, ScanMethod::Qep | ScanMethod::Both) {
        rows.push(match solve_qep(&ops, spec.tol) {
            Ok(sol) => match sol.top() {
                Some(t) => DispersionRow {
                    xi1: mode.xi1,
                    xi2: mode.xi2,
                    re_lambda: t.lam.re,
                    im_lambda: t.lam.im,
                    method: "qep".into(),
                    residual: t.residual,
                    flagged: !t.accepted,
                },
                // the iterative path found no positive real eigenvalue
                None => DispersionRow { xi1: mode.xi1, xi2: mode.xi2, re_lambda: 0.0, im_lambda: 0.0, method: "qep".into(), residual: 0.0, flagged: false },
            },
            Err(_) => failed_row(mode, "qep"),
        });
    }
    if matches!(spec.method, ScanMethod::FixedPoint | ScanMethod::Both) {
        rows.push(match growth_rate_fixed_point(&ops, spec.tol) {
            Ok(FixedPointOutcome::Growth(g)) => DispersionRow {
                xi1: mode.xi1,
                xi2: mode.xi2,
                re_lambda: g.lam.re,
                im_lambda: 0.0,
                method: "fixed_point".into(),
                residual: g.residual,
                flagged: !g.accepted,
            },
            // no positive growth rate: reported as zero
            Ok(FixedPointOutcome::Stable { .. }) => DispersionRow { xi1: mode.xi1, xi2: mode.xi2, re_lambda: 0.0, im_lambda: 0.0, method: "fixed_point".into(), residual: 0.0, flagged: false },
            Err(_) => failed_row(mode, "fixed_point"),
        });
    }
    rows
}

/// One solve per `(xi1, xi2)`, in parallel. Solver failures become
/// flagged rows and never abort the sweep.
pub fn dispersion_scan(prof: &EquilibriumProfile, spec: &ScanSpec) -> Result<DispersionTable> {
    spec.validate(prof)?;
    let modes: Vec<ModeSpec> = spec
        .xi2_values
        .iter()
        .flat_map(|&xi2| spec.xi1_values.iter().map(move |&xi1| ModeSpec { xi1, xi2 }))
        .collect();
    let mut rows: Vec<DispersionRow> = modes.par_iter().flat_map_iter(|&m| solve_mode(prof, m, spec)).collect();
    rows.sort_by(|a, b| a.xi2.total_cmp(&b.xi2).then(a.xi1.total_cmp(&b.xi1)).then(a.method.cmp(&b.method)));
    let summary = summarize(&rows, &spec.xi2_values);
    Ok(DispersionTable { rows, summary })
}

fn summarize(rows: &[DispersionRow], xi2_values: &[f64]) -> ScanSummary {
    let counted = || rows.iter().filter(|r| !(r.xi1 == 0.0 && r.xi2 == 0.0) && r.re_lambda.is_finite());
    let best = counted().max_by(|a, b| a.re_lambda.total_cmp(&b.re_lambda));
    let mut xi2s = xi2_values.to_vec();
    xi2s.sort_by(f64::total_cmp);
    xi2s.dedup();
    let bands = xi2s
        .into_iter()
        .map(|xi2| {
            let unstable = || counted().filter(|r| r.xi2 == xi2 && r.re_lambda > UNSTABLE_FLOOR).map(|r| r.xi1);
            Band { xi2, lo: unstable().reduce(f64::min), hi: unstable().reduce(f64::max) }
        })
        .collect();
    ScanSummary {
        max_growth: best.map_or(0.0, |r| r.re_lambda),
        argmax: best.map(|r| (r.xi1, r.xi2)),
        bands,
        flagged: rows.iter().filter(|r| r.flagged).count(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// horizontally periodic slab with both horizontal wavenumbers
    Slab3d,
    /// periodic in `x1` only, `xi2 = 0`
    Slab2d,
    /// `a < x1 < b` with no-slip walls; only the sufficient bound applies
    Strip { a: f64, b: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub domain: Domain,
    pub criteria: CriteriaReport,
    /// Schwarzschild somewhere and `L1 > 1 / xi3d`
    pub schwarzschild_branch: bool,
    /// Tserkovnikov somewhere
    pub tserkovnikov_branch: bool,
    /// `kappa > 1` and `L1 > 1 / xi2d`
    pub planar_branch: bool,
    pub max_growth: f64,
    pub argmax: Option<(f64, f64)>,
    pub consistent: bool,
    pub status: String,
    pub diagnostics: Vec<String>,
    pub table: Option<DispersionTable>,
}

/// Evaluate the instability hypotheses from the criteria and, on slabs,
/// compare them with the scanned growth rates.
pub fn stability_verdict(prof: &EquilibriumProfile, spec: &ScanSpec, domain: Domain) -> Result<Verdict> {
    let strip = match domain {
        Domain::Strip { a, b } => (a, b),
        _ => (0.0, 2.0 * std::f64::consts::PI * spec.l1),
    };
    let criteria = evaluate_criteria(prof, strip, spec.l2)?;
    let beyond = |xi: f64| xi > 0.0 && spec.l1 * xi > 1.0;
    let schwarzschild_branch = criteria.schwarzschild && beyond(criteria.xi3d);
    let tserkovnikov_branch = criteria.tserkovnikov;
    let planar_branch = criteria.kappa > 1.0 && beyond(criteria.xi2d);
    let mut diagnostics = Vec::new();
    let mut v = Verdict {
        domain,
        criteria,
        schwarzschild_branch,
        tserkovnikov_branch,
        planar_branch,
        max_growth: 0.0,
        argmax: None,
        consistent: true,
        status: String::new(),
        diagnostics: Vec::new(),
        table: None,
    };
    if let Domain::Strip { .. } = domain {
        v.status = if v.criteria.strip_stable_sufficient {
            "stable (sufficient bound)".into()
        } else {
            "inconclusive (sufficient bound not met)".into()
        };
        return Ok(v);
    }
    let mut spec = spec.clone();
    let claimed = if domain == Domain::Slab2d {
        spec.xi2_values = vec![0.0];
        planar_branch
    } else {
        schwarzschild_branch || tserkovnikov_branch || planar_branch
    };
    let table = dispersion_scan(prof, &spec)?;
    v.max_growth = table.summary.max_growth;
    v.argmax = table.summary.argmax;
    let unstable = v.max_growth > UNSTABLE_FLOOR;
    if claimed && !unstable {
        v.consistent = false;
        diagnostics.push(format!("instability hypothesis holds but the largest scanned growth rate is {:.3e}", v.max_growth));
    }
    if table.summary.flagged > 0 {
        diagnostics.push(format!("{} rows flagged by the solver", table.summary.flagged));
    }
    v.status = if unstable {
        "unstable".into()
    } else {
        "no instability detected at scanned modes".into()
    };
    v.diagnostics = diagnostics;
    v.table = Some(table);
    Ok(v)
}

#[cfg(test)]
mod tests;
