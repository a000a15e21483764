//! Load a density table from disk and build the equilibrium on its span.

use parker::profiles::{build_equilibrium, build_grid, equilibrium_residual, load_tabulated_profile, Gravity, PhysicalParams};

fn main() -> parker::Result<()> {
    let path = std::env::temp_dir().join("parker_density.txt");
    let rows: String = (0..=40)
        .map(|i| {
            let x = -1.0 + i as f64 * 0.05;
            format!("{x:.3} {:.12}\n", (-x / 0.8).exp())
        })
        .collect();
    std::fs::write(&path, format!("# x3 rho\n{rows}"))?;

    let dens = load_tabulated_profile(&path)?;
    let (lo, hi) = dens.support().expect("tables have a support");
    let params = PhysicalParams::new(1.0, 1.3, 1.0, 0.02, 0.01, Gravity::Constant(1.5))?;
    let prof = build_equilibrium(params, &dens, build_grid(lo, hi, 128)?, 0.4)?;
    println!("span [{lo}, {hi}], C = {:.6}, residual {:.2e}", prof.c, equilibrium_residual(&prof));
    for j in (0..prof.nodes.len()).step_by(32) {
        println!("x3 = {:+.4}  rho = {:.6}  m = {:.6}", prof.nodes.x[j], prof.nodes.rho[j], prof.nodes.m[j]);
    }
    Ok(())
}
