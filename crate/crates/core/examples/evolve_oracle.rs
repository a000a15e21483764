//! Integrate a mode in time and compare the fitted rate with the spectrum.

use parker::cli::preset;
use parker::energy::ModeSpec;
use parker::evolve::{evolve_mode, fit_growth_rate, lift_eigenfunction, random_init, stable_dt};
use parker::spectral::{assemble_operators, solve_qep};

fn main() -> parker::Result<()> {
    let ps = preset("tserkovnikov-layer")?;
    let p = ps.build(96)?;
    let mode = ModeSpec::new(0.0, 1.0 / ps.l2)?;
    let top = solve_qep(&assemble_operators(&p, mode), 1e-8)?.top().cloned().expect("unstable mode");
    let lam = top.lam.re;
    let dt = stable_dt(&p, mode);

    let (traj, _) = evolve_mode(&p, mode, &lift_eigenfunction(&p, &top.field, lam)?, 7.0 / lam, dt, 1000)?;
    let (sigma, rms) = fit_growth_rate(&traj, 0.5)?;
    println!("eigenmode start: sigma {sigma:.8} vs Lambda {lam:.8} (rms {rms:.1e}, div N drift {:.1e})", traj.div_drift);

    let (traj, _) = evolve_mode(&p, mode, &random_init(&p, mode, 42), 14.0 / lam, dt, 1000)?;
    let (sigma, rms) = fit_growth_rate(&traj, 0.3)?;
    println!("random start:    sigma {sigma:.8} vs Lambda {lam:.8} (rms {rms:.1e})");
    Ok(())
}
