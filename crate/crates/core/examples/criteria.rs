//! Pointwise criteria and threshold constants for each preset.

use parker::cli::{preset, PRESET_NAMES};
use parker::criteria::{evaluate_criteria, poincare_ratio};

fn main() -> parker::Result<()> {
    println!("Poincare ratio on (0, pi): {:.6}", poincare_ratio(0.0, std::f64::consts::PI, 512)?);
    println!("{:20} {:>5} {:>5} {:>5} {:>5} {:>8} {:>8} {:>8}", "preset", "S", "B", "T", "RT", "kappa", "xi2d", "xi3d");
    for name in PRESET_NAMES {
        let ps = preset(name)?;
        let p = ps.build(128)?;
        let r = evaluate_criteria(&p, (0.0, 1.0), ps.l2)?;
        println!(
            "{name:20} {:>5} {:>5} {:>5} {:>5} {:8.4} {:8.4} {:8.4}",
            r.schwarzschild, r.buoyancy_flag, r.tserkovnikov, r.rayleigh_taylor, r.kappa, r.xi2d, r.xi3d
        );
    }
    Ok(())
}
