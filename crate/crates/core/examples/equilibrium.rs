//! Build every preset equilibrium and print its balance residual.

use parker::cli::{preset, PRESET_NAMES};
use parker::profiles::{balance_tolerance, equilibrium_residual, equilibrium_residual_fd};

fn main() -> parker::Result<()> {
    for name in PRESET_NAMES {
        let p = preset(name)?.build(256)?;
        println!(
            "{name:20} C = {:8.4}  min m^2 = {:.4}  residual {:.1e} (fd {:.1e}, tol {:.1e})",
            p.c,
            p.min_m2(),
            equilibrium_residual(&p),
            equilibrium_residual_fd(&p),
            balance_tolerance(&p)
        );
    }
    Ok(())
}
