//! Thresholds shrink as the horizontal field is scaled up.

use parker::cli::preset;
use parker::criteria::{kappa, xi_2d, xi_3d};

fn main() -> parker::Result<()> {
    let ps = preset("strong-field")?;
    let base = ps.build(128)?;
    println!("{:>6} {:>8} {:>8} {:>8}", "scale", "kappa", "xi2d", "xi3d");
    for s in [1.0, 1.5, 2.0, 4.0, 8.0, 16.0] {
        let p = base.with_field_scale(s);
        println!("{s:6.1} {:8.4} {:8.4} {:8.4}", kappa(&p)?, xi_2d(&p)?, xi_3d(&p, ps.l2)?);
    }
    Ok(())
}
