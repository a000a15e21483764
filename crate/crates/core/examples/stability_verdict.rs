//! Instability hypotheses against scanned growth for each preset.

use parker::cli::{preset, PRESET_NAMES};
use parker::scan::{stability_verdict, Domain, ScanMethod, ScanSpec};

fn main() -> parker::Result<()> {
    for name in PRESET_NAMES {
        let ps = preset(name)?;
        let p = ps.build(48)?;
        let spec = ScanSpec::harmonics(ps.l1, ps.l2, 4, 48, ScanMethod::Qep);
        let v = stability_verdict(&p, &spec, Domain::Slab3d)?;
        println!(
            "{name:20} S-branch {:5} T-branch {:5} planar {:5} max growth {:+.4e} -> {} (consistent: {})",
            v.schwarzschild_branch, v.tserkovnikov_branch, v.planar_branch, v.max_growth, v.status, v.consistent
        );
    }
    let p = preset("schwarzschild-exp")?.build(48)?.with_field_scale(20.0);
    let spec = ScanSpec::harmonics(4.0, 1.0, 4, 48, ScanMethod::Qep);
    let v = stability_verdict(&p, &spec, Domain::Strip { a: 0.0, b: 0.5 })?;
    println!("strong field in a narrow strip: {}", v.status);
    Ok(())
}
