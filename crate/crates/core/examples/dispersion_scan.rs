//! Growth rate over the admissible horizontal harmonics, written as CSV.

use parker::cli::preset;
use parker::criteria::xi_3d;
use parker::scan::{dispersion_scan, ScanMethod, ScanSpec};

fn main() -> parker::Result<()> {
    let ps = preset("schwarzschild-exp")?;
    let p = ps.build(64)?;
    let spec = ScanSpec { xi2_values: vec![1.0 / ps.l2], ..ScanSpec::harmonics(ps.l1, ps.l2, 12, 64, ScanMethod::Qep) };
    let table = dispersion_scan(&p, &spec)?;
    table.write_csv(std::io::stdout())?;
    let band = &table.summary.bands[0];
    eprintln!("unstable xi1 in [{:?}, {:?}], xi3d = {:.4}", band.lo, band.hi, xi_3d(&p, ps.l2)?);
    Ok(())
}
