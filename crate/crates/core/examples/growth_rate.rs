//! Growth rate of one mode from the quadratic eigenproblem and from the
//! variational fixed point.

use parker::cli::preset;
use parker::energy::{energy_ec, ModeSpec};
use parker::spectral::{assemble_operators, growth_rate_fixed_point, solve_qep, FixedPointOutcome};

fn main() -> parker::Result<()> {
    let ps = preset("schwarzschild-exp")?;
    let p = ps.build(128)?;
    let mode = ModeSpec::new(1.0 / ps.l1, 1.0 / ps.l2)?;
    let ops = assemble_operators(&p, mode);

    let sol = solve_qep(&ops, 1e-8)?;
    println!("eigenvalues with positive real part:");
    for pair in sol.pairs.iter().filter(|q| q.lam.re > 0.0) {
        println!("  {:.10} {:+.2e}i  backward error {:.1e}", pair.lam.re, pair.lam.im, pair.residual);
    }
    match growth_rate_fixed_point(&ops, 1e-12)? {
        FixedPointOutcome::Growth(g) => {
            let lam = g.lam.re;
            println!("fixed point {lam:.10}, E_c(u, L) - L^2 = {:.1e}", energy_ec(&g.field, lam, &p) - lam * lam);
        }
        FixedPointOutcome::Stable { alpha0 } => println!("no growth, alpha(0) = {alpha0:.3e}"),
    }
    Ok(())
}
