//! The frequency energy in display and completed-square form, and the
//! explicit maximising construction for a given vertical profile.

use parker::cli::preset;
use parker::energy::{energy_tilde, energy_tilde_completed, newcomb_construction, reduced_integral, ModalField, ModeSpec};

fn main() -> parker::Result<()> {
    let ps = preset("schwarzschild-exp")?;
    let p = ps.build(64)?;
    let n = p.grid.n;
    let mode = ModeSpec::new(0.5, 1.0)?;

    let wave = |k: f64, len: usize, shift: f64| -> Vec<f64> { (0..len).map(|i| (k * i as f64 / len as f64 + shift).sin()).collect() };
    let f = ModalField { phi: wave(3.0, n + 1, 0.2), theta: wave(5.0, n + 1, 1.0), psi: wave(std::f64::consts::PI, n, 0.0), mode };
    println!("E~ display {:.12}  completed {:.12}", energy_tilde(&f, &p), energy_tilde_completed(&f, &p)?);

    let best = newcomb_construction(&f.psi, mode, &p)?;
    println!(
        "with the constructed phi, theta: E~ {:.12}  reduced integral {:.12}  (arbitrary phi, theta gave {:.6})",
        energy_tilde(&best, &p),
        reduced_integral(&f.psi, mode, &p)?,
        energy_tilde(&f, &p)
    );
    Ok(())
}
