use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::profiles::{build_equilibrium, build_grid, default_margin, DensitySpec, EquilibriumProfile, Gravity, PhysicalParams};

pub fn profile(dens: DensitySpec, g: f64, lambda: f64, gamma: f64, n: usize, margin: Option<f64>) -> EquilibriumProfile {
    let params = PhysicalParams::new(lambda, gamma, 1.0, 0.02, 0.01, Gravity::Constant(g)).unwrap();
    let grid = build_grid(-1.0, 1.0, n).unwrap();
    let margin = margin.unwrap_or_else(|| default_margin(&params, &dens, &grid));
    build_equilibrium(params, &dens, grid, margin).unwrap()
}

/// Exponential atmosphere with a weak field.
pub fn exp_profile(n: usize) -> EquilibriumProfile {
    profile(DensitySpec::Exponential { rho0: 1.0, scale_height: 1.0, x_ref: 0.0 }, 2.0, 1.0, 1.2, n, Some(0.3))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}
