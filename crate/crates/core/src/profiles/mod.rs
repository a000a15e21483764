//! Vertical grids, density models and magnetohydrostatic equilibria.

mod density;
mod equilibrium;
mod grid;
mod spline;

pub use density::{load_tabulated_profile, DensitySpec, Gravity};
pub use equilibrium::{
    balance_tolerance, build_equilibrium, default_margin, equilibrium_residual,
    equilibrium_residual_fd, EquilibriumProfile, PhysicalParams, ProfileSamples,
};
pub use grid::{build_grid, Grid1D, MIN_NODES};
pub use spline::CubicSpline;
