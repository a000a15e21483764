//! Per-mode operators and growth rates from the quadratic eigenproblem and
//! from the variational fixed point.

mod assemble;
mod fixed_point;
mod qep;

pub use assemble::{assemble_operators, ModalOperators};
pub use fixed_point::{alpha_of_s, growth_rate_fixed_point, FixedPointOutcome};
#[cfg(test)]
use qep::solve_shift_invert;
pub use qep::{qep_residual, solve_qep, GrowthResult, Method, QepSolution, DENSE_MAX_N};

#[cfg(test)]
mod tests;
