// `!(x > 0.0)` deliberately rejects NaN as well; index loops mirror the
// discrete formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod criteria;
pub mod energy;
pub mod error;
pub mod evolve;
pub mod linalg;
pub mod profiles;
pub mod scan;
pub mod spectral;
pub mod stagger;
#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
