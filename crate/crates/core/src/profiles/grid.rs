use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest node count accepted by [`build_grid`].
pub const MIN_NODES: usize = 8;

/// Uniform partition of `(lo, hi)` into `n + 1` cells.
///
/// Only the `n` interior nodes are stored; the endpoints carry homogeneous
/// Dirichlet data for every perturbation unknown. Cell midpoints
/// `lo + h/2 + k h` (`k = 0..=n`) form the staggered companion grid used by
/// the quadratic forms and the modal operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub h: f64,
    pub nodes: Vec<f64>,
}

impl Grid1D {
    /// Raw uniform partition; accepts any `n >= 1`.
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() || n == 0 {
            return Err(Error::InvalidGrid { lo, hi, n, min_n: 1 });
        }
        let h = (hi - lo) / (n + 1) as f64;
        let nodes = (1..=n).map(|j| lo + j as f64 * h).collect();
        Ok(Self { lo, hi, n, h, nodes })
    }

    /// Cell midpoints, `n + 1` of them.
    pub fn midpoints(&self) -> Vec<f64> {
        (0..=self.n).map(|k| self.lo + (k as f64 + 0.5) * self.h).collect()
    }

    /// Half-width `l` of the interval, which is `(-l, l)` for centred grids.
    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn n_mid(&self) -> usize {
        self.n + 1
    }
}

/// Validated grid used by every solver in the crate.
pub fn build_grid(lo: f64, hi: f64, n: usize) -> Result<Grid1D> {
    if n < MIN_NODES || !(lo < hi) {
        return Err(Error::InvalidGrid { lo, hi, n, min_n: MIN_NODES });
    }
    Grid1D::new(lo, hi, n)
}
