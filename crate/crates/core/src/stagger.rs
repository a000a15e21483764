//! Node/midpoint operators on the staggered vertical grid.
//!
//! A node field `f` (length `n`, zero at both endpoints) maps to midpoint
//! averages `(f[k-1] + f[k]) / 2` and differences `(f[k] - f[k-1]) / h`,
//! `k = 0..=n`, with the Dirichlet zeros filling `f[-1]` and `f[n]`.

use crate::linalg::SymTri;

pub fn node_avg(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    (0..=n)
        .map(|k| {
            let l = if k > 0 { f[k - 1] } else { 0.0 };
            let r = if k < n { f[k] } else { 0.0 };
            0.5 * (l + r)
        })
        .collect()
}

pub fn node_diff(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    (0..=n)
        .map(|k| {
            let l = if k > 0 { f[k - 1] } else { 0.0 };
            let r = if k < n { f[k] } else { 0.0 };
            (r - l) / h
        })
        .collect()
}

/// Matrix of `sum_k h c[k] avg(f)[k]^2` over node fields.
pub fn avg_form(c: &[f64], h: f64) -> SymTri {
    let n = c.len() - 1;
    let mut t = SymTri::zeros(n);
    for (k, &ck) in c.iter().enumerate() {
        let w = 0.25 * h * ck;
        if k > 0 {
            t.diag[k - 1] += w;
        }
        if k < n {
            t.diag[k] += w;
        }
        if k > 0 && k < n {
            t.off[k - 1] += w;
        }
    }
    t
}

/// Matrix of `sum_k h c[k] diff(f)[k]^2` over node fields (flux form).
pub fn flux_form(c: &[f64], h: f64) -> SymTri {
    let n = c.len() - 1;
    let mut t = SymTri::zeros(n);
    for (k, &ck) in c.iter().enumerate() {
        let w = ck / h;
        if k > 0 {
            t.diag[k - 1] += w;
        }
        if k < n {
            t.diag[k] += w;
        }
        if k > 0 && k < n {
            t.off[k - 1] -= w;
        }
    }
    t
}

/// `sum_k h c[k] f[k] g[k]` over midpoint (or node) samples.
pub fn quad(c: &[f64], f: &[f64], g: &[f64], h: f64) -> f64 {
    c.iter().zip(f).zip(g).map(|((c, f), g)| c * f * g).sum::<f64>() * h
}

/// `sum_k h f[k] g[k]`
pub fn dot(f: &[f64], g: &[f64], h: f64) -> f64 {
    f.iter().zip(g).map(|(f, g)| f * g).sum::<f64>() * h
}
