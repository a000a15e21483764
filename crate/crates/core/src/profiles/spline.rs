use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Natural cubic spline through `(x_i, y_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// second derivatives at the knots
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::InvalidParams(format!(
                "spline needs at least two (x, y) pairs of equal length, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        for (i, w) in x.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::NonMonotoneAbscissa { row: i + 1, prev: w[0], next: w[1] });
            }
        }
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // tridiagonal system for interior second derivatives (Thomas sweep)
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            let mut sub = vec![0.0; k];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                diag[i - 1] = (h0 + h1) / 3.0;
                sub[i - 1] = h0 / 6.0;
                rhs[i - 1] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
            }
            for i in 1..k {
                let sup_prev = x[i + 1] - x[i];
                let w = sub[i] / diag[i - 1];
                diag[i] -= w * sup_prev / 6.0;
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                let sup = (x[i + 2] - x[i + 1]) / 6.0;
                m[i + 1] = (rhs[i] - sup * m[i + 2]) / diag[i];
            }
        }
        Ok(Self { x, y, m })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.x, &self.y)
    }

    fn interval(&self, t: f64) -> usize {
        match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            p if p >= self.x.len() => self.x.len() - 2,
            p => p - 1,
        }
    }

    /// Value and first derivative at `t`. Outside the knot range the end
    /// cubic pieces are extended.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let i = self.interval(t);
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let value = a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let deriv = (self.y[i + 1] - self.y[i]) / h
            + (-(3.0 * a * a - 1.0) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        (value, deriv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_linear_data() {
        let x: Vec<f64> = (0..6).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|t| 2.0 * t - 1.0).collect();
        let s = CubicSpline::natural(x, y).unwrap();
        for t in [0.05, 0.41, 1.2, 1.49] {
            let (v, d) = s.eval(t);
            assert!((v - (2.0 * t - 1.0)).abs() < 1e-14);
            assert!((d - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn interpolates_knots() {
        let x = vec![0.0, 0.5, 0.7, 1.5, 2.0];
        let y = vec![1.0, -1.0, 0.3, 2.0, 0.0];
        let s = CubicSpline::natural(x.clone(), y.clone()).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert!((s.eval(*xi).0 - yi).abs() < 1e-14);
        }
    }

    #[test]
    fn smooth_function_accuracy() {
        let x: Vec<f64> = (0..=100).map(|i| -2.0 + 0.04 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|t| (-t).exp()).collect();
        let s = CubicSpline::natural(x, y).unwrap();
        for i in 0..50 {
            let t = -1.0 + 2.0 * (i as f64 + 0.37) / 50.0;
            let (v, d) = s.eval(t);
            assert!((v - (-t).exp()).abs() < 1e-6, "t = {t}");
            assert!((d + (-t).exp()).abs() < 1e-4, "t = {t}");
        }
    }

    #[test]
    fn rejects_repeated_abscissa() {
        let r = CubicSpline::natural(vec![0.0, 1.0, 1.0, 2.0], vec![1.0; 4]);
        assert!(matches!(r, Err(Error::NonMonotoneAbscissa { row: 2, .. })));
    }
}
