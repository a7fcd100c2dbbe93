//! Not-a-knot cubic spline (C² piecewise cubic) evaluated generically over [`Real`].

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the nodes.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n < 4 {
            return Err(Error::InvalidTable(format!("need at least 4 nodes, got {n}")));
        }
        if y.len() != n {
            return Err(Error::InvalidTable(format!("node count mismatch: {n} abscissae, {} values", y.len())));
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidTable("non-finite entry".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTable("abscissae must be strictly increasing".into()));
        }

        // Tridiagonal system for the interior second derivatives (Thomas
        // algorithm). Not-a-knot ends: the third derivative is continuous at
        // the second and penultimate nodes, so m₀ and m_{n−1} are eliminated.
        let mut m = vec![0.0; n];
        let k = n - 2;
        let mut lower = vec![0.0; k];
        let mut diag = vec![0.0; k];
        let mut upper = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for j in 0..k {
            let i = j + 1;
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            lower[j] = h0;
            diag[j] = 2.0 * (h0 + h1);
            upper[j] = h1;
            rhs[j] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        }
        let (h0, h1) = (x[1] - x[0], x[2] - x[1]);
        diag[0] += h0 * (h0 + h1) / h1;
        upper[0] -= h0 * h0 / h1;
        let (ha, hb) = (x[n - 2] - x[n - 3], x[n - 1] - x[n - 2]);
        diag[k - 1] += hb * (ha + hb) / ha;
        lower[k - 1] -= hb * hb / ha;
        for j in 1..k {
            let w = lower[j] / diag[j - 1];
            diag[j] -= w * upper[j - 1];
            rhs[j] -= w * rhs[j - 1];
        }
        let mut sol = vec![0.0; k];
        sol[k - 1] = rhs[k - 1] / diag[k - 1];
        for j in (0..k - 1).rev() {
            sol[j] = (rhs[j] - upper[j] * sol[j + 1]) / diag[j];
        }
        m[1..n - 1].copy_from_slice(&sol);
        m[0] = sol[0] + h0 * (sol[0] - sol[1]) / h1;
        m[n - 1] = sol[k - 1] + hb * (sol[k - 1] - sol[k - 2]) / ha;

        Ok(Self { x: x.to_vec(), y: y.to_vec(), m })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    fn interval(&self, r: f64) -> usize {
        let i = self.x.partition_point(|&xi| xi <= r);
        i.saturating_sub(1).min(self.x.len() - 2)
    }

    pub fn eval<T: Real>(&self, r: T) -> T {
        let i = self.interval(r.value());
        let h = self.x[i + 1] - self.x[i];
        let hh = T::cst(h);
        let a = (T::cst(self.x[i + 1]) - r) / hh;
        let b = (r - T::cst(self.x[i])) / hh;
        let c = T::cst(h * h / 6.0);
        a * T::cst(self.y[i])
            + b * T::cst(self.y[i + 1])
            + ((a * a * a - a) * T::cst(self.m[i]) + (b * b * b - b) * T::cst(self.m[i + 1])) * c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Jet;

    #[test]
    fn reproduces_nodes_exactly() {
        let x: Vec<f64> = (0..20).map(|i| 1.0 + 0.37 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| (v * 1.3).sin() + v.ln()).collect();
        let s = CubicSpline::new(&x, &y).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert_eq!(s.eval(*xi), *yi);
        }
    }

    #[test]
    fn second_derivative_is_continuous_at_knots() {
        let x: Vec<f64> = (0..12).map(|i| (i as f64).powf(1.3)).collect();
        let y: Vec<f64> = x.iter().map(|v| (0.4 * v).cos()).collect();
        let s = CubicSpline::new(&x, &y).unwrap();
        for &k in &x[1..x.len() - 1] {
            let left = s.eval(Jet::var(k - 1e-9));
            let right = s.eval(Jet::var(k + 1e-9));
            assert!((left.d2 - right.d2).abs() < 1e-6, "jump at {k}");
            assert!((left.d1 - right.d1).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(CubicSpline::new(&[0.0, 1.0, 2.0], &[0.0, 1.0, 2.0]).is_err());
        assert!(CubicSpline::new(&[0.0, 1.0, 1.0, 2.0], &[0.0; 4]).is_err());
        assert!(CubicSpline::new(&[0.0, 1.0, 2.0, 3.0], &[0.0; 3]).is_err());
        assert!(CubicSpline::new(&[0.0, 1.0, 2.0, f64::NAN], &[0.0; 4]).is_err());
    }

    #[test]
    fn cubic_data_is_interpolated_with_small_error() {
        let x: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let y: Vec<f64> = x.iter().map(|v| v.exp() / 1e4).collect();
        let s = CubicSpline::new(&x, &y).unwrap();
        let r = 5.0123;
        assert!((s.eval(r) - r.exp() / 1e4).abs() < 1e-9);
    }

    #[test]
    fn not_a_knot_reproduces_cubics_up_to_the_ends() {
        let x: Vec<f64> = (0..9).map(|i| 1.0 + (i as f64).powf(1.2)).collect();
        let f = |v: f64| 2.0 - v + 0.5 * v * v - 0.1 * v * v * v;
        let y: Vec<f64> = x.iter().map(|&v| f(v)).collect();
        let s = CubicSpline::new(&x, &y).unwrap();
        for r in [x[0], 1.3, 4.4, x[8]] {
            let j = s.eval(Jet::var(r));
            assert!((j.v - f(r)).abs() < 1e-12);
            assert!((j.d1 - (-1.0 + r - 0.3 * r * r)).abs() < 1e-11, "{r}");
            assert!((j.d2 - (1.0 - 0.6 * r)).abs() < 1e-10, "{r}");
        }
    }
}
