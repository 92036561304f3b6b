//! Quintic Hermite tables for maps defined by integrals.
//!
//! Each node stores the value together with exact first and second
//! derivatives, so the interpolant is accurate to O(h^6).

use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub(crate) struct HermiteTable {
    x: Vec<f64>,
    f: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl HermiteTable {
    pub(crate) fn new(x: Vec<f64>, f: Vec<f64>, d1: Vec<f64>, d2: Vec<f64>) -> Self {
        debug_assert!(x.len() >= 2 && x.len() == f.len() && f.len() == d1.len() && d1.len() == d2.len());
        debug_assert!(x.windows(2).all(|w| w[0] < w[1]));
        HermiteTable { x, f, d1, d2 }
    }

    pub(crate) fn first_value(&self) -> f64 {
        self.f[0]
    }

    /// Interpolated value; `x` must lie in `[lo, hi]`.
    pub(crate) fn eval(&self, x: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&v| v <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let t5 = t4 * t;
        let h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h20 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
        let h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        let h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let h21 = 0.5 * (t3 - 2.0 * t4 + t5);
        self.f[i] * h00
            + h * self.d1[i] * h10
            + h * h * self.d2[i] * h20
            + self.f[i + 1] * h01
            + h * self.d1[i + 1] * h11
            + h * h * self.d2[i + 1] * h21
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::abs;
    use libm::{cos, sin};

    #[test]
    fn reproduces_quintic_polynomials() {
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x - 0.1 * x.powi(5);
        let dp = |x: f64| -2.0 + 1.5 * x * x - 0.5 * x.powi(4);
        let ddp = |x: f64| 3.0 * x - 2.0 * x.powi(3);
        let xs: Vec<f64> = (0..5).map(|i| i as f64 * 0.7).collect();
        let table = HermiteTable::new(
            xs.clone(),
            xs.iter().map(|&x| p(x)).collect(),
            xs.iter().map(|&x| dp(x)).collect(),
            xs.iter().map(|&x| ddp(x)).collect(),
        );
        for k in 0..50 {
            let x = 2.8 * k as f64 / 49.0;
            assert!(abs(table.eval(x) - p(x)) < 1e-12);
        }
    }

    #[test]
    fn sixth_order_accuracy_on_sine() {
        let build = |n: usize| {
            let xs: Vec<f64> = (0..=n).map(|i| 3.0 * i as f64 / n as f64).collect();
            HermiteTable::new(
                xs.clone(),
                xs.iter().map(|&x| sin(x)).collect(),
                xs.iter().map(|&x| cos(x)).collect(),
                xs.iter().map(|&x| -sin(x)).collect(),
            )
        };
        let err = |t: &HermiteTable| {
            (0..997).map(|k| 3.0 * k as f64 / 997.0).map(|x| abs(t.eval(x) - sin(x))).fold(0.0, f64::max)
        };
        let e1 = err(&build(10));
        let e2 = err(&build(20));
        assert!(e1 / e2 > 40.0, "ratio {}", e1 / e2);
    }
}
