use crate::error::{Error, Result};

/// Natural cubic spline through `(x_i, y_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// second derivatives at the knots
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::invalid("grid", "spline needs >= 2 knots with matching values"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("grid", "knots must be strictly ascending"));
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            // tridiagonal solve (Thomas) for interior second derivatives
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut upper = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                diag[i - 1] = 2.0 * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for i in 1..k {
                let lower = x[i + 1] - x[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(Self { x, y, m })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn segment(&self, q: f64) -> usize {
        match self.x.binary_search_by(|v| v.total_cmp(&q)) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.clamp(1, self.x.len() - 1) - 1,
        }
    }

    /// Value at `q`; outside the knots the end cubic is extended.
    pub fn eval(&self, q: f64) -> f64 {
        let i = self.segment(q);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - q) / h;
        let b = (q - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    /// `int_{x_0}^{q} s(u) du` for `q` inside the knots.
    pub fn integral(&self, q: f64) -> f64 {
        let i = self.segment(q);
        let mut total = 0.0;
        for j in 0..i {
            let h = self.x[j + 1] - self.x[j];
            total += 0.5 * h * (self.y[j] + self.y[j + 1]) - h * h * h / 24.0 * (self.m[j] + self.m[j + 1]);
        }
        total + self.partial_integral(i, q)
    }

    fn partial_integral(&self, i: usize, q: f64) -> f64 {
        let h = self.x[i + 1] - self.x[i];
        // antiderivative in terms of b = (u - x_i)/h, a = 1 - b
        let prim = |b: f64| {
            let a = 1.0 - b;
            h * (self.y[i] * (0.5 - 0.5 * a * a) + self.y[i + 1] * 0.5 * b * b)
                + h * h * h / 6.0
                    * (self.m[i] * ((0.5 * a * a - 0.25 * a.powi(4)) - 0.25)
                        + self.m[i + 1] * (0.25 * b.powi(4) - 0.5 * b * b))
        };
        prim((q - self.x[i]) / h) - prim(0.0)
    }
}
