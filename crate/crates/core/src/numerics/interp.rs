//! Interpolants on uniform grids.

/// Natural cubic spline through samples on a uniform grid starting at `x0`.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x0: f64, h: f64, y: Vec<f64>) -> Self {
        assert!(y.len() >= 2 && h > 0.0);
        let n = y.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior second derivatives: m[i-1] + 4 m[i] + m[i+1] = rhs
            let k = n - 2;
            let mut c = vec![0.0; k];
            let mut d = vec![0.0; k];
            for i in 0..k {
                let rhs = 6.0 * (y[i] - 2.0 * y[i + 1] + y[i + 2]) / (h * h);
                let denom = if i == 0 { 4.0 } else { 4.0 - c[i - 1] };
                c[i] = 1.0 / denom;
                d[i] = if i == 0 { rhs / denom } else { (rhs - d[i - 1]) / denom };
            }
            m[k] = d[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = d[i] - c[i] * m[i + 2];
            }
        }
        Self { x0, h, y, m }
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.h * (self.y.len() - 1) as f64
    }

    /// Evaluates the spline; arguments outside the grid are clamped to its ends.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        let s = ((x - self.x0) / self.h).clamp(0.0, (n - 1) as f64);
        let i = (s.floor() as usize).min(n - 2);
        let t = s - i as f64;
        let u = 1.0 - t;
        let h2 = self.h * self.h / 6.0;
        u * self.y[i]
            + t * self.y[i + 1]
            + h2 * ((u * u * u - u) * self.m[i] + (t * t * t - t) * self.m[i + 1])
    }
}

/// Quintic Hermite interpolant from values, first and second derivatives on
/// a uniform grid. Error scales as `h^6 max|f^(6)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuinticHermite {
    x0: f64,
    h: f64,
    f: Vec<[f64; 3]>,
}

impl QuinticHermite {
    pub fn new(x0: f64, h: f64, f: Vec<[f64; 3]>) -> Self {
        assert!(f.len() >= 2 && h > 0.0);
        Self { x0, h, f }
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.h * (self.f.len() - 1) as f64
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn samples(&self) -> &[[f64; 3]] {
        &self.f
    }

    /// `None` outside `[x_min, x_max]`.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let n = self.f.len();
        let s = (x - self.x0) / self.h;
        if !(0.0..=(n - 1) as f64).contains(&s) {
            return None;
        }
        let i = (s.floor() as usize).min(n - 2);
        let t = s - i as f64;
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);
        let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
        let h3 = 0.5 * (t3 - 2.0 * t4 + t5);
        let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        let [a0, a1, a2] = self.f[i];
        let [b0, b1, b2] = self.f[i + 1];
        let h = self.h;
        Some(a0 * h0 + h * a1 * h1 + h * h * a2 * h2 + h * h * b2 * h3 + h * b1 * h4 + b0 * h5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_nodes_and_is_accurate() {
        let h = 0.01;
        let y: Vec<f64> = (0..=400).map(|i| (i as f64 * h).sin()).collect();
        let s = CubicSpline::new(0.0, h, y);
        for i in 0..=400 {
            assert!((s.eval(i as f64 * h) - (i as f64 * h).sin()).abs() < 1e-15);
        }
        // away from the natural end conditions the error is O(h^4)
        for k in 0..100 {
            let x = 0.5 + 3.0 * k as f64 / 100.0;
            assert!((s.eval(x) - x.sin()).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn quintic_hermite_is_exact_for_quintics() {
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(3) + 0.1 * x.powi(5);
        let dp = |x: f64| -2.0 + 1.5 * x * x + 0.5 * x.powi(4);
        let ddp = |x: f64| 3.0 * x + 2.0 * x.powi(3);
        let h = 0.7;
        let f: Vec<[f64; 3]> = (0..6)
            .map(|i| {
                let x = -1.0 + h * i as f64;
                [p(x), dp(x), ddp(x)]
            })
            .collect();
        let q = QuinticHermite::new(-1.0, h, f);
        for k in 0..=50 {
            let x = -1.0 + 3.5 * k as f64 / 50.0;
            assert!((q.eval(x).unwrap() - p(x)).abs() < 1e-12, "x={x}");
        }
        assert!(q.eval(-1.01).is_none());
        assert!(q.eval(2.6).is_none());
    }
}
