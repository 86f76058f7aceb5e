//! Laguerre polynomials by the three-term recurrence.

/// `L_n(x)` via `(k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}`.
pub fn laguerre(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[k] = L_k(x)` for `k = 0..out.len()`.
pub fn laguerre_all(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = 1.0 - x;
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0 - x) * out[k] - kf * out[k - 1]) / (kf + 1.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // explicit coefficients: L_n(x) = sum_k (-1)^k C(n,k) x^k / k!
    fn explicit(n: usize, x: f64) -> f64 {
        let mut sum = 0.0;
        let mut binom = 1.0;
        let mut fact = 1.0;
        for k in 0..=n {
            if k > 0 {
                binom *= (n - k + 1) as f64 / k as f64;
                fact *= k as f64;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * binom * x.powi(k as i32) / fact;
        }
        sum
    }

    #[test]
    fn matches_explicit_series() {
        for n in 0..12 {
            for &x in &[0.0, 0.3, 1.0, 2.5, 7.0] {
                let a = laguerre(n, x);
                let b = explicit(n, x);
                assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()), "n={n} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn table_agrees_with_single() {
        let mut out = vec![0.0; 21];
        laguerre_all(3.7, &mut out);
        for (n, v) in out.iter().enumerate() {
            assert_eq!(*v, laguerre(n, 3.7));
        }
    }

    #[test]
    fn value_at_origin_is_one() {
        for n in 0..30 {
            assert!((laguerre(n, 0.0) - 1.0).abs() < 1e-12);
        }
    }
}
