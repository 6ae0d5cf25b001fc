//! Legendre polynomials by three-term recurrence.

use crate::scalar::Real;

/// Evaluates `L_n(x)`.
pub fn legendre_eval<T: Real>(degree: usize, x: T) -> T {
    match degree {
        0 => T::one(),
        1 => x,
        _ => {
            let (mut prev, mut cur) = (T::one(), x);
            for k in 1..degree {
                // (k+1) L_{k+1} = (2k+1) x L_k - k L_{k-1}
                let next = (T::of(2 * k + 1) * x * cur - T::of(k) * prev) / T::of(k + 1);
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Values and first two derivatives of `L_0..=L_max` at one point.
#[derive(Debug, Clone, Default)]
pub struct LegendreTable<T> {
    pub value: Vec<T>,
    pub d1: Vec<T>,
    pub d2: Vec<T>,
}

impl<T: Real> LegendreTable<T> {
    /// Fills the table for degrees `0..=max_degree` at `x`.
    ///
    /// Derivatives use `L_n' = (2n-1) L_{n-1} + L_{n-2}'` and its derivative,
    /// which stays finite at `x = ±1`.
    pub fn new(max_degree: usize, x: T) -> Self {
        let len = max_degree + 1;
        let mut value = vec![T::zero(); len];
        let mut d1 = vec![T::zero(); len];
        let mut d2 = vec![T::zero(); len];
        value[0] = T::one();
        if len > 1 {
            value[1] = x;
            d1[1] = T::one();
        }
        for n in 2..len {
            let k = n - 1;
            value[n] = (T::of(2 * k + 1) * x * value[k] - T::of(k) * value[k - 1]) / T::of(n);
            let c = T::of(2 * n - 1);
            d1[n] = c * value[n - 1] + d1[n - 2];
            d2[n] = c * d1[n - 1] + d2[n - 2];
        }
        Self { value, d1, d2 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degrees() {
        assert_eq!(legendre_eval(0, 0.3), 1.0);
        assert_eq!(legendre_eval(1, 0.5), 0.5);
        assert_eq!(legendre_eval(2, 1.0), 1.0);
        assert!((legendre_eval(2, 0.5_f64) - (-0.125)).abs() < 1e-15);
    }

    #[test]
    fn endpoint_values() {
        for n in 0..60 {
            assert!((legendre_eval(n, 1.0_f64) - 1.0).abs() < 1e-12);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((legendre_eval(n, -1.0_f64) - sign).abs() < 1e-12);
        }
    }

    #[test]
    fn endpoint_derivatives() {
        let t = LegendreTable::new(20, 1.0_f64);
        for n in 0..=20 {
            let nn = (n * (n + 1)) as f64;
            assert!((t.d1[n] - nn / 2.0).abs() < 1e-10);
            // L_n''(1) = (n-1)n(n+1)(n+2)/8
            let expect = if n < 2 { 0.0 } else { ((n - 1) * n * (n + 1) * (n + 2)) as f64 / 8.0 };
            assert!((t.d2[n] - expect).abs() < 1e-8 * expect.max(1.0));
        }
    }

    #[test]
    fn table_matches_scalar_eval_and_fd() {
        let x = 0.37_f64;
        let t = LegendreTable::new(12, x);
        let h = 1e-5;
        for n in 0..=12 {
            assert!((t.value[n] - legendre_eval(n, x)).abs() < 1e-14);
            let fd = (legendre_eval(n, x + h) - legendre_eval(n, x - h)) / (2.0 * h);
            assert!((t.d1[n] - fd).abs() < 1e-7);
        }
    }
}
