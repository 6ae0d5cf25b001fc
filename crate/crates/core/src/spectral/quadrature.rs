//! Legendre-Gauss-Lobatto quadrature.

use super::legendre::LegendreTable;
use crate::error::{Error, Result};
use crate::scalar::Real;

const NEWTON_MAX_ITER: usize = 50;

/// Gauss-Lobatto nodes on `[-1, 1]` (endpoints included) with weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> QuadratureGrid<T> {
    pub fn num_points(&self) -> usize {
        self.nodes.len()
    }

    /// `Σ w_k f(x_k)`
    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Weights multiplied by the polar Jacobian `(x + 1)`.
    pub fn jacobian_weights(&self) -> Vec<T> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * (x + T::one()))
            .collect()
    }
}

/// Builds the `num_points`-point Gauss-Lobatto rule.
///
/// Interior nodes are the roots of `L'_{p-1}`, located by Newton iteration
/// started from the Chebyshev-Gauss-Lobatto points. Exact for polynomials of
/// degree `2p - 3`.
pub fn gauss_lobatto<T: Real>(num_points: usize) -> Result<QuadratureGrid<T>> {
    if num_points < 2 {
        return Err(Error::InvalidParameter(format!(
            "Gauss-Lobatto rule needs at least 2 points, got {num_points}"
        )));
    }
    let p = num_points;
    let n = p - 1;
    let nn1 = T::of(n * (n + 1));
    let tol = T::lit(1e-15).max(T::epsilon() * T::lit(4.0));

    let mut nodes = vec![T::zero(); p];
    nodes[0] = -T::one();
    nodes[n] = T::one();

    // Roots come in ± pairs; solve for the upper half and mirror.
    for k in 1..=(n / 2) {
        let j = n - k;
        let mut x = -(T::PI() * T::of(j) / T::of(n)).cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let t = LegendreTable::new(n, x);
            let (l, dl) = (t.value[n], t.d1[n]);
            // L_n'' from the Legendre ODE; valid in the open interval.
            let d2l = (T::lit(2.0) * x * dl - nn1 * l) / (T::one() - x * x);
            let dx = dl / d2l;
            x -= dx;
            if dx.abs() <= tol {
                converged = true;
                break;
            }
        }
        if !converged || !x.is_finite() {
            return Err(Error::QuadratureNotConverged { node: j, points: p });
        }
        nodes[j] = x;
        nodes[k] = -x;
    }
    if n % 2 == 0 {
        nodes[n / 2] = T::zero();
    }

    let weights = nodes
        .iter()
        .map(|&x| {
            let l = LegendreTable::new(n, x).value[n];
            T::lit(2.0) / (nn1 * l * l)
        })
        .collect();

    Ok(QuadratureGrid { nodes, weights })
}
