//! Spectral expansions and the nodal <-> weak-form transfer operators.

use std::sync::Arc;

use super::basis::BasisFamily;
use super::quadrature::QuadratureGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Coefficients of a radial function in a named basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField<T> {
    pub basis: Arc<BasisFamily<T>>,
    pub coeffs: Vec<T>,
}

impl<T: Real> SpectralField<T> {
    pub fn new(basis: Arc<BasisFamily<T>>, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != basis.dimension() {
            return Err(Error::DimensionMismatch {
                expected: basis.dimension(),
                found: coeffs.len(),
            });
        }
        Ok(Self { basis, coeffs })
    }

    pub fn zeros(basis: Arc<BasisFamily<T>>) -> Self {
        let coeffs = vec![T::zero(); basis.dimension()];
        Self { basis, coeffs }
    }

    /// Value at a mapped coordinate `x ∈ [-1, 1]`.
    pub fn eval(&self, x: T) -> T {
        self.basis.eval_expansion(&self.coeffs, x)
    }
}

/// Basis values tabulated on a quadrature grid.
///
/// `nodal_values` evaluates an expansion at the nodes; `load_vector` forms
/// `∫ I f · φ_i (x+1) dx` from nodal samples, which is exact whenever the grid
/// integrates `deg(f_interp) + deg(φ_i) + 1`.
#[derive(Debug, Clone)]
pub struct NodalOperator<T> {
    grid: QuadratureGrid<T>,
    dim: usize,
    // values[k * dim + i] = φ_i(x_k)
    values: Vec<T>,
    jac_weights: Vec<T>,
}

impl<T: Real> NodalOperator<T> {
    pub fn new(basis: &BasisFamily<T>, grid: QuadratureGrid<T>) -> Result<Self> {
        let needed = basis.max_degree() + 1;
        if grid.num_points() < needed {
            return Err(Error::DimensionMismatch {
                expected: needed,
                found: grid.num_points(),
            });
        }
        let dim = basis.dimension();
        let mut values = Vec::with_capacity(dim * grid.num_points());
        for &x in &grid.nodes {
            values.extend(basis.eval_all(x).value);
        }
        let jac_weights = grid.jacobian_weights();
        Ok(Self {
            grid,
            dim,
            values,
            jac_weights,
        })
    }

    pub fn grid(&self) -> &QuadratureGrid<T> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_points(&self) -> usize {
        self.grid.num_points()
    }

    /// Quadrature weights times `(x + 1)`.
    pub fn jacobian_weights(&self) -> &[T] {
        &self.jac_weights
    }

    pub fn nodal_values(&self, coeffs: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.num_points()];
        self.nodal_values_into(coeffs, &mut out);
        out
    }

    pub fn nodal_values_into(&self, coeffs: &[T], out: &mut [T]) {
        assert_eq!(coeffs.len(), self.dim);
        assert_eq!(out.len(), self.num_points());
        for (k, o) in out.iter_mut().enumerate() {
            let row = &self.values[k * self.dim..(k + 1) * self.dim];
            *o = crate::scalar::dot(row, coeffs);
        }
    }

    pub fn load_vector(&self, values: &[T]) -> Result<Vec<T>> {
        if values.len() != self.num_points() {
            return Err(Error::DimensionMismatch {
                expected: self.num_points(),
                found: values.len(),
            });
        }
        let mut out = vec![T::zero(); self.dim];
        for (k, (&v, &w)) in values.iter().zip(&self.jac_weights).enumerate() {
            let s = v * w;
            if s == T::zero() {
                continue;
            }
            let row = &self.values[k * self.dim..(k + 1) * self.dim];
            crate::scalar::axpy(s, row, &mut out);
        }
        Ok(out)
    }

    /// `∫ f (x+1) dx` from nodal samples.
    pub fn integrate_weighted(&self, values: &[T]) -> T {
        crate::scalar::dot(values, &self.jac_weights)
    }
}

/// Evaluates `field` at every node of `grid`.
pub fn nodal_values<T: Real>(field: &SpectralField<T>, grid: &QuadratureGrid<T>) -> Vec<T> {
    grid.nodes.iter().map(|&x| field.eval(x)).collect()
}

/// Weak-form right-hand side `∫ I f · φ_i (x+1) dx` from nodal samples.
pub fn load_vector<T: Real>(
    values_on_grid: &[T],
    grid: &QuadratureGrid<T>,
    basis: &BasisFamily<T>,
) -> Result<Vec<T>> {
    NodalOperator::new(basis, grid.clone())?.load_vector(values_on_grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{build_matrix_c, gauss_lobatto, legendre_eval};

    #[test]
    fn zero_field_has_zero_values() {
        let basis = Arc::new(BasisFamily::<f64>::dirichlet_both(12).unwrap());
        let grid = gauss_lobatto(16).unwrap();
        let f = SpectralField::zeros(basis.clone());
        assert!(nodal_values(&f, &grid).iter().all(|&v| v == 0.0));
        assert!(load_vector(&vec![0.0; 16], &grid, &basis).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn first_basis_function_values() {
        let basis = Arc::new(BasisFamily::<f64>::dirichlet_both(12).unwrap());
        let grid = gauss_lobatto(16).unwrap();
        let mut c = vec![0.0; basis.dimension()];
        c[0] = 1.0;
        let f = SpectralField::new(basis, c).unwrap();
        for (v, &x) in nodal_values(&f, &grid).iter().zip(&grid.nodes) {
            assert!((v - (1.0 - legendre_eval(2, x))).abs() < 1e-14);
        }
    }

    #[test]
    fn load_of_first_function_is_mass_column() {
        let n = 12;
        let basis = BasisFamily::<f64>::dirichlet_both(n).unwrap();
        let op = NodalOperator::new(&basis, gauss_lobatto(n + 4).unwrap()).unwrap();
        let mut c = vec![0.0; basis.dimension()];
        c[0] = 1.0;
        let load = op.load_vector(&op.nodal_values(&c)).unwrap();
        let mass = build_matrix_c(&basis).unwrap();
        for (i, l) in load.iter().enumerate() {
            assert!((l - mass.get(i, 0)).abs() < 1e-13);
        }
    }

    #[test]
    fn linear_profile_moments_against_right_basis() {
        // ∫ (x+1)^2 (L_i - L_{i+1}) dx, with (x+1)^2 = 4/3 + 2 L_1 + 2/3 L_2.
        let n = 10;
        let basis = BasisFamily::<f64>::dirichlet_right(n).unwrap();
        let grid = gauss_lobatto(n + 4).unwrap();
        let values: Vec<f64> = grid.nodes.iter().map(|&x| x + 1.0).collect();
        let load = load_vector(&values, &grid, &basis).unwrap();
        let moment = |k: usize| match k {
            0 => 8.0 / 3.0,
            1 => 4.0 / 3.0,
            2 => 4.0 / 15.0,
            _ => 0.0,
        };
        for (i, l) in load.iter().enumerate() {
            assert!((l - (moment(i) - moment(i + 1))).abs() < 1e-13, "i={i}");
        }
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let basis = BasisFamily::<f64>::dirichlet_right(8).unwrap();
        let grid = gauss_lobatto(12).unwrap();
        assert!(load_vector(&[1.0; 5], &grid, &basis).is_err());
        assert!(NodalOperator::new(&basis, gauss_lobatto(5).unwrap()).is_err());
    }
}
