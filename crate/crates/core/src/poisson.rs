//! Radial Poisson solve for the magnetic field.
//!
//! In the mapped coordinate `r = R(x+1)/2` the field obeys
//! `-(4/R²)(H'' + H'/(x+1)) = γ ρ` with `H'(-1) = 0` and the Robin condition
//! `H'(1) = H(1)/(2 ln R)`, which encodes the logarithmic far field of a
//! two-dimensional source of finite mass. Both conditions are built into the
//! `ζ_i` basis, so the Galerkin system is the tridiagonal `(-4/R²) H_P`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{
    build_matrix_hp, BandedLu, BandedMatrix, BasisFamily, NodalOperator, QuadratureGrid,
    SpectralField,
};

/// Factorized Poisson system for fixed `(N, R)` and quadrature grid.
#[derive(Debug, Clone)]
pub struct PoissonWorkspace<T> {
    radius: T,
    basis: Arc<BasisFamily<T>>,
    nodal: NodalOperator<T>,
    system: BandedMatrix<T>,
    factor: BandedLu<T>,
}

impl<T: Real> PoissonWorkspace<T> {
    pub fn new(modes: usize, radius: T, grid: QuadratureGrid<T>) -> Result<Self> {
        let basis = Arc::new(BasisFamily::robin_poisson(modes, radius)?);
        let nodal = NodalOperator::new(&basis, grid)?;
        let scale = -T::lit(4.0) / (radius * radius);
        let system = build_matrix_hp(&basis)?.scaled(scale);
        // (-4/R²) H_P is symmetric but indefinite under the Robin condition.
        let factor = system.lu()?;
        Ok(Self {
            radius,
            basis,
            nodal,
            system,
            factor,
        })
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn basis(&self) -> &Arc<BasisFamily<T>> {
        &self.basis
    }

    pub fn grid(&self) -> &QuadratureGrid<T> {
        self.nodal.grid()
    }

    /// The assembled system matrix `(-4/R²) H_P`.
    pub fn system(&self) -> &BandedMatrix<T> {
        &self.system
    }

    /// Solves for the field generated by `gamma * source`, both sampled on
    /// the workspace grid.
    pub fn solve_field(&self, source_nodal: &[T], gamma: T) -> Result<MagneticField<T>> {
        if source_nodal.len() != self.nodal.num_points() {
            return Err(Error::DimensionMismatch {
                expected: self.nodal.num_points(),
                found: source_nodal.len(),
            });
        }
        let scaled: Vec<T> = source_nodal.iter().map(|&s| gamma * s).collect();
        let load = self.nodal.load_vector(&scaled)?;
        let coeffs = self.factor.solve(&load);
        let nodal = self.nodal.nodal_values(&coeffs);
        Ok(MagneticField {
            field: SpectralField {
                basis: self.basis.clone(),
                coeffs,
            },
            nodal,
            gamma,
            radius: self.radius,
        })
    }

    /// The zero field, returned without a solve.
    pub fn zero_field(&self, gamma: T) -> MagneticField<T> {
        MagneticField {
            field: SpectralField::zeros(self.basis.clone()),
            nodal: vec![T::zero(); self.nodal.num_points()],
            gamma,
            radius: self.radius,
        }
    }

    /// `‖(-4/R²) H_P ĥ - load(γ ρ)‖_∞ / ‖load‖_∞` for a solved field.
    pub fn galerkin_residual(&self, field: &MagneticField<T>, source_nodal: &[T]) -> Result<T> {
        let scaled: Vec<T> = source_nodal.iter().map(|&s| field.gamma * s).collect();
        let load = self.nodal.load_vector(&scaled)?;
        let lhs = self.system.matvec(&field.field.coeffs);
        let num = lhs
            .iter()
            .zip(&load)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
        let den = crate::scalar::max_abs(&load);
        Ok(if den > T::zero() { num / den } else { num })
    }
}

/// Solved radial field (`H` for the single model, `H₁` for the binary one).
#[derive(Debug, Clone, PartialEq)]
pub struct MagneticField<T> {
    /// Coefficients in the Robin basis.
    pub field: SpectralField<T>,
    /// Values on the working quadrature grid.
    pub nodal: Vec<T>,
    pub gamma: T,
    pub radius: T,
}

impl<T: Real> MagneticField<T> {
    /// Field value at physical radius `r ∈ [0, R]`.
    pub fn at_radius(&self, r: T) -> T {
        let x = T::lit(2.0) * r / self.radius - T::one();
        self.field.eval(x)
    }
}

/// Free-function form of [`PoissonWorkspace::solve_field`].
pub fn solve_field<T: Real>(
    source_nodal: &[T],
    gamma: T,
    ws: &PoissonWorkspace<T>,
) -> Result<MagneticField<T>> {
    ws.solve_field(source_nodal, gamma)
}
