//! Legendre-Galerkin building blocks: polynomials, quadrature, bases,
//! banded Galerkin matrices and nodal transfer operators.

mod banded;
mod basis;
mod field;
mod legendre;
mod matrices;
mod quadrature;

pub use banded::{BandedCholesky, BandedLu, BandedMatrix};
pub use basis::{BasisFamily, BasisKind, BasisValues};
pub use field::{load_vector, nodal_values, NodalOperator, SpectralField};
pub use legendre::{legendre_eval, LegendreTable};
pub use matrices::{build_matrix_a, build_matrix_b, build_matrix_c, build_matrix_hp};
pub use quadrature::{gauss_lobatto, QuadratureGrid};

