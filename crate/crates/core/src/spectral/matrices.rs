//! Closed-form Galerkin matrices for the boundary-adapted bases.
//!
//! With the polar Jacobian `(x + 1)` as weight:
//!
//! * `A_ij = ∫ χ_j' χ_i' (x+1) dx` (stiffness)
//! * `B_ij = ∫ χ_j χ_i / (x+1) dx` (centrifugal, vortex basis only)
//! * `C_ij = ∫ χ_j χ_i (x+1) dx` (mass)
//! * `H_ij = ∫ (ζ_j'' + ζ_j'/(x+1)) ζ_i (x+1) dx` (radial Laplacian on the
//!   Robin field basis)

use super::banded::BandedMatrix;
use super::basis::{BasisFamily, BasisKind};
use crate::error::{Error, Result};
use crate::scalar::Real;

fn unsupported(kind: BasisKind, operation: &'static str) -> Error {
    Error::UnsupportedBasis {
        basis: kind.name(),
        operation,
    }
}

pub fn build_matrix_a<T: Real>(basis: &BasisFamily<T>) -> Result<BandedMatrix<T>> {
    let n = basis.dimension();
    match basis.kind() {
        BasisKind::DirichletBoth => Ok(BandedMatrix::symmetric_from_fn(n, 1, |i, k| match k {
            0 => T::of(4 * i + 6),
            _ => T::of(2 * i + 4),
        })),
        BasisKind::DirichletRight => Ok(BandedMatrix::symmetric_from_fn(n, 0, |i, _| T::of(2 * i + 2))),
        kind => Err(unsupported(kind, "matrix A")),
    }
}

pub fn build_matrix_b<T: Real>(basis: &BasisFamily<T>) -> Result<BandedMatrix<T>> {
    let n = basis.dimension();
    match basis.kind() {
        BasisKind::DirichletBoth => Ok(BandedMatrix::symmetric_from_fn(n, 1, |i, k| match k {
            0 => T::of(2 * (2 * i + 3)) / T::of((i + 1) * (i + 2)),
            _ => -T::lit(2.0) / T::of(i + 2),
        })),
        kind => Err(unsupported(kind, "matrix B")),
    }
}

pub fn build_matrix_c<T: Real>(basis: &BasisFamily<T>) -> Result<BandedMatrix<T>> {
    let n = basis.dimension();
    let two = T::lit(2.0);
    match basis.kind() {
        BasisKind::DirichletBoth => Ok(BandedMatrix::symmetric_from_fn(n, 3, |i, k| {
            let (p1, p5, p7) = (T::of(2 * i + 1), T::of(2 * i + 5), T::of(2 * i + 7));
            let i3 = T::of(i + 3);
            match k {
                0 => two / p1 + two / p5,
                1 => two / (p1 * p5) + two * i3 / (p5 * p7),
                2 => -two / p5,
                _ => -two * i3 / (p5 * p7),
            }
        })),
        BasisKind::DirichletRight => Ok(BandedMatrix::symmetric_from_fn(n, 2, |i, k| {
            let (p1, p3, p5) = (T::of(2 * i + 1), T::of(2 * i + 3), T::of(2 * i + 5));
            match k {
                0 => T::lit(4.0) * T::of(i + 1) / (p1 * p3),
                1 => T::lit(4.0) / (p1 * p3 * p5),
                _ => -two * T::of(i + 2) / (p3 * p5),
            }
        })),
        kind => Err(unsupported(kind, "matrix C")),
    }
}

/// Radial-Laplacian matrix on the Robin basis.
///
/// Diagonal: `2(i+1)a_i + 2(2i+3)b_i + 2(i+2)a_i b_i`.
/// Off-diagonal: `h_{i,i+1} = 2(i+2) b_i`; the only degree-`(i+1)` part of
/// `((x+1) ζ_i')'` comes from `b_i L_{i+2}`, so orthogonality leaves a single
/// Legendre moment.
pub fn build_matrix_hp<T: Real>(basis: &BasisFamily<T>) -> Result<BandedMatrix<T>> {
    if basis.kind() != BasisKind::RobinPoisson {
        return Err(unsupported(basis.kind(), "matrix H_P"));
    }
    let (a, b) = basis.robin_coeffs();
    let two = T::lit(2.0);
    Ok(BandedMatrix::symmetric_from_fn(basis.dimension(), 1, |i, k| match k {
        0 => two * T::of(i + 1) * a[i] + two * T::of(2 * i + 3) * b[i] + two * T::of(i + 2) * a[i] * b[i],
        _ => two * T::of(i + 2) * b[i],
    }))
}
