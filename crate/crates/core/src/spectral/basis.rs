//! Boundary-adapted Legendre bases on `[-1, 1]`.

use super::legendre::LegendreTable;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which boundary conditions the basis functions satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// `χ_i = L_i - L_{i+2}`, vanishing at both endpoints (vortex states).
    DirichletBoth,
    /// `χ_i = L_i - L_{i+1}`, vanishing at `x = 1` only (symmetric states).
    DirichletRight,
    /// `ζ_i = L_i + a_i L_{i+1} + b_i L_{i+2}` with `ζ'(-1) = 0` and
    /// `ζ'(1) = ζ(1) / (2 ln R)`; used for the magnetic field.
    RobinPoisson,
}

impl BasisKind {
    pub fn name(self) -> &'static str {
        match self {
            BasisKind::DirichletBoth => "DirichletBoth",
            BasisKind::DirichletRight => "DirichletRight",
            BasisKind::RobinPoisson => "RobinPoisson",
        }
    }
}

/// A basis family of fixed dimension.
///
/// Every member is a combination of three consecutive Legendre polynomials
/// `c0 L_i + c1 L_{i+1} + c2 L_{i+2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisFamily<T> {
    kind: BasisKind,
    dimension: usize,
    ln_radius: Option<T>,
    robin_a: Vec<T>,
    robin_b: Vec<T>,
}

impl<T: Real> BasisFamily<T> {
    /// Vortex basis for `N` modes: `χ_0..χ_{N-2}`.
    pub fn dirichlet_both(modes: usize) -> Result<Self> {
        if modes < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 modes, got {modes}")));
        }
        Ok(Self::plain(BasisKind::DirichletBoth, modes - 1))
    }

    /// Symmetric-state basis for `N` modes: `χ_0..χ_{N-1}`.
    pub fn dirichlet_right(modes: usize) -> Result<Self> {
        if modes < 1 {
            return Err(Error::InvalidParameter("need at least 1 mode".into()));
        }
        Ok(Self::plain(BasisKind::DirichletRight, modes))
    }

    /// Wave-function basis for winding number `winding`.
    pub fn for_winding(winding: u32, modes: usize) -> Result<Self> {
        if winding == 0 {
            Self::dirichlet_right(modes)
        } else {
            Self::dirichlet_both(modes)
        }
    }

    /// Field basis `ζ_0..ζ_{N-1}` on the domain `[0, radius]`.
    pub fn robin_poisson(modes: usize, radius: T) -> Result<Self> {
        if !(radius > T::one()) {
            return Err(Error::InvalidParameter(format!(
                "Robin basis needs R > 1 (ln R > 0), got R = {radius}"
            )));
        }
        let ln_r = radius.ln();
        let mut robin_a = Vec::with_capacity(modes);
        let mut robin_b = Vec::with_capacity(modes);
        for i in 0..modes {
            let denom = ln_r * T::of((i + 1) * (i + 3)) - T::one();
            if denom.abs() <= T::epsilon() * T::lit(64.0) * (T::one() + ln_r * T::of((i + 1) * (i + 3))) {
                return Err(Error::DegenerateRobin { index: i });
            }
            let i2 = T::of((i + 2) * (i + 2));
            let a = T::of(2 * i + 3) / (i2 * denom);
            let b = T::of((i + 1) * (i + 1)) / i2 * (ln_r * T::of(i * (i + 2)) - T::one()) / (-denom);
            robin_a.push(a);
            robin_b.push(b);
        }
        Ok(Self {
            kind: BasisKind::RobinPoisson,
            dimension: modes,
            ln_radius: Some(ln_r),
            robin_a,
            robin_b,
        })
    }

    fn plain(kind: BasisKind, dimension: usize) -> Self {
        Self {
            kind,
            dimension,
            ln_radius: None,
            robin_a: Vec::new(),
            robin_b: Vec::new(),
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn ln_radius(&self) -> Option<T> {
        self.ln_radius
    }

    /// Robin coefficients `(a_i, b_i)`; empty for Dirichlet kinds.
    pub fn robin_coeffs(&self) -> (&[T], &[T]) {
        (&self.robin_a, &self.robin_b)
    }

    /// Highest Legendre degree present in the basis.
    pub fn max_degree(&self) -> usize {
        match self.kind {
            BasisKind::DirichletRight => self.dimension,
            BasisKind::DirichletBoth | BasisKind::RobinPoisson => self.dimension + 1,
        }
    }

    /// Legendre coefficients of member `i` on `L_i, L_{i+1}, L_{i+2}`.
    #[inline]
    pub fn legendre_coeffs(&self, i: usize) -> [T; 3] {
        match self.kind {
            BasisKind::DirichletBoth => [T::one(), T::zero(), -T::one()],
            BasisKind::DirichletRight => [T::one(), -T::one(), T::zero()],
            BasisKind::RobinPoisson => [T::one(), self.robin_a[i], self.robin_b[i]],
        }
    }

    /// Values, first and second derivatives of every member at `x`.
    pub fn eval_all(&self, x: T) -> BasisValues<T> {
        let t = LegendreTable::new(self.max_degree() + 1, x);
        let n = self.dimension;
        let mut out = BasisValues {
            value: vec![T::zero(); n],
            d1: vec![T::zero(); n],
            d2: vec![T::zero(); n],
        };
        for i in 0..n {
            let c = self.legendre_coeffs(i);
            for (k, &ck) in c.iter().enumerate() {
                if ck != T::zero() {
                    out.value[i] += ck * t.value[i + k];
                    out.d1[i] += ck * t.d1[i + k];
                    out.d2[i] += ck * t.d2[i + k];
                }
            }
        }
        out
    }

    /// Evaluates the expansion `Σ coeffs_i φ_i(x)`.
    pub fn eval_expansion(&self, coeffs: &[T], x: T) -> T {
        debug_assert_eq!(coeffs.len(), self.dimension);
        let t = LegendreTable::new(self.max_degree() + 1, x);
        let mut sum = T::zero();
        for (i, &ci) in coeffs.iter().enumerate() {
            if ci == T::zero() {
                continue;
            }
            let c = self.legendre_coeffs(i);
            let v = c[0] * t.value[i] + c[1] * t.value[i + 1] + c[2] * t.value[i + 2];
            sum += ci * v;
        }
        sum
    }
}

/// Pointwise basis data produced by [`BasisFamily::eval_all`].
#[derive(Debug, Clone)]
pub struct BasisValues<T> {
    pub value: Vec<T>,
    pub d1: Vec<T>,
    pub d2: Vec<T>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_boundary_values() {
        let both = BasisFamily::<f64>::dirichlet_both(40).unwrap();
        let right = BasisFamily::<f64>::dirichlet_right(40).unwrap();
        assert_eq!(both.dimension(), 39);
        assert_eq!(right.dimension(), 40);
        let (p, m) = (both.eval_all(1.0), both.eval_all(-1.0));
        assert!(p.value.iter().chain(&m.value).all(|v| v.abs() < 1e-12));
        assert!(right.eval_all(1.0).value.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn robin_conditions_hold() {
        for radius in [std::f64::consts::E, 16.0, 20.0] {
            let b = BasisFamily::<f64>::robin_poisson(64, radius).unwrap();
            let ln_r = radius.ln();
            let left = b.eval_all(-1.0);
            let right = b.eval_all(1.0);
            for i in 0..b.dimension() {
                let scale = 1.0 + (i * i) as f64;
                assert!(left.d1[i].abs() < 1e-11 * scale, "i={i}: {}", left.d1[i]);
                let res = right.d1[i] - right.value[i] / (2.0 * ln_r);
                assert!(res.abs() < 1e-11 * scale, "i={i}: {res}");
            }
        }
    }

    #[test]
    fn robin_coefficients_at_ln_r_one() {
        let b = BasisFamily::<f64>::robin_poisson(4, std::f64::consts::E).unwrap();
        let (a, bb) = b.robin_coeffs();
        assert!((a[0] - 3.0 / 8.0).abs() < 1e-14);
        assert!((bb[0] - 1.0 / 8.0).abs() < 1e-14);
    }

    #[test]
    fn robin_rejects_small_radius() {
        assert!(BasisFamily::<f64>::robin_poisson(8, 1.0).is_err());
        assert!(BasisFamily::<f64>::robin_poisson(8, 0.5).is_err());
        // ln R * 1 * 3 = 1 makes a_0 undefined.
        let r = (1.0_f64 / 3.0).exp();
        assert!(matches!(
            BasisFamily::<f64>::robin_poisson(8, r),
            Err(Error::DegenerateRobin { index: 0 })
        ));
    }

    #[test]
    fn expansion_matches_eval_all() {
        let b = BasisFamily::<f64>::dirichlet_both(10).unwrap();
        let coeffs: Vec<f64> = (0..b.dimension()).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let x = 0.21;
        let vals = b.eval_all(x);
        let direct: f64 = coeffs.iter().zip(&vals.value).map(|(c, v)| c * v).sum();
        assert!((direct - b.eval_expansion(&coeffs, x)).abs() < 1e-14);
    }
}
