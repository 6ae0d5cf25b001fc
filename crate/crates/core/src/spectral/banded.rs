//! Band-stored matrices and O(N) direct solvers.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Square matrix with `lower` sub-diagonals and `upper` super-diagonals.
///
/// Row-major band storage: entry `(i, j)` lives at
/// `data[i * width + (j + lower - i)]` with `width = lower + upper + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix<T> {
    dim: usize,
    lower: usize,
    upper: usize,
    data: Vec<T>,
}

impl<T: Real> BandedMatrix<T> {
    pub fn zeros(dim: usize, lower: usize, upper: usize) -> Self {
        Self {
            dim,
            lower,
            upper,
            data: vec![T::zero(); dim * (lower + upper + 1)],
        }
    }

    /// Symmetric matrix from its diagonal and upper bands: `f(i, k)` returns
    /// entry `(i, i + k)` for `k = 0..=bandwidth`.
    pub fn symmetric_from_fn(dim: usize, bandwidth: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(dim, bandwidth, bandwidth);
        for i in 0..dim {
            for k in 0..=bandwidth.min(dim - 1 - i) {
                let v = f(i, k);
                m.set(i, i + k, v);
                m.set(i + k, i, v);
            }
        }
        m
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, 0, 0);
        for i in 0..dim {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    #[inline]
    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    #[inline]
    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.lower >= i && j <= i + self.upper
    }

    /// Entry `(i, j)`; zero outside the band.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        if i >= self.dim || j >= self.dim || !self.in_band(i, j) {
            return T::zero();
        }
        self.data[i * self.width() + j + self.lower - i]
    }

    /// Sets entry `(i, j)`. Panics outside the band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let w = self.width();
        self.data[i * w + j + self.lower - i] = v;
    }

    /// `y = A x`
    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let w = self.width();
        for i in 0..self.dim {
            let j0 = i.saturating_sub(self.lower);
            let j1 = (i + self.upper).min(self.dim - 1);
            let row = &self.data[i * w..(i + 1) * w];
            let mut acc = T::zero();
            for j in j0..=j1 {
                acc += row[j + self.lower - i] * x[j];
            }
            y[i] = acc;
        }
    }

    /// `xᵀ A y`
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        let ay = self.matvec(y);
        crate::scalar::dot(x, &ay)
    }

    /// `Σ_k c_k A_k` over matrices of equal dimension.
    pub fn combination(terms: &[(T, &BandedMatrix<T>)]) -> Self {
        assert!(!terms.is_empty());
        let dim = terms[0].1.dim;
        let lower = terms.iter().map(|(_, m)| m.lower).max().unwrap_or(0);
        let upper = terms.iter().map(|(_, m)| m.upper).max().unwrap_or(0);
        let mut out = Self::zeros(dim, lower, upper);
        for &(c, m) in terms {
            assert_eq!(m.dim, dim);
            for i in 0..dim {
                let j0 = i.saturating_sub(m.lower);
                let j1 = (i + m.upper).min(dim - 1);
                for j in j0..=j1 {
                    let v = out.get(i, j) + c * m.get(i, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn scaled(&self, c: T) -> Self {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v *= c;
        }
        out
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        (0..self.dim).all(|i| {
            let j1 = (i + self.upper.max(self.lower)).min(self.dim.saturating_sub(1));
            (i..=j1).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol)
        })
    }

    /// Dense row-major copy, mainly for tests and small oracles.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn cholesky(&self) -> Result<BandedCholesky<T>> {
        BandedCholesky::factor(self)
    }

    pub fn lu(&self) -> Result<BandedLu<T>> {
        BandedLu::factor(self)
    }
}

/// `A = L Lᵀ` for a symmetric positive definite band matrix.
#[derive(Debug, Clone)]
pub struct BandedCholesky<T> {
    dim: usize,
    bw: usize,
    // Row i holds L(i, i-bw..=i) at offsets 0..=bw.
    l: Vec<T>,
}

impl<T: Real> BandedCholesky<T> {
    pub fn factor(a: &BandedMatrix<T>) -> Result<Self> {
        let n = a.dim;
        let bw = a.lower.max(a.upper);
        let w = bw + 1;
        let mut l = vec![T::zero(); n * w];
        let at = |i: usize, j: usize| i * w + j + bw - i;
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut s = a.get(i, j);
                let k0 = j0.max(j.saturating_sub(bw));
                for k in k0..j {
                    s -= l[at(i, k)] * l[at(j, k)];
                }
                if i == j {
                    if !(s > T::zero()) || !s.is_finite() {
                        return Err(Error::SingularMatrix { pivot: i });
                    }
                    l[at(i, i)] = s.sqrt();
                } else {
                    l[at(i, j)] = s / l[at(j, j)];
                }
            }
        }
        Ok(Self { dim: n, bw, l })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [T]) {
        assert_eq!(x.len(), self.dim);
        let (n, bw) = (self.dim, self.bw);
        let w = bw + 1;
        let at = |i: usize, j: usize| i * w + j + bw - i;
        for i in 0..n {
            let mut s = x[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.l[at(i, k)] * x[k];
            }
            x[i] = s / self.l[at(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..(i + bw + 1).min(n) {
                s -= self.l[at(k, i)] * x[k];
            }
            x[i] = s / self.l[at(i, i)];
        }
    }
}

/// `P A = L U` with partial pivoting, for indefinite or nonsymmetric bands.
#[derive(Debug, Clone)]
pub struct BandedLu<T> {
    dim: usize,
    lower: usize,
    // U has upper bandwidth `lower + upper` after pivoting.
    upper_u: usize,
    data: Vec<T>,
    pivots: Vec<usize>,
}

impl<T: Real> BandedLu<T> {
    pub fn factor(a: &BandedMatrix<T>) -> Result<Self> {
        let n = a.dim;
        let kl = a.lower;
        let ku = a.upper + kl;
        let w = kl + ku + 1;
        let at = move |i: usize, j: usize| i * w + j + kl - i;
        let mut d = vec![T::zero(); n * w];
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + a.upper).min(n.saturating_sub(1)) {
                d[at(i, j)] = a.get(i, j);
            }
        }
        let mut pivots = vec![0; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + ku).min(n - 1);
            let mut p = k;
            let mut best = d[at(k, k)].abs();
            for i in (k + 1)..=last_row {
                let v = d[at(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            pivots[k] = p;
            if !(best > T::zero()) || !best.is_finite() {
                return Err(Error::SingularMatrix { pivot: k });
            }
            if p != k {
                for j in k..=last_col {
                    d.swap(at(k, j), at(p, j));
                }
            }
            let piv = d[at(k, k)];
            for i in (k + 1)..=last_row {
                let f = d[at(i, k)] / piv;
                d[at(i, k)] = f;
                if f != T::zero() {
                    for j in (k + 1)..=last_col {
                        let v = d[at(k, j)];
                        d[at(i, j)] -= f * v;
                    }
                }
            }
        }
        Ok(Self {
            dim: n,
            lower: kl,
            upper_u: ku,
            data: d,
            pivots,
        })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [T]) {
        assert_eq!(x.len(), self.dim);
        let (n, kl, ku) = (self.dim, self.lower, self.upper_u);
        let w = kl + ku + 1;
        let at = |i: usize, j: usize| i * w + j + kl - i;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            for i in (k + 1)..=(k + kl).min(n - 1) {
                x[i] -= self.data[at(i, k)] * xk;
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..=(i + ku).min(n - 1) {
                s -= self.data[at(i, j)] * x[j];
            }
            x[i] = s / self.data[at(i, i)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        a.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    fn spd(n: usize) -> BandedMatrix<f64> {
        BandedMatrix::symmetric_from_fn(n, 3, |i, k| match k {
            0 => 10.0 + i as f64,
            1 => -1.5,
            2 => 0.7,
            _ => -0.2,
        })
    }

    #[test]
    fn get_set_and_matvec() {
        let a = spd(9);
        assert!(a.is_symmetric(0.0));
        assert_eq!(a.get(0, 5), 0.0);
        let x: Vec<f64> = (0..9).map(|i| (i as f64).sin()).collect();
        let y = a.matvec(&x);
        let yd = dense_matvec(&a.to_dense(), &x);
        for (u, v) in y.iter().zip(&yd) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn cholesky_solves() {
        let a = spd(30);
        let x: Vec<f64> = (0..30).map(|i| 1.0 + (i as f64) * 0.1).collect();
        let b = a.matvec(&x);
        let sol = a.cholesky().unwrap().solve(&b);
        for (u, v) in sol.iter().zip(&x) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = BandedMatrix::<f64>::symmetric_from_fn(4, 1, |_, k| if k == 0 { 1.0 } else { 2.0 });
        assert!(a.cholesky().is_err());
    }

    #[test]
    fn lu_pivots_through_zero_diagonal() {
        // Indefinite tridiagonal with a zero leading pivot.
        let a = BandedMatrix::<f64>::symmetric_from_fn(6, 1, |i, k| {
            if k == 0 {
                if i == 0 { 0.0 } else { -2.0 - i as f64 }
            } else {
                1.0
            }
        });
        let x: Vec<f64> = (0..6).map(|i| (i as f64) - 2.5).collect();
        let b = a.matvec(&x);
        let sol = a.lu().unwrap().solve(&b);
        for (u, v) in sol.iter().zip(&x) {
            assert!((u - v).abs() < 1e-12, "{u} vs {v}");
        }
    }

    #[test]
    fn lu_detects_singular() {
        let a = BandedMatrix::<f64>::zeros(3, 1, 1);
        assert!(matches!(a.lu(), Err(Error::SingularMatrix { pivot: 0 })));
    }

    #[test]
    fn combination_widens_band() {
        let a = BandedMatrix::<f64>::identity(5);
        let b = spd(5);
        let c = BandedMatrix::combination(&[(2.0, &a), (-1.0, &b)]);
        assert_eq!(c.lower(), 3);
        assert_eq!(c.get(1, 1), 2.0 - 11.0);
        assert_eq!(c.get(0, 3), 0.2);
    }
}
