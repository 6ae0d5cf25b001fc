//! Derivative-free one-dimensional minimization on a bounded interval.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrentMinimum<T> {
    pub x: T,
    pub fx: T,
    pub evaluations: usize,
}

/// Brent's method (golden section with parabolic interpolation) for a local
/// minimum of `f` on `[a, b]`.
///
/// Stops once the bracket shrinks below `2·(√ε|x| + abs_tol)` or after
/// `max_eval` evaluations. Errors from `f` are propagated.
pub fn brent_minimize<T: Real, E>(
    mut f: impl FnMut(T) -> Result<T, E>,
    a: T,
    b: T,
    abs_tol: T,
    max_eval: usize,
) -> Result<BrentMinimum<T>, E> {
    let golden = T::lit(0.5) * (T::lit(3.0) - T::lit(5.0).sqrt());
    let rel = T::epsilon().sqrt();
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };

    let mut x = a + golden * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let mut evaluations = 1;
    let (mut d, mut e) = (T::zero(), T::zero());

    while evaluations < max_eval {
        let m = half * (a + b);
        let tol = rel * x.abs() + abs_tol;
        let t2 = two * tol;
        if (x - m).abs() <= t2 - half * (b - a) {
            break;
        }
        let mut golden_step = true;
        if e.abs() > tol {
            // Fit a parabola through x, w, v.
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = two * (q - r);
            if q > T::zero() {
                p = -p;
            } else {
                q = -q;
            }
            let r = e;
            e = d;
            if p.abs() < (half * q * r).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < t2 || b - u < t2 {
                    d = if x < m { tol } else { -tol };
                }
                golden_step = false;
            }
        }
        if golden_step {
            e = if x < m { b - x } else { a - x };
            d = golden * e;
        }
        let u = if d.abs() >= tol {
            x + d
        } else if d > T::zero() {
            x + tol
        } else {
            x - tol
        };
        let fu = f(u)?;
        evaluations += 1;
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Ok(BrentMinimum { x, fx, evaluations })
}
