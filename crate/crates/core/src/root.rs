//! Bracketing root finder for monotone criteria.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Upper edge beyond which bracketing gives up (2^64).
const BRACKET_CAP: f64 = 18_446_744_073_709_551_616.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root<T> {
    pub x: T,
    /// Function value at `x`.
    pub fx: T,
    /// Function evaluations spent in the refinement phase.
    pub iterations: usize,
    /// Final sign-change interval containing `x`.
    pub bracket: (T, T),
}

/// Finds `x >= 0` with `f(x) = 0` for `f` decreasing from `f(0) > 0`.
///
/// The upper edge starts at 1 and doubles until `f` changes sign, then
/// [`brent`] refines the interval.
pub fn solve_decreasing<T, F>(mut f: F, rel_tol: T, max_iter: usize) -> Result<Root<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let mut lo = T::zero();
    let mut f_lo = f(lo)?;
    if f_lo <= T::zero() {
        return Err(Error::BracketNotFound { hi: 0.0 });
    }
    let mut hi = T::one();
    let mut f_hi = f(hi)?;
    let two = T::lit(2.0);
    while f_hi > T::zero() {
        lo = hi;
        f_lo = f_hi;
        hi = hi * two;
        if hi > T::lit(BRACKET_CAP) || f_hi.is_nan() {
            return Err(Error::BracketNotFound { hi: hi.to_f64_lossy() });
        }
        f_hi = f(hi)?;
    }
    brent(f, (lo, f_lo), (hi, f_hi), rel_tol, max_iter)
}

/// Brent's method: inverse quadratic interpolation or secant steps, falling
/// back to bisection whenever the candidate leaves the bracket or progress
/// stalls. Stops once the bracket is narrower than `rel_tol * |x|`.
pub fn brent<T, F>(
    mut f: F,
    (mut a, mut fa): (T, T),
    (mut b, mut fb): (T, T),
    rel_tol: T,
    max_iter: usize,
) -> Result<Root<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if fa.signum() == fb.signum() && fa != T::zero() && fb != T::zero() {
        return Err(Error::BracketNotFound { hi: b.to_f64_lossy() });
    }
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let half = T::lit(0.5);

    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;

    for iter in 1..=max_iter {
        if (fb > T::zero() && fc > T::zero()) || (fb < T::zero() && fc < T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * rel_tol * b.abs();
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(Root {
                x: b,
                fx: fb,
                iterations: iter,
                bracket: (b.min(c), b.max(c)),
            });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = three * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 {
            b + d
        } else {
            b + tol1.abs() * xm.signum()
        };
        fb = f(b)?;
    }
    Err(Error::SolverFailed {
        iterations: max_iter,
        lo: b.min(c).to_f64_lossy(),
        hi: b.max(c).to_f64_lossy(),
    })
}
