//! Bracketed scalar root finding.

use crate::error::{Result, VoiError};

/// Brent–Dekker root of `f` on `[a, b]`; `f(a)` and `f(b)` must not share a
/// sign. Iterates until the bracket is below `xtol + 4ε|x|` or an exact zero
/// is hit.
pub fn brent<F>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(VoiError::NoRoot(format!("no sign change on [{a}, {b}] (f = {fa}, {fb})")));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
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
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                (s * (2.0 * m * q0 * (q0 - r) - (b - a) * (r - 1.0)), (q0 - 1.0) * (r - 1.0) * (s - 1.0))
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if fb.is_nan() {
            return Err(VoiError::NoRoot(format!("function is NaN at {b}")));
        }
    }
    Err(VoiError::NoRoot(format!("no convergence after {max_iter} iterations")))
}

/// Grows `[lo, hi]` geometrically away from `lo` (which must keep `f ≤ 0`
/// side fixed) until `f(hi)` changes sign relative to `f(lo)`. Returns the
/// final `hi`.
pub fn expand_upper<F>(mut f: F, lo: f64, mut hi: f64, max_doublings: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let s = f(lo).signum();
    for _ in 0..max_doublings {
        let v = f(hi);
        if v == 0.0 || v.signum() != s {
            return Ok(hi);
        }
        hi = lo + 2.0 * (hi - lo);
    }
    Err(VoiError::NoRoot(format!("bracket expansion exhausted after {max_doublings} doublings")))
}
