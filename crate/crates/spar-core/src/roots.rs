//! Bracketed one-dimensional root finding.

use crate::error::{Error, Result};

/// Brent's method on a bracket `[a, b]` with `f(a)` and `f(b)` of opposite sign.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NotBracketed("brent"));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..300 {
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
                (
                    s * (2.0 * m * q0 * (q0 - r) - (b - a) * (r - 1.0)),
                    (q0 - 1.0) * (r - 1.0) * (s - 1.0),
                )
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
    }
    Ok(b)
}

/// Grows `hi` geometrically from `start` until `f(hi)` changes sign relative to `f(lo)`.
pub fn expand_upper<F: FnMut(f64) -> f64>(mut f: F, lo: f64, start: f64, limit: f64) -> Result<(f64, f64)> {
    let flo = f(lo);
    let mut a = lo;
    let mut b = start.max(lo + 1e-12);
    while b <= limit {
        let fb = f(b);
        if fb.signum() != flo.signum() || fb == 0.0 {
            return Ok((a, b));
        }
        a = b;
        b = lo + 2.0 * (b - lo);
    }
    Err(Error::NotBracketed("expand_upper"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cubic_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - libm::cbrt(2.0)).abs() < 1e-13);
    }

    #[test]
    fn rejects_unbracketed() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn expands_bracket() {
        let (a, b) = expand_upper(|x| 10.0 - x, 0.0, 1.0, 1e6).unwrap();
        assert!(a < 10.0 && b >= 10.0);
    }
}
