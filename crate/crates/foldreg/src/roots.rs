//! Scalar and planar root finders.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Bisection; requires a sign change on [a, b]. Stops when the bracket is below `xtol`
/// or it cannot shrink any further.
pub fn bisect<T: Real>(mut f: impl FnMut(T) -> T, mut a: T, mut b: T, xtol: T) -> Result<T> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(Error::Numerical(format!("no sign change on [{a}, {b}]")));
    }
    for _ in 0..400 {
        let m = T::lit(0.5) * (a + b);
        if (b - a).abs() <= xtol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == T::zero() {
            return Ok(m);
        }
        if (fm > T::zero()) == (fa > T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(T::lit(0.5) * (a + b))
}

/// Brent's method on a sign-changing bracket.
pub fn brent<T: Real>(mut f: impl FnMut(T) -> T, a: T, b: T, xtol: T) -> Result<T> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(Error::Numerical(format!("no sign change on [{a}, {b}]")));
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if (fb > T::zero()) == (fc > T::zero()) {
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
        let tol = two * T::epsilon() * b.abs() + half * xtol;
        let m = half * (c - b);
        if m.abs() <= tol || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * m * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * m * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            } else {
                p = -p;
            }
            if two * p < (T::lit(3.0) * m * q - (tol * q).abs()).min((e * q).abs()) {
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
        b = if d.abs() > tol { b + d } else { b + tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::Numerical("Brent iteration limit".into()))
}

/// Newton on a planar system with a caller-supplied Jacobian.
pub fn newton2<T: Real>(
    mut f: impl FnMut(T, T) -> ((T, T), [[T; 2]; 2]),
    mut x: T,
    mut y: T,
    tol: T,
    max_iter: usize,
) -> Result<(T, T)> {
    for _ in 0..max_iter {
        let ((f1, f2), j) = f(x, y);
        if !(f1.is_finite() && f2.is_finite()) {
            return Err(Error::Numerical("non-finite residual in Newton".into()));
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == T::zero() || !det.is_finite() {
            return Err(Error::Numerical("singular Jacobian in Newton".into()));
        }
        let dx = (f1 * j[1][1] - f2 * j[0][1]) / det;
        let dy = (j[0][0] * f2 - j[1][0] * f1) / det;
        x = x - dx;
        y = y - dy;
        if dx.abs() <= tol * (T::one() + x.abs()) && dy.abs() <= tol * (T::one() + y.abs()) {
            let ((r1, r2), _) = f(x, y);
            if r1.abs().max(r2.abs()) <= T::tol(1e-10) {
                return Ok((x, y));
            }
        }
    }
    Err(Error::Numerical("Newton did not converge".into()))
}

/// Scalar Newton with derivative; errors on divergence.
pub fn newton<T: Real>(mut f: impl FnMut(T) -> (T, T), mut x: T, tol: T, max_iter: usize) -> Result<T> {
    for _ in 0..max_iter {
        let (v, d) = f(x);
        if d == T::zero() || !d.is_finite() || !v.is_finite() {
            return Err(Error::Numerical(format!("Newton breakdown at {x}")));
        }
        let step = v / d;
        x = x - step;
        if step.abs() <= tol * (T::one() + x.abs()) {
            return Ok(x);
        }
    }
    Err(Error::Numerical("Newton did not converge".into()))
}

/// Secant iteration; returns once |f| <= ftol or the step is below xtol.
pub fn secant<T: Real>(mut f: impl FnMut(T) -> Result<T>, x0: T, x1: T, ftol: T, xtol: T, max_iter: usize) -> Result<T> {
    let (mut a, mut b) = (x0, x1);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    for _ in 0..max_iter {
        if fb.abs() <= ftol {
            return Ok(b);
        }
        if fb == fa {
            return Err(Error::Numerical("flat secant".into()));
        }
        let c = b - fb * (b - a) / (fb - fa);
        a = b;
        fa = fb;
        b = c;
        fb = f(b)?;
        if (b - a).abs() <= xtol * (T::one() + b.abs()) {
            return Ok(b);
        }
    }
    Err(Error::Numerical("secant did not converge".into()))
}

/// Scan a grid for sign changes and refine each with Brent.
pub fn all_roots<T: Real>(mut f: impl FnMut(T) -> T, grid: &[T], xtol: T) -> Vec<T> {
    let vals: Vec<T> = grid.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for i in 0..grid.len().saturating_sub(1) {
        let (a, b) = (vals[i], vals[i + 1]);
        if !(a.is_finite() && b.is_finite()) {
            continue;
        }
        if a == T::zero() {
            out.push(grid[i]);
        } else if (a > T::zero()) != (b > T::zero()) && b != T::zero() {
            if let Ok(r) = brent(&mut f, grid[i], grid[i + 1], xtol) {
                out.push(r);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_roots() {
        let r = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        let r = brent(|x: f64| x.cos() - x, 0.0, 1.0, 1e-15).unwrap();
        assert!((r.cos() - r).abs() < 1e-14);
        let (x, y) = newton2(
            |x: f64, y: f64| ((x * x + y * y - 1.0, x - y), [[2.0 * x, 2.0 * y], [1.0, -1.0]]),
            1.0,
            0.5,
            1e-14,
            50,
        )
        .unwrap();
        assert!((x - 0.5f64.sqrt()).abs() < 1e-12 && (y - x).abs() < 1e-12);
        let roots = all_roots(|x: f64| x.sin(), &(0..=70).map(|i| 0.1 * i as f64 - 0.05).collect::<Vec<_>>(), 1e-14);
        assert_eq!(roots.len(), 3);
    }
}
