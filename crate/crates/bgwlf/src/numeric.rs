//! Small numerical helpers: bracketed roots and binomial coefficients.

use crate::error::{Error, Result};

/// Bisection to `tol` followed by a few secant polishing steps.
/// `f(lo)` and `f(hi)` must have opposite signs (zero at an end is accepted).
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NoRoot { lo, hi, flo: fa, fhi: fb });
    }
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if (b - a).abs() <= tol * (1.0 + a.abs()) {
            break;
        }
    }
    Ok(polish(&f, 0.5 * (a + b), a.min(b), a.max(b)))
}

// secant steps, kept inside the final bracket
fn polish<F: Fn(f64) -> f64>(f: &F, x: f64, lo: f64, hi: f64) -> f64 {
    let mut x0 = lo;
    let mut x1 = x;
    let mut best = x;
    let mut fbest = f(x).abs();
    for _ in 0..8 {
        let (f0, f1) = (f(x0), f(x1));
        if f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !(lo..=hi).contains(&x2) {
            break;
        }
        let f2 = f(x2).abs();
        if f2 < fbest {
            best = x2;
            fbest = f2;
        }
        x0 = x1;
        x1 = x2;
    }
    best
}

/// Generalized binomial coefficient C(a, k) for real `a`.
pub fn binom_real(a: f64, k: usize) -> f64 {
    let mut c = 1.0;
    for j in 0..k {
        c *= (a - j as f64) / (j as f64 + 1.0);
    }
    c
}

pub fn binom(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    binom_real(n as f64, k.min(n - k) as usize)
}

/// Central finite-difference derivative.
pub fn diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn no_sign_change() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), 10.0);
        assert!((binom_real(0.5, 2) + 0.125).abs() < 1e-15);
    }
}
