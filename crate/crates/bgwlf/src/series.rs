//! Truncated formal power series over `f64`.
//!
//! A [`PowerSeries`] of order `K` stores `c_0..=c_K`. Binary operations truncate
//! to the smaller order of their operands.

use crate::error::{Error, Result};
use crate::mechanism::Mechanism;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<f64>,
}

impl PowerSeries {
    /// Panics if `coeffs` is empty.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a power series needs at least c_0");
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![0.0; order + 1] }
    }

    pub fn constant(c: f64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The identity series `z`.
    pub fn z(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = 1.0;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// `[z^k]`, zero beyond the truncation order.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(order + 1, 0.0);
        Self { coeffs: c }
    }

    pub fn add(&self, other: &Self) -> Self {
        let k = self.order().min(other.order());
        Self { coeffs: (0..=k).map(|i| self.coeffs[i] + other.coeffs[i]).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let k = self.order().min(other.order());
        Self { coeffs: (0..=k).map(|i| self.coeffs[i] - other.coeffs[i]).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Cauchy product truncated to the shared order.
    pub fn mul(&self, other: &Self) -> Self {
        let k = self.order().min(other.order());
        let mut out = vec![0.0; k + 1];
        for (i, &a) in self.coeffs.iter().take(k + 1).enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().take(k + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    /// `f^n` by repeated squaring. `n = 0` gives the constant 1.
    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::constant(1.0, self.order());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// `outer(inner(z))`. The inner series must vanish at 0; see
    /// [`shift_compose`] for the mechanism-aware alternative.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.coeffs[0] != 0.0 {
            return Err(Error::NonzeroConstantTerm(inner.coeffs[0]));
        }
        let k = self.order().min(inner.order());
        let inner = inner.truncate(k);
        let mut acc = Self::constant(self.coeffs[k], k);
        for i in (0..k).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] += self.coeffs[i];
        }
        Ok(acc)
    }

    /// `1/f`; needs `c_0 != 0`.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0 == 0.0 {
            return Err(Error::ZeroDenominator);
        }
        let k = self.order();
        let mut out = vec![0.0; k + 1];
        out[0] = 1.0 / c0;
        for n in 1..=k {
            let s: f64 = (1..=n).map(|j| self.coeffs[j] * out[n - j]).sum();
            out[n] = -s / c0;
        }
        Ok(Self { coeffs: out })
    }

    /// Formal derivative; the order drops by one (kept at least 0).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self {
            coeffs: (1..=self.order()).map(|i| i as f64 * self.coeffs[i]).collect(),
        }
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    pub fn partial_sums(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .scan(0.0, |s, &c| {
                *s += c;
                Some(*s)
            })
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let k = self.order().max(other.order());
        (0..=k)
            .map(|i| (self.coeff(i) - other.coeff(i)).abs())
            .fold(0.0, f64::max)
    }
}

/// `mech(inner(z))` for an inner series with arbitrary constant term `c`,
/// re-expanding the mechanism about `c`.
pub fn shift_compose(mech: &Mechanism, inner: &PowerSeries) -> Result<PowerSeries> {
    let c = inner.coeff(0);
    let k = inner.order();
    let outer = PowerSeries::new(mech.taylor(c, k));
    let mut centred = inner.clone();
    centred.coeffs[0] = 0.0;
    outer.compose(&centred)
}

/// Law of the total progeny of `i` independent trees:
/// `[z^n] Phi(z)^i = (i/n) [z^{n-i}] phi(z)^n`, for `n = 0..=order`.
pub fn lagrange_progeny(mech: &Mechanism, i: usize, order: usize) -> PowerSeries {
    let phi = PowerSeries::new(mech.coefficients(order));
    let mut out = vec![0.0; order + 1];
    let mut power = PowerSeries::constant(1.0, order);
    for n in 1..=order {
        power = power.mul(&phi);
        if n >= i && i > 0 {
            out[n] = i as f64 / n as f64 * power.coeff(n - i);
        }
    }
    if i == 0 {
        out[0] = 1.0;
    }
    PowerSeries::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(c: &[f64]) -> PowerSeries {
        PowerSeries::new(c.to_vec())
    }

    #[test]
    fn binomial_square() {
        let a = ps(&[1.0, 1.0, 0.0, 0.0]);
        assert_eq!(a.mul(&a).coeffs(), &[1.0, 2.0, 1.0, 0.0]);
        assert_eq!(a.pow(3).coeffs(), &[1.0, 3.0, 3.0, 1.0]);
    }

    #[test]
    fn geometric_inverse() {
        let one_minus = ps(&[1.0, -1.0, 0.0, 0.0, 0.0, 0.0]);
        let geo = ps(&[1.0; 6]);
        let p = one_minus.mul(&geo);
        assert_eq!(p.coeffs(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(one_minus.reciprocal().unwrap().max_abs_diff(&geo) < 1e-15);
    }

    #[test]
    fn compose_small() {
        let outer = ps(&[0.0, 0.0, 1.0, 0.0, 0.0]);
        let inner = ps(&[0.0, 1.0, 1.0, 0.0, 0.0]);
        assert_eq!(outer.compose(&inner).unwrap().coeffs(), &[0.0, 0.0, 1.0, 2.0, 1.0]);
        let f = ps(&[0.3, 0.1, 0.2, 0.4]);
        assert_eq!(f.compose(&PowerSeries::z(3)).unwrap(), f);
        assert!(matches!(
            f.compose(&ps(&[0.5, 1.0, 0.0, 0.0])),
            Err(Error::NonzeroConstantTerm(_))
        ));
    }

    #[test]
    fn derivative_and_eval() {
        let f = ps(&[1.0, 2.0, 3.0]);
        assert_eq!(f.derivative().coeffs(), &[2.0, 6.0]);
        assert!((f.eval(0.5) - 2.75).abs() < 1e-15);
    }
}
