//! Laws of the generation sizes `N_n(i)` for the LF process.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lf::{CriticalityClass, LfParams};
use crate::numeric::binom;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegimeSurvival {
    pub n: u32,
    /// `P(N_n(1) > 0)`
    pub value: f64,
    pub regime: CriticalityClass,
    pub asymptotic: f64,
}

pub fn survival(p: &LfParams, n: u32) -> RegimeSurvival {
    let (an, bn) = p.iterate(n);
    let nf = n as f64;
    let regime = p.class();
    let asymptotic = match regime {
        CriticalityClass::Subcritical => (1.0 - p.pib() / p.pi0) * p.mu().powf(nf),
        CriticalityClass::Critical => p.pi / p.pib() / nf,
        CriticalityClass::Supercritical => {
            let r = p.rho();
            (1.0 - r) / (1.0 - r * p.mu().powf(-nf))
        }
    };
    RegimeSurvival { n, value: 1.0 / (an + bn), regime, asymptotic }
}

/// `P(N_n(1) = k)`.
pub fn pmf_current(p: &LfParams, n: u32, k: u64) -> f64 {
    if n == 0 {
        return if k == 1 { 1.0 } else { 0.0 };
    }
    let (an, bn) = p.iterate(n);
    let s = an + bn;
    if k == 0 {
        1.0 - 1.0 / s
    } else {
        an / (s * s) * (bn / s).powf(k as f64 - 1.0)
    }
}

/// `phi_n` read as an LF law: `(P(N_n = 0), pi_n)` with
/// `phi_n(z) = pi_n(0) + (1 - pi_n(0)) pi_n z / (1 - (1 - pi_n) z)`.
pub fn nstep_params(p: &LfParams, n: u32) -> (f64, f64) {
    let (an, bn) = p.iterate(n);
    let s = an + bn;
    (1.0 - 1.0 / s, an / s)
}

/// `P^n(i, j) = P(N_n(i) = j)` in closed form.
pub fn transition_power(p: &LfParams, n: u32, i: u64, j: u64) -> f64 {
    if n == 0 {
        return if i == j { 1.0 } else { 0.0 };
    }
    let (z0, pin) = nstep_params(p, n);
    let pibn = 1.0 - pin;
    if i == 0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    if j == 0 {
        return z0.powi(i as i32);
    }
    let x = (1.0 - z0) * pin / pibn;
    let mut s = 0.0;
    for k in 1..=i.min(j) {
        s += binom(i, k) * binom(j - 1, k - 1) * x.powi(k as i32) * z0.powi((i - k) as i32);
    }
    pibn.powi(j as i32) * s
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum GreenValue {
    Finite { value: f64, terms: usize },
    Divergent { partial: f64, terms: usize },
}

/// `G_{i,j}(u) = sum_n u^n P^n(i,j)`, summed until terms drop below `tol`.
pub fn green_kernel(p: &LfParams, u: f64, i: u64, j: u64, tol: f64, max_terms: usize) -> GreenValue {
    let mut sum = if i == j { 1.0 } else { 0.0 };
    if u == 0.0 {
        return GreenValue::Finite { value: sum, terms: 1 };
    }
    let mut un = 1.0;
    for n in 1..=max_terms {
        un *= u;
        let t = un * transition_power(p, n as u32, i, j);
        sum += t;
        if t < tol && n > 2 {
            return GreenValue::Finite { value: sum, terms: n + 1 };
        }
    }
    GreenValue::Divergent { partial: sum, terms: max_terms + 1 }
}

/// `Var N_n(1)` via `(2 b_n + a_n - 1)/a_n^2`.
pub fn variance(p: &LfParams, n: u32) -> f64 {
    let (an, bn) = p.iterate(n);
    (2.0 * bn + an - 1.0) / (an * an)
}

pub fn mean(p: &LfParams, n: u32) -> f64 {
    p.mu().powi(n as i32)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Autocov {
    pub cov: f64,
    pub corr: f64,
}

/// Covariance and correlation of `N_{n1}` and `N_{n1+n}`.
pub fn autocovariance(p: &LfParams, n1: u32, n: u32) -> Autocov {
    let mu = p.mu();
    let s2 = p.sigma2();
    if p.class() == CriticalityClass::Critical {
        let cov = n1 as f64 * s2;
        return Autocov { cov, corr: (1.0 + n as f64 / n1 as f64).powf(-0.5) };
    }
    let var_at = |m: u32| s2 * mu.powi(m as i32 - 1) * (mu.powi(m as i32) - 1.0) / (mu - 1.0);
    let cov = var_at(n1) * mu.powi(n as i32);
    let corr = mu.powi(n as i32).sqrt() * (mu.powi(n1 as i32) - 1.0).abs().sqrt()
        / (mu.powi((n1 + n) as i32) - 1.0).abs().sqrt();
    Autocov { cov, corr }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum YaglomLimit {
    /// Limit of `N_n | N_n > 0`: p.g.f. `z/(1 + m(1 - z))`, with `m = b/(a-1)`
    /// and Kolmogorov constant `K = 1/m`.
    Geometric { m: f64, kolmogorov: f64 },
    /// `N_n / mu^n | N_n > 0` tends to an exponential law.
    Exponential { mean: f64 },
}

impl YaglomLimit {
    /// p.g.f. (geometric case) or Laplace transform (exponential case).
    pub fn transform(&self, z: f64) -> f64 {
        match *self {
            YaglomLimit::Geometric { m, .. } => z / (1.0 + m * (1.0 - z)),
            YaglomLimit::Exponential { mean } => 1.0 / (1.0 + mean * z),
        }
    }
}

pub fn yaglom_limits(p: &LfParams) -> Result<YaglomLimit> {
    let (a, b) = (p.a(), p.b());
    match p.class() {
        CriticalityClass::Critical => Err(Error::CriticalRegime),
        CriticalityClass::Subcritical => {
            let m = b / (a - 1.0);
            Ok(YaglomLimit::Geometric { m, kolmogorov: 1.0 / m })
        }
        CriticalityClass::Supercritical => Ok(YaglomLimit::Exponential { mean: b / (1.0 - a) }),
    }
}

/// Mean of the exponential limit of `N_n/n | N_n > 0` at criticality.
pub fn critical_exponential_mean(p: &LfParams) -> Result<f64> {
    if p.class() != CriticalityClass::Critical {
        return Err(Error::InvalidParams("mechanism is not critical".into()));
    }
    Ok(p.b())
}

/// Laplace transform of `W = lim N_n/mu^n` for a supercritical LF process
/// (mass `rho` at 0).
pub fn martingale_limit_lst(p: &LfParams, lambda: f64) -> f64 {
    let r = p.rho();
    let rb = 1.0 - r;
    r + rb / (1.0 + lambda / rb)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FiniteSize {
    /// `n P(tau > n)` for the member with `mu = 1 + x/n`.
    pub scaled_survival: f64,
    pub limit: f64,
    pub perturbed: LfParams,
}

/// Near-critical scaling: keep `pi0` of `base` and move `pi` so that
/// `mu = 1 + x/n`.
pub fn finite_size_scaling(base: &LfParams, x: f64, n: u32) -> Result<FiniteSize> {
    let nf = n as f64;
    let pi_c = base.pi0b();
    let perturbed = LfParams::new(base.pi0, pi_c / (1.0 + x / nf))?;
    let s = survival(&perturbed, n).value;
    Ok(FiniteSize { scaled_survival: nf * s, limit: scaling_limit(base.pi0, x), perturbed })
}

/// `r(x) = (1/sigma_c^2) 2x e^x/(e^x - 1)` with `sigma_c^2 = 2 pi0/pi` at criticality.
pub fn scaling_limit(pi0: f64, x: f64) -> f64 {
    let sc2 = 2.0 * pi0 / (1.0 - pi0);
    if x == 0.0 {
        return 2.0 / sc2;
    }
    2.0 * x / (-(-x).exp_m1()) / sc2
}

/// `phi_t(z)` of the embedding binary-fission process (needs `a != 1`).
pub fn embed_continuous_time(p: &LfParams, t: f64, z: f64) -> Result<f64> {
    if p.class() == CriticalityClass::Critical {
        return Err(Error::CriticalRegime);
    }
    let (a, b) = (p.a(), p.b());
    let big_a = -a.ln();
    let big_b = -2.0 * b * a.ln() / (1.0 - a);
    if z == 1.0 {
        return Ok(1.0);
    }
    let e = (-big_a * t).exp();
    Ok(1.0 - 1.0 / (big_b / (2.0 * big_a) * (-(-big_a * t).exp_m1()) + e / (1.0 - z)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lf(a: f64, b: f64) -> LfParams {
        LfParams::new(a, b).unwrap()
    }

    #[test]
    fn survival_examples() {
        assert_relative_eq!(survival(&lf(0.4, 0.6), 3).value, 1.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(survival(&lf(0.6, 0.5), 1).value, 0.4, epsilon = 1e-12);
        assert!((survival(&lf(0.3, 0.4), 200).value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pmf_examples() {
        let c = lf(0.4, 0.6);
        assert_relative_eq!(pmf_current(&c, 1, 0), 0.4, epsilon = 1e-12);
        assert_relative_eq!(pmf_current(&c, 2, 1), 9.0 / 49.0, epsilon = 1e-12);
        let p = lf(0.3, 0.4);
        // the ratio of the geometric tail is 0.9686 here, so 200 terms leave ~2e-3
        let s: f64 = (0..=1000).map(|k| pmf_current(&p, 5, k)).sum();
        assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn transition_examples() {
        let p = lf(0.3, 0.4);
        assert_relative_eq!(transition_power(&p, 1, 1, 0), 0.3, epsilon = 1e-15);
        assert_relative_eq!(transition_power(&p, 1, 2, 1), 0.168, epsilon = 1e-12);
    }

    #[test]
    fn yaglom_examples() {
        match yaglom_limits(&lf(0.6, 0.5)).unwrap() {
            YaglomLimit::Geometric { m, kolmogorov } => {
                assert_relative_eq!(m, 5.0, epsilon = 1e-12);
                assert_relative_eq!(kolmogorov, 0.2, epsilon = 1e-12);
            }
            other => panic!("{other:?}"),
        }
        match yaglom_limits(&lf(0.3, 0.4)).unwrap() {
            YaglomLimit::Exponential { mean } => assert_relative_eq!(mean, 2.0, epsilon = 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(yaglom_limits(&lf(0.4, 0.6)).is_err());
    }

    #[test]
    fn autocovariance_examples() {
        let c = autocovariance(&lf(0.4, 0.6), 5, 5);
        assert_relative_eq!(c.corr, 0.5f64.sqrt(), epsilon = 1e-12);
        let p = lf(0.3, 0.4);
        let a = autocovariance(&p, 2, 3);
        let s2 = 3.9375;
        let mu: f64 = 1.75;
        assert_relative_eq!(p.sigma2(), s2, epsilon = 1e-12);
        assert_relative_eq!(a.cov, s2 * mu * (mu * mu - 1.0) / (mu - 1.0) * mu.powi(3), epsilon = 1e-9);
        let s = lf(0.6, 0.5);
        let big = autocovariance(&s, 40, 3);
        assert!((big.corr - s.mu().powf(1.5)).abs() < 1e-3);
    }

    #[test]
    fn scaling_limit_monotone() {
        assert_relative_eq!(scaling_limit(0.4, 0.0), 1.5, epsilon = 1e-12);
        assert!((scaling_limit(0.4, 1e-8) - 1.5).abs() < 1e-7);
        let mut last = 0.0;
        for i in 1..=50 {
            let r = scaling_limit(0.4, i as f64 * 0.1);
            assert!(r > last);
            last = r;
        }
    }

    #[test]
    fn green_kernel_cases() {
        let p = lf(0.3, 0.4);
        assert!(matches!(green_kernel(&p, 1.0, 1, 0, 1e-12, 10_000), GreenValue::Divergent { .. }));
        assert!(matches!(green_kernel(&p, 0.5, 1, 1, 1e-14, 10_000), GreenValue::Finite { .. }));
        assert_eq!(green_kernel(&p, 0.0, 2, 2, 1e-12, 10), GreenValue::Finite { value: 1.0, terms: 1 });
    }
}
