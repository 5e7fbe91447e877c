//! Doob-transform conditionings of a supercritical LF process, the tilt to
//! criticality, and Harris' frequency spectrum.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lf::{CriticalityClass, LfParams};
use crate::numeric::bisect;

fn require_supercritical(p: &LfParams) -> Result<()> {
    if p.class() == CriticalityClass::Supercritical {
        Ok(())
    } else {
        Err(Error::NotSupercritical(p.mu()))
    }
}

/// Process conditioned on extinction: `phi(rho z)/rho`, again LF with
/// parameters `(pib, pib0)`.
pub fn harris_sevastyanov(p: &LfParams) -> Result<LfParams> {
    require_supercritical(p)?;
    LfParams::new(p.pib(), p.pi0b())
}

/// Offspring law of the immortal individuals, geometric on `{1, 2, ..}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ImmortalLaw {
    pub success: f64,
}

impl ImmortalLaw {
    pub fn pgf(&self, z: f64) -> f64 {
        self.success * z / (1.0 - (1.0 - self.success) * z)
    }

    pub fn iterate(&self, n: u32, z: f64) -> f64 {
        if z == 0.0 {
            return 0.0;
        }
        1.0 / (1.0 + (1.0 / z - 1.0) / self.success.powi(n as i32))
    }

    pub fn coefficients(&self, order: usize) -> Vec<f64> {
        let mut c = vec![0.0; order + 1];
        for (k, x) in c.iter_mut().enumerate().skip(1) {
            *x = self.success * (1.0 - self.success).powi(k as i32 - 1);
        }
        c
    }
}

pub fn condition_immortal(p: &LfParams) -> Result<ImmortalLaw> {
    require_supercritical(p)?;
    Ok(ImmortalLaw { success: p.a() })
}

/// Q-process of a supercritical LF process: conditioned never to be absorbed
/// at 0 or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QProcess {
    pub base: LfParams,
    pub rho: f64,
    /// `phi'(rho)`
    pub gamma: f64,
}

impl QProcess {
    /// `z (pib0/(1 - pi0 z))^2`
    pub fn pgf(&self, z: f64) -> f64 {
        let r = self.base.pi0b() / (1.0 - self.base.pi0 * z);
        z * r * r
    }

    /// `z phi'(rho z)/gamma`, the same p.g.f. written through `phi`.
    pub fn pgf_from_phi(&self, z: f64) -> f64 {
        z * self.base.pgf_d1(self.rho * z) / self.gamma
    }

    pub fn mean(&self) -> f64 {
        1.0 + 2.0 * self.base.pi0 / self.base.pi0b()
    }

    /// Invariant law `i rho^{i-1} (1-rho)^2`.
    pub fn invariant_pmf(&self, i: u64) -> f64 {
        if i == 0 {
            return 0.0;
        }
        let r = self.rho;
        i as f64 * r.powi(i as i32 - 1) * (1.0 - r) * (1.0 - r)
    }

    /// Solution of `v(phi(z)) = 1 + gamma v(z)` with `v(0) = 0`:
    /// `v(z) = (pib0/pi0) z/(1-z)`.
    pub fn abel_v(&self, z: f64) -> f64 {
        self.base.pi0b() / self.base.pi0 * z / (1.0 - z)
    }

    /// Transition `Q(i, j) = gamma^{-1} rho^{j-i} (j/i) P(i, j)`.
    pub fn transition(&self, i: u64, j: u64) -> f64 {
        if i == 0 || j == 0 {
            return 0.0;
        }
        crate::population::transition_power(&self.base, 1, i, j) * self.rho.powi(j as i32 - i as i32)
            * j as f64
            / (i as f64 * self.gamma)
    }

    /// Roots of the coupled `(a, m)` relations for the invariant law written
    /// as `c [(rho/a)^i - rho^i]`. Returns every sign change on the bracket.
    pub fn stated_invariant(&self) -> Result<Vec<QInvariant>> {
        let (pi0, pi0b, rho, g) = (self.base.pi0, self.base.pi0b(), self.rho, self.gamma);
        let rhob = 1.0 - rho;
        let m_of = |a: f64| a * pi0b / (a - pi0);
        let f = |a: f64| {
            let mm = m_of(a).powf(g / (1.0 - g));
            a - (rho * pi0b - rhob * pi0 * mm) / (pi0b - rhob * pi0 * mm)
        };
        let lo = rho.max(pi0) + 1e-9;
        let hi = 1.0 - 1e-9;
        let steps = 2000;
        let mut roots = Vec::new();
        let mut prev = (lo, f(lo));
        for s in 1..=steps {
            let x = lo + (hi - lo) * s as f64 / steps as f64;
            let fx = f(x);
            if fx.is_finite() && prev.1.is_finite() && fx.signum() != prev.1.signum() {
                let a = bisect(f, prev.0, x, 1e-14)?;
                roots.push(QInvariant { a_q: a, m: m_of(a), rho });
            }
            prev = (x, fx);
        }
        if roots.is_empty() {
            return Err(Error::NoRoot { lo, hi, flo: f(lo), fhi: f(hi) });
        }
        Ok(roots)
    }
}

/// Two-geometric invariant law `c [(rho/a)^i - rho^i]`; `a -> 1` recovers
/// [`QProcess::invariant_pmf`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QInvariant {
    pub a_q: f64,
    pub m: f64,
    pub rho: f64,
}

impl QInvariant {
    pub fn pmf(&self, i: u64) -> f64 {
        let (a, r) = (self.a_q, self.rho);
        let c = (a - r) * (1.0 - r) / (r * (1.0 - a));
        c * ((r / a).powi(i as i32) - r.powi(i as i32))
    }
}

pub fn q_process(p: &LfParams) -> Result<QProcess> {
    require_supercritical(p)?;
    let rho = p.rho();
    Ok(QProcess { base: *p, rho, gamma: p.pgf_d1(rho) })
}

/// Size-biased law `z phi'(z)/phi'(rho)`, defective-free only on `[0, rho]`.
pub fn size_biased(p: &LfParams, z: f64) -> f64 {
    z * p.pgf_d1(z) / p.pgf_d1(p.rho())
}

/// Tilt to criticality: `phi(tau z)/phi(tau)`, LF with `P0 = pi0/phi(tau)` and `Pb = pib tau`.
pub fn force_critical(p: &LfParams) -> Result<ForcedCritical> {
    if p.class() == CriticalityClass::Critical {
        return Err(Error::AlreadyCritical);
    }
    force_critical_with_tau(p, p.tau_robust()?.tau)
}

pub fn force_critical_with_tau(p: &LfParams, tau: f64) -> Result<ForcedCritical> {
    let ft = p.pgf(tau);
    let params = LfParams::new(p.pi0 / ft, 1.0 - p.pib() * tau)?;
    Ok(ForcedCritical { params, tau, sigma2: tau * tau * p.pgf_d2(tau) / ft })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ForcedCritical {
    pub params: LfParams,
    pub tau: f64,
    pub sigma2: f64,
}

/// Harris' frequency spectrum weight `phi_i`.
pub fn frequency_spectrum(p: &LfParams, i: u64) -> f64 {
    let fi = i as f64;
    let r = p.rho();
    match p.class() {
        CriticalityClass::Critical => p.pi / p.pib(),
        CriticalityClass::Subcritical => (1.0 - r.powf(-fi)) / (fi * (1.0 / p.mu()).ln()),
        CriticalityClass::Supercritical => (r.powf(-fi) - 1.0) / (fi * p.mu().ln()),
    }
}

/// `sum_i phi_i z^i`, which solves Abel's equation `G(phi(z)) = 1 + G(z)`.
pub fn spectrum_gf(p: &LfParams, z: f64) -> f64 {
    if p.class() == CriticalityClass::Critical {
        return p.pi / p.pib() * z / (1.0 - z);
    }
    let r = p.rho();
    (r * (1.0 - z) / (r - z)).ln() / p.mu().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lf(a: f64, b: f64) -> LfParams {
        LfParams::new(a, b).unwrap()
    }

    #[test]
    fn hs_example() {
        let p = lf(0.3, 0.4);
        let h = harris_sevastyanov(&p).unwrap();
        assert_relative_eq!(h.pi0, 0.6, epsilon = 1e-15);
        assert_relative_eq!(h.pi, 0.7, epsilon = 1e-15);
        assert_relative_eq!(h.mu(), 4.0 / 7.0, epsilon = 1e-12);
        let r = p.rho();
        assert!((h.phi_n(4, 0.3) - p.phi_n(4, r * 0.3) / r).abs() < 1e-12);
        assert!(harris_sevastyanov(&lf(0.6, 0.5)).is_err());
    }

    #[test]
    fn immortal_iterate() {
        let p = lf(0.3, 0.4);
        let im = condition_immortal(&p).unwrap();
        assert_relative_eq!(im.success, 4.0 / 7.0, epsilon = 1e-12);
        assert_eq!(im.pgf(0.0), 0.0);
        let r = p.rho();
        let rhs = (p.phi_n(3, r + (1.0 - r) * 0.5) - r) / (1.0 - r);
        assert!((im.iterate(3, 0.5) - rhs).abs() < 1e-12);
    }

    #[test]
    fn q_pgf_and_invariant() {
        let p = lf(0.3, 0.4);
        let q = q_process(&p).unwrap();
        assert_eq!(q.pgf(0.0), 0.0);
        let h = 1e-6;
        assert!(((q.pgf(1.0) - q.pgf(1.0 - h)) / h - q.mean()).abs() < 1e-4);
        for i in 0..=10 {
            let z = i as f64 / 10.0;
            assert!((q.pgf(z) - q.pgf_from_phi(z)).abs() < 1e-12);
            assert!((q.pgf(z) - size_biased(&p, q.rho * z) / q.rho).abs() < 1e-12);
        }
        for i in 0..50 {
            let z = q.rho * i as f64 / 50.0;
            assert!((q.abel_v(p.pgf(z)) - 1.0 - q.gamma * q.abel_v(z)).abs() < 1e-10);
        }
        assert_relative_eq!(q.abel_v(q.rho), 1.0 / (1.0 - q.gamma), epsilon = 1e-12);
        assert!(matches!(q.stated_invariant(), Err(Error::NoRoot { .. })));
    }

    #[test]
    fn q_limit_of_two_geometric_form() {
        let q = q_process(&lf(0.3, 0.4)).unwrap();
        let near = QInvariant { a_q: 1.0 - 1e-7, m: 0.0, rho: q.rho };
        for i in 1..20 {
            assert!((near.pmf(i) - q.invariant_pmf(i)).abs() < 1e-6);
        }
    }

    #[test]
    fn forced_critical() {
        let f = force_critical(&lf(0.3, 0.4)).unwrap();
        assert_relative_eq!(f.params.mu(), 1.0, epsilon = 1e-10);
        assert_relative_eq!(f.params.pi0, 0.444_994_4, epsilon = 1e-6);
        assert_relative_eq!(f.params.pib(), 0.444_994_4, epsilon = 1e-6);
        let g = force_critical(&lf(0.6, 0.5)).unwrap();
        assert_relative_eq!(g.params.mu(), 1.0, epsilon = 1e-10);
        assert_relative_eq!(g.sigma2, g.params.sigma2(), epsilon = 1e-10);
        let c = lf(0.4, 0.6);
        assert!(matches!(force_critical(&c), Err(Error::AlreadyCritical)));
        let same = force_critical_with_tau(&c, 1.0).unwrap().params;
        assert_relative_eq!(same.pi0, 0.4, epsilon = 1e-15);
        assert_relative_eq!(same.pi, 0.6, epsilon = 1e-15);
    }

    #[test]
    fn spectrum() {
        let c = lf(0.4, 0.6);
        assert_relative_eq!(frequency_spectrum(&c, 7), 1.5, epsilon = 1e-15);
        for p in [lf(0.3, 0.4), lf(0.6, 0.5), c] {
            let lim = p.rho().min(1.0);
            for i in 0..40 {
                let z = lim * i as f64 / 40.0;
                let res = spectrum_gf(&p, p.pgf(z)) - 1.0 - spectrum_gf(&p, z);
                assert!(res.abs() < 1e-8, "{p:?} {z} {res}");
            }
            let s: f64 = (1..=60).map(|i| frequency_spectrum(&p, i) * 0.3f64.powi(i as i32)).sum();
            assert!((s - spectrum_gf(&p, 0.3)).abs() < 1e-10);
        }
        let sup = lf(0.3, 0.4);
        let partial: f64 = (1..=20).map(|i| frequency_spectrum(&sup, i)).sum();
        assert!(partial > 1e3);
    }
}
