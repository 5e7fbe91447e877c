//! The linear-fractional mechanism `phi(z) = pi0 + pib0 pi z / (1 - pib z)`.
//!
//! `pi0` is the probability of no offspring; given at least one child the
//! number of children is geometric on `{1, 2, ..}` with success probability `pi`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::bisect;

/// `|mu - 1|` below this selects the critical formulas.
pub const EPS_CRIT: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalityClass {
    Subcritical,
    Critical,
    Supercritical,
}

impl CriticalityClass {
    pub fn of_mean(mu: f64) -> Self {
        if (mu - 1.0).abs() <= EPS_CRIT {
            Self::Critical
        } else if mu < 1.0 {
            Self::Subcritical
        } else {
            Self::Supercritical
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LfParams {
    pub pi0: f64,
    pub pi: f64,
}

impl LfParams {
    pub fn new(pi0: f64, pi: f64) -> Result<Self> {
        if !(pi0 > 0.0 && pi0 < 1.0 && pi > 0.0 && pi < 1.0) {
            return Err(Error::InvalidParams(format!(
                "need 0 < pi0, pi < 1 (got pi0 = {pi0}, pi = {pi})"
            )));
        }
        Ok(Self { pi0, pi })
    }

    /// From `pi0` and `pib = 1 - pi`, the way the census figures are quoted.
    pub fn from_pib(pi0: f64, pib: f64) -> Result<Self> {
        Self::new(pi0, 1.0 - pib)
    }

    /// Geo0(pi0): `phi(z) = pi0 / (1 - pib0 z)`.
    pub fn geo0(pi0: f64) -> Result<Self> {
        Self::new(pi0, pi0)
    }

    pub fn pib(&self) -> f64 {
        1.0 - self.pi
    }
    pub fn pi0b(&self) -> f64 {
        1.0 - self.pi0
    }
    pub fn a(&self) -> f64 {
        self.pi / self.pi0b()
    }
    pub fn b(&self) -> f64 {
        self.pib() / self.pi0b()
    }
    pub fn mu(&self) -> f64 {
        self.pi0b() / self.pi
    }
    pub fn sigma2(&self) -> f64 {
        self.pi0b() * (self.pib() + self.pi0) / (self.pi * self.pi)
    }
    /// `pi_1 = pib0 pi`, also the determinant of the homography.
    pub fn pi1(&self) -> f64 {
        self.pi0b() * self.pi
    }
    pub fn class(&self) -> CriticalityClass {
        CriticalityClass::of_mean(self.mu())
    }

    pub fn pgf(&self, z: f64) -> f64 {
        self.pi0 + self.pi1() * z / (1.0 - self.pib() * z)
    }
    pub fn pgf_d1(&self, z: f64) -> f64 {
        let d = 1.0 - self.pib() * z;
        self.pi1() / (d * d)
    }
    pub fn pgf_d2(&self, z: f64) -> f64 {
        let d = 1.0 - self.pib() * z;
        2.0 * self.pi1() * self.pib() / (d * d * d)
    }
    pub fn pmf(&self, k: usize) -> f64 {
        if k == 0 {
            self.pi0
        } else {
            self.pi1() * self.pib().powi(k as i32 - 1)
        }
    }
    /// Radius of convergence `1/pib`.
    pub fn radius(&self) -> f64 {
        1.0 / self.pib()
    }

    pub fn homography(&self) -> Homography {
        Homography { alpha: self.pi - self.pi0, beta: self.pi0, gamma: -self.pib(), delta: 1.0 }
    }

    /// `(a_n, b_n)` with `phi_n(z) = 1 - 1/(b_n + a_n/(1-z))`.
    pub fn iterate(&self, n: u32) -> (f64, f64) {
        if n == 0 {
            return (1.0, 0.0);
        }
        if self.class() == CriticalityClass::Critical {
            return (1.0, self.b() * n as f64);
        }
        let la = self.a().ln();
        let an = (n as f64 * la).exp();
        // a - 1 computed without cancellation
        let am1 = (self.pi - self.pi0b()) / self.pi0b();
        (an, self.b() * (n as f64 * la).exp_m1() / am1)
    }

    /// `phi_n(z)`, the p.g.f. of `N_n(1)`. Valid for any real `z` where the
    /// denominator does not vanish.
    pub fn phi_n(&self, n: u32, z: f64) -> f64 {
        if z == 1.0 {
            return 1.0;
        }
        if n == 0 {
            return z;
        }
        let (an, bn) = self.iterate(n);
        1.0 - 1.0 / (bn + an / (1.0 - z))
    }

    /// Extinction fixed point `rho = pi0/pib` (greater than 1 when subcritical).
    pub fn rho(&self) -> f64 {
        self.pi0 / self.pib()
    }

    /// `min(rho, 1)`.
    pub fn extinction(&self) -> f64 {
        self.rho().min(1.0)
    }

    /// Positive root of `phi(t) - t phi'(t) = 0` by the radical formula.
    pub fn tau(&self) -> Result<Tau> {
        let (pi0, pi, pib) = (self.pi0, self.pi, self.pib());
        let tau = if self.class() == CriticalityClass::Critical {
            1.0
        } else if (pi - pi0).abs() < 1e-12 {
            return Err(Error::DegenerateTau);
        } else {
            let disc = (pi0 * self.pi0b() * pi * pib).sqrt();
            (-pi0 * pib + disc) / (pib * (pi - pi0))
        };
        Ok(Tau { tau, zc: 1.0 / self.pgf_d1(tau) })
    }

    /// Like [`tau`](Self::tau) but falls back to bracketed root finding on
    /// the Geo0 boundary `pi = pi0`.
    pub fn tau_robust(&self) -> Result<Tau> {
        match self.tau() {
            Err(Error::DegenerateTau) => {
                let g = |t: f64| self.pgf(t) - t * self.pgf_d1(t);
                let hi = if self.mu() > 1.0 { 1.0 } else { 0.999_999 * self.radius() };
                let lo = if self.mu() > 1.0 { self.rho() } else { 1.0 };
                let tau = bisect(g, lo, hi, 1e-15)?;
                Ok(Tau { tau, zc: 1.0 / self.pgf_d1(tau) })
            }
            r => r,
        }
    }

    /// `A^n` in closed form (eigen-decomposition, or the Jordan form at criticality).
    pub fn homography_power(&self, n: u32) -> Homography {
        let (pi, pi0, pib, pi0b) = (self.pi, self.pi0, self.pib(), self.pi0b());
        let nf = n as f64;
        if (pib - pi0).abs() <= EPS_CRIT {
            let s = pi.powi(n as i32 - 1);
            return Homography {
                alpha: s * (pi - nf * pib),
                beta: s * nf * pib,
                gamma: -s * nf * pib,
                delta: s * (pi + nf * pib),
            };
        }
        let (pn, qn) = (pi.powi(n as i32), pi0b.powi(n as i32));
        let d = pib - pi0;
        Homography {
            alpha: (pib * pn - pi0 * qn) / d,
            beta: pi0 * (qn - pn) / d,
            gamma: pib * (pn - qn) / d,
            delta: (pib * qn - pi0 * pn) / d,
        }
    }

    /// Bernoulli-thinning or compound-Geo0 reading of the law.
    pub fn compound_representation(&self) -> Compound {
        let (pi0, pi, pib) = (self.pi0, self.pi, self.pib());
        if (pi0 - pi).abs() < 1e-15 {
            Compound::Boundary { q: 1.0, nu: pi }
        } else if pi0 < pi {
            Compound::Thinned { q: pi0 / pi, nu: (pi - pi0) / self.pi0b() }
        } else {
            // psi(z) = (1/pib) (pi0 - pi - z(pi0 - pi - pi pib)) / (pi0 - z(pi0 - pi))
            let psi = Homography {
                alpha: -(pi0 - pi - pi * pib) / pib,
                beta: (pi0 - pi) / pib,
                gamma: -(pi0 - pi),
                delta: pi0,
            };
            Compound::CompoundGeo0 { pi, psi }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tau {
    pub tau: f64,
    /// `1/phi'(tau)`, the radius of the progeny p.g.f.
    pub zc: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Compound {
    /// Bernoulli(1-q) thinning of a Geo(nu) count: `phi(z) = nu w/(1 - (1-nu) w)`, `w = q + (1-q) z`.
    Thinned { q: f64, nu: f64 },
    /// `pi = pi0`: Geo0 itself.
    Boundary { q: f64, nu: f64 },
    /// `phi(z) = pi / (1 - pib psi(z))` with LF cluster p.g.f. `psi`.
    CompoundGeo0 { pi: f64, psi: Homography },
}

impl Compound {
    pub fn pgf(&self, z: f64) -> f64 {
        match *self {
            Compound::Thinned { q, nu } | Compound::Boundary { q, nu } => {
                let w = q + (1.0 - q) * z;
                nu * w / (1.0 - (1.0 - nu) * w)
            }
            Compound::CompoundGeo0 { pi, psi } => pi / (1.0 - (1.0 - pi) * psi.eval(z)),
        }
    }
}

/// Moebius map `z -> (alpha z + beta)/(gamma z + delta)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Homography {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl Homography {
    pub fn det(&self) -> f64 {
        self.alpha * self.delta - self.beta * self.gamma
    }

    pub fn eval(&self, z: f64) -> f64 {
        (self.alpha * z + self.beta) / (self.gamma * z + self.delta)
    }

    /// Matrix product `self * other`, i.e. `self(other(z))`.
    pub fn then_inner(&self, o: &Homography) -> Homography {
        Homography {
            alpha: self.alpha * o.alpha + self.beta * o.gamma,
            beta: self.alpha * o.beta + self.beta * o.delta,
            gamma: self.gamma * o.alpha + self.delta * o.gamma,
            delta: self.gamma * o.beta + self.delta * o.delta,
        }
    }

    /// `H^n` by repeated squaring.
    pub fn power(&self, n: u32) -> Result<Homography> {
        if self.det() == 0.0 {
            return Err(Error::SingularHomography);
        }
        let mut r = Homography { alpha: 1.0, beta: 0.0, gamma: 0.0, delta: 1.0 };
        let mut b = *self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                r = r.then_inner(&b);
            }
            b = b.then_inner(&b);
            e >>= 1;
        }
        Ok(r)
    }

    /// Taylor coefficients at 0 (needs `delta != 0`).
    pub fn coefficients(&self, order: usize) -> Vec<f64> {
        let r = -self.gamma / self.delta;
        let mut out = vec![0.0; order + 1];
        let mut g = 1.0 / self.delta;
        for k in 0..=order {
            out[k] += self.beta * g;
            if k + 1 <= order {
                out[k + 1] += self.alpha * g;
            }
            g *= r;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn iterate_examples() {
        let c = LfParams::new(0.4, 0.6).unwrap();
        let (a3, b3) = c.iterate(3);
        assert_relative_eq!(a3, 1.0);
        assert_relative_eq!(b3, 2.0, epsilon = 1e-12);
        let s = LfParams::new(0.6, 0.5).unwrap();
        let (a2, b2) = s.iterate(2);
        assert_relative_eq!(a2, 1.5625, epsilon = 1e-12);
        assert_relative_eq!(b2, 2.8125, epsilon = 1e-12);
        assert_eq!(s.iterate(0), (1.0, 0.0));
    }

    #[test]
    fn phi_n_values() {
        let c = LfParams::new(0.4, 0.6).unwrap();
        assert_relative_eq!(c.phi_n(3, 0.0), 2.0 / 3.0, epsilon = 1e-12);
        let p = LfParams::new(0.3, 0.4).unwrap();
        assert!((p.phi_n(60, 0.0) - 0.5).abs() < 1e-6);
        assert_eq!(p.phi_n(0, 0.37), 0.37);
    }

    #[test]
    fn jordan_square() {
        let c = LfParams::new(0.4, 0.6).unwrap();
        let h = c.homography_power(2);
        assert_relative_eq!(h.alpha, -0.12, epsilon = 1e-12);
        assert_relative_eq!(h.beta, 0.48, epsilon = 1e-12);
        assert_relative_eq!(h.gamma, -0.48, epsilon = 1e-12);
        assert_relative_eq!(h.delta, 0.84, epsilon = 1e-12);
    }

    #[test]
    fn tau_values() {
        let p = LfParams::new(0.3, 0.4).unwrap();
        assert_relative_eq!(p.tau().unwrap().tau, 0.741_657_386_773_941_1, epsilon = 1e-12);
        let s = LfParams::new(0.6, 0.5).unwrap();
        let t = s.tau().unwrap();
        assert_relative_eq!(t.tau, 1.101_020_514_433_644, epsilon = 1e-12);
        assert_relative_eq!(t.zc, 1.010_205_144_336_44, epsilon = 1e-9);
        assert_eq!(LfParams::new(0.4, 0.6).unwrap().tau().unwrap().tau, 1.0);
    }

    #[test]
    fn compound_forms() {
        let t = LfParams::new(0.2, 0.5).unwrap();
        match t.compound_representation() {
            Compound::Thinned { q, nu } => {
                assert_relative_eq!(q, 0.4);
                assert_relative_eq!(nu, 0.375);
            }
            other => panic!("{other:?}"),
        }
        let c = LfParams::new(0.6, 0.5).unwrap();
        let rep = c.compound_representation();
        for i in 0..=10 {
            let z = i as f64 / 10.0;
            assert!((rep.pgf(z) - c.pgf(z)).abs() < 1e-12);
        }
        if let Compound::CompoundGeo0 { psi, .. } = rep {
            assert!((psi.eval(1.0) - 1.0).abs() < 1e-12);
            assert!(psi.coefficients(40).iter().all(|&x| x >= -1e-15));
        } else {
            panic!("expected compound form");
        }
    }
}
