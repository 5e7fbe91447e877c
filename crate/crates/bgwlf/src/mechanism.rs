//! Catalog of offspring laws: the LF family plus the binary, Poisson,
//! negative binomial, binomial (Flory), affine and damped Sibuya examples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lf::{CriticalityClass, LfParams};
use crate::numeric::{binom_real, bisect};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Mechanism {
    Lf { pi0: f64, pi: f64 },
    Geo0 { pi0: f64 },
    /// `phi(z) = q + r z + p z^2`
    Binary { q: f64, r: f64, p: f64 },
    Poisson { mu: f64 },
    /// `phi(z) = ((1-alpha)/(1-alpha z))^theta`
    NegBin { alpha: f64, theta: f64 },
    /// `phi(z) = (1 - alpha + alpha z)^d`
    Binomial { alpha: f64, d: u32 },
    /// `phi(z) = 1 - alpha + alpha z`
    Affine { alpha: f64 },
    /// `phi = h/h(1)`, `h(z) = 1 - lambda (1 - z/zstar)^alpha`
    DampedSibuya { alpha: f64, lambda: f64, zstar: f64 },
}

impl From<LfParams> for Mechanism {
    fn from(p: LfParams) -> Self {
        Mechanism::Lf { pi0: p.pi0, pi: p.pi }
    }
}

fn unit(x: f64) -> bool {
    x > 0.0 && x < 1.0
}

impl Mechanism {
    pub fn lf(pi0: f64, pi: f64) -> Result<Self> {
        LfParams::new(pi0, pi).map(Into::into)
    }

    pub fn binary(q: f64, r: f64, p: f64) -> Result<Self> {
        Mechanism::Binary { q, r, p }.validated()
    }

    /// Checks parameter ranges.
    pub fn validated(self) -> Result<Self> {
        let ok = match self {
            Mechanism::Lf { pi0, pi } => unit(pi0) && unit(pi),
            Mechanism::Geo0 { pi0 } => unit(pi0),
            Mechanism::Binary { q, r, p } => {
                q > 0.0 && r >= 0.0 && p >= 0.0 && (q + r + p - 1.0).abs() < 1e-12
            }
            Mechanism::Poisson { mu } => mu > 0.0 && mu.is_finite(),
            Mechanism::NegBin { alpha, theta } => unit(alpha) && theta > 0.0,
            Mechanism::Binomial { alpha, d } => unit(alpha) && d >= 1,
            Mechanism::Affine { alpha } => unit(alpha),
            Mechanism::DampedSibuya { alpha, lambda, zstar } => {
                unit(alpha) && unit(lambda) && zstar > 1.0
            }
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidParams(format!("{self:?}")))
        }
    }

    /// The LF parameters when the mechanism is linear fractional.
    pub fn as_lf(&self) -> Option<LfParams> {
        match *self {
            Mechanism::Lf { pi0, pi } => Some(LfParams { pi0, pi }),
            Mechanism::Geo0 { pi0 } => Some(LfParams { pi0, pi: pi0 }),
            _ => None,
        }
    }

    fn sibuya_h(alpha: f64, lambda: f64, zstar: f64, z: f64) -> f64 {
        1.0 - lambda * (1.0 - z / zstar).powf(alpha)
    }

    pub fn pgf(&self, z: f64) -> f64 {
        if let Some(p) = self.as_lf() {
            return p.pgf(z);
        }
        match *self {
            Mechanism::Binary { q, r, p } => q + z * (r + p * z),
            Mechanism::Poisson { mu } => (mu * (z - 1.0)).exp(),
            Mechanism::NegBin { alpha, theta } => ((1.0 - alpha) / (1.0 - alpha * z)).powf(theta),
            Mechanism::Binomial { alpha, d } => (1.0 - alpha + alpha * z).powi(d as i32),
            Mechanism::Affine { alpha } => 1.0 - alpha + alpha * z,
            Mechanism::DampedSibuya { alpha, lambda, zstar } => {
                Self::sibuya_h(alpha, lambda, zstar, z) / Self::sibuya_h(alpha, lambda, zstar, 1.0)
            }
            Mechanism::Lf { .. } | Mechanism::Geo0 { .. } => unreachable!(),
        }
    }

    /// Taylor coefficients of `phi(c + w)` in powers of `w`, up to `w^order`.
    pub fn taylor(&self, c: f64, order: usize) -> Vec<f64> {
        let mut out = vec![0.0; order + 1];
        out[0] = self.pgf(c);
        if let Some(p) = self.as_lf() {
            let d = 1.0 - p.pib() * c;
            let mut g = p.pi1() / (d * d);
            for item in out.iter_mut().skip(1) {
                *item = g;
                g *= p.pib() / d;
            }
            return out;
        }
        match *self {
            Mechanism::Binary { r, p, .. } => {
                if order >= 1 {
                    out[1] = r + 2.0 * p * c;
                }
                if order >= 2 {
                    out[2] = p;
                }
            }
            Mechanism::Poisson { mu } => {
                for k in 1..=order {
                    out[k] = out[k - 1] * mu / k as f64;
                }
            }
            Mechanism::NegBin { alpha, theta } => {
                let x = alpha / (1.0 - alpha * c);
                for k in 1..=order {
                    out[k] = out[k - 1] * x * (theta + k as f64 - 1.0) / k as f64;
                }
            }
            Mechanism::Binomial { alpha, d } => {
                let base = 1.0 - alpha + alpha * c;
                for k in 1..=order.min(d as usize) {
                    out[k] = binom_real(d as f64, k) * alpha.powi(k as i32) * base.powi((d as usize - k) as i32);
                }
            }
            Mechanism::Affine { alpha } => {
                if order >= 1 {
                    out[1] = alpha;
                }
            }
            Mechanism::DampedSibuya { alpha, lambda, zstar } => {
                let h1 = Self::sibuya_h(alpha, lambda, zstar, 1.0);
                let s = lambda * (1.0 - c / zstar).powf(alpha) / h1;
                let x = 1.0 / (zstar - c);
                let mut xk = 1.0;
                for k in 1..=order {
                    xk *= -x;
                    out[k] = -s * binom_real(alpha, k) * xk;
                }
            }
            Mechanism::Lf { .. } | Mechanism::Geo0 { .. } => unreachable!(),
        }
        out
    }

    /// Offspring probabilities `pi_0..=pi_order`.
    pub fn coefficients(&self, order: usize) -> Vec<f64> {
        self.taylor(0.0, order)
    }

    /// `phi^{(order)}(z)`.
    pub fn pgf_derivative(&self, z: f64, order: usize) -> f64 {
        let t = self.taylor(z, order);
        let fact: f64 = (1..=order).map(|k| k as f64).product();
        t[order] * fact
    }

    pub fn d1(&self, z: f64) -> f64 {
        self.pgf_derivative(z, 1)
    }

    pub fn d2(&self, z: f64) -> f64 {
        self.pgf_derivative(z, 2)
    }

    pub fn pi0(&self) -> f64 {
        self.pgf(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.d1(1.0)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.d2(1.0) + m - m * m
    }

    pub fn class(&self) -> CriticalityClass {
        CriticalityClass::of_mean(self.mean())
    }

    /// Radius of convergence of the p.g.f. (`f64::INFINITY` for entire ones).
    pub fn radius(&self) -> f64 {
        if let Some(p) = self.as_lf() {
            return p.radius();
        }
        match *self {
            Mechanism::NegBin { alpha, .. } => 1.0 / alpha,
            Mechanism::DampedSibuya { zstar, .. } => zstar,
            _ => f64::INFINITY,
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, Mechanism::Affine { .. } | Mechanism::Binary { p: 0.0, .. })
    }

    /// Offspring support sits on a sublattice `d N` with `d > 1`.
    pub fn is_periodic(&self) -> bool {
        matches!(self, Mechanism::Binary { r, .. } if *r == 0.0)
    }

    /// Smallest root of `phi(z) = z` on `[0, 1]`.
    pub fn extinction(&self) -> f64 {
        if let Some(p) = self.as_lf() {
            return p.extinction();
        }
        if self.mean() <= 1.0 + 1e-12 {
            return 1.0;
        }
        let mut z = 0.0;
        for _ in 0..100_000 {
            let nz = self.pgf(z);
            if (nz - z).abs() < 1e-16 {
                return nz;
            }
            z = nz;
        }
        bisect(|x| self.pgf(x) - x, 0.0, 1.0 - 1e-12, 1e-15).unwrap_or(z)
    }

    /// Root of `phi(t) - t phi'(t) = 0` and `z_c = 1/phi'(tau)`.
    pub fn tau(&self) -> Result<crate::lf::Tau> {
        if self.is_affine() {
            return Err(Error::AffineMechanism);
        }
        if let Some(p) = self.as_lf() {
            return p.tau_robust();
        }
        let g = |t: f64| self.pgf(t) - t * self.d1(t);
        let tau = match self.class() {
            CriticalityClass::Critical => 1.0,
            CriticalityClass::Supercritical => bisect(g, 0.0, 1.0, 1e-15)?,
            CriticalityClass::Subcritical => {
                let zs = self.radius();
                let hi = if zs.is_finite() {
                    let mut h = zs * (1.0 - 1e-12);
                    if g(h) > 0.0 {
                        return Err(Error::NoRoot { lo: 1.0, hi: h, flo: g(1.0), fhi: g(h) });
                    }
                    h = h.min(zs);
                    h
                } else {
                    let mut h = 2.0;
                    while g(h) > 0.0 && h < 1e6 {
                        h *= 2.0;
                    }
                    h
                };
                bisect(g, 1.0, hi, 1e-15)?
            }
        };
        Ok(crate::lf::Tau { tau, zc: 1.0 / self.d1(tau) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn catalog() -> Vec<Mechanism> {
        vec![
            Mechanism::lf(0.3, 0.4).unwrap(),
            Mechanism::Geo0 { pi0: 0.5 },
            Mechanism::binary(0.25, 0.5, 0.25).unwrap(),
            Mechanism::Poisson { mu: 1.3 },
            Mechanism::NegBin { alpha: 0.3, theta: 2.5 },
            Mechanism::Binomial { alpha: 0.4, d: 3 },
            Mechanism::Affine { alpha: 0.3 },
            Mechanism::DampedSibuya { alpha: 0.5, lambda: 0.6, zstar: 1.5 },
        ]
    }

    #[test]
    fn coefficients_resum() {
        for m in catalog() {
            let c = m.coefficients(400);
            assert!(c.iter().all(|&x| x >= -1e-15), "{m:?}");
            let zmax = 0.9 * m.radius().min(1.0);
            for i in 0..=10 {
                let z = zmax * i as f64 / 10.0;
                let s: f64 = c.iter().rev().fold(0.0, |a, &x| a * z + x);
                assert!((s - m.pgf(z)).abs() < 1e-10, "{m:?} z={z}");
            }
            assert_relative_eq!(m.pgf(1.0), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn taylor_matches_finite_difference() {
        for m in catalog() {
            let c = 0.4;
            let t = m.taylor(c, 2);
            let h = 1e-5;
            let d = (m.pgf(c + h) - m.pgf(c - h)) / (2.0 * h);
            assert!((t[1] - d).abs() < 1e-7, "{m:?}");
        }
    }

    #[test]
    fn tau_catalog() {
        let g = Mechanism::Geo0 { pi0: 0.7 };
        let t = g.tau().unwrap();
        assert_relative_eq!(t.tau, 1.0 / (2.0 * 0.3), epsilon = 1e-12);
        assert_relative_eq!(t.zc, 1.0 / (4.0 * 0.7 * 0.3), epsilon = 1e-12);
        assert_eq!(Mechanism::Poisson { mu: 1.0 }.tau().unwrap().tau, 1.0);
        let b = Mechanism::binary(0.25, 0.5, 0.25).unwrap();
        assert_relative_eq!(b.tau().unwrap().tau, 1.0);
        assert!(matches!(Mechanism::Affine { alpha: 0.5 }.tau(), Err(Error::AffineMechanism)));
        let p = Mechanism::Poisson { mu: 0.5 }.tau().unwrap();
        assert_relative_eq!(p.tau, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn json_roundtrip() {
        let m = Mechanism::binary(0.25, 0.5, 0.25).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"kind\":\"binary\""));
        assert_eq!(serde_json::from_str::<Mechanism>(&s).unwrap(), m);
    }
}
