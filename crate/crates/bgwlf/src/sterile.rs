//! Sterile (leaf) and prolific individuals: joint laws at generation `n`,
//! cumulated up to `n`, and cumulated sterile counts against the current size.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lf::{Homography, LfParams};
use crate::mechanism::Mechanism;
use crate::population::pmf_current;

/// `E(z^{N_n} z0^{N0_n} z1^{N1_n}) = phi_n(pi0 z z0 + pib0 z z1)`.
pub fn gen_n_joint(p: &LfParams, n: u32, z: f64, z0: f64, z1: f64) -> f64 {
    p.phi_n(n, z * (p.pi0 * z0 + p.pi0b() * z1))
}

/// The closed form printed for the "ratio" transform,
/// `phi_n(pi0 + pib0/z0) = 1 - 1/(b_n + (a_n/pib0)(1 - 1/z0)^{-1})`.
/// As a function of the counts it equals `E(z0^{-N1_n})` (see [`ratio_transform`]
/// for the law of `N0_n/N_n`).
pub fn ratio_pgf(p: &LfParams, n: u32, z0: f64) -> Result<f64> {
    if !(z0 > 0.0 && z0 <= 1.0) {
        return Err(Error::DomainError(format!("z0 = {z0} outside (0, 1]")));
    }
    if z0 == 1.0 {
        return Ok(1.0);
    }
    if n == 0 {
        return Ok(p.pi0 + p.pi0b() / z0);
    }
    let (an, bn) = p.iterate(n);
    let den = bn + an / p.pi0b() / (1.0 - 1.0 / z0);
    if den.abs() < 1e-300 {
        return Err(Error::DomainError("denominator vanishes".into()));
    }
    Ok(1.0 - 1.0 / den)
}

/// `E(z0^{N0_n/N_n} | N_n > 0)` by summation over `N_n = k`.
pub fn ratio_transform(p: &LfParams, n: u32, z0: f64, tol: f64) -> f64 {
    let surv = 1.0 - pmf_current(p, n, 0);
    let mut s = 0.0;
    let mut mass = 0.0;
    let mut k = 1u64;
    while surv - mass > tol * surv && k < 10_000_000 {
        let pk = pmf_current(p, n, k);
        mass += pk;
        s += pk * (p.pi0b() + p.pi0 * z0.powf(1.0 / k as f64)).powi(k as i32);
        k += 1;
    }
    s / surv
}

/// Which cumulated counts are paired with the current ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Start {
    /// Cumulated up to generation `n` (`Phi_n`).
    Phi,
    /// Cumulated up to generation `n-1` (`Psi_n`).
    Psi,
}

/// Marks `(z, z0, z1, zb, zb0, zb1)` for current total / sterile / prolific
/// and cumulated total / sterile / prolific counts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Marks {
    pub z: f64,
    pub z0: f64,
    pub z1: f64,
    pub zb: f64,
    pub zb0: f64,
    pub zb1: f64,
}

impl Default for Marks {
    fn default() -> Self {
        Marks { z: 1.0, z0: 1.0, z1: 1.0, zb: 1.0, zb0: 1.0, zb1: 1.0 }
    }
}

/// Generic recursion from the root
/// `Phi_{n+1} = pi0 zb (zb0 - zb1) + zb zb1 phi(Phi_n)`.
pub fn marked_iteration_generic(mech: &Mechanism, m: Marks, start: Start, n: u32) -> f64 {
    let pi0 = mech.pi0();
    let mut x = match start {
        Start::Phi => m.z * m.zb * (pi0 * m.z0 * m.zb0 + (1.0 - pi0) * m.z1 * m.zb1),
        Start::Psi => m.z * (pi0 * m.z0 + (1.0 - pi0) * m.z1),
    };
    for _ in 0..n {
        x = pi0 * m.zb * (m.zb0 - m.zb1) + m.zb * m.zb1 * mech.pgf(x);
    }
    x
}

/// The marked LF map `pi0 (zb0 - zb1) + zb1 phi(z)` with its fixed points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MarkedLf {
    pub base: LfParams,
    pub zb0: f64,
    pub zb1: f64,
    pub h: Homography,
    pub disc: f64,
    pub z_minus: f64,
    pub z_plus: f64,
}

impl MarkedLf {
    pub fn new(base: LfParams, zb0: f64, zb1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&zb0) || !(0.0..=1.0).contains(&zb1) {
            return Err(Error::DomainError(format!("marks ({zb0}, {zb1}) outside [0,1]^2")));
        }
        let (pi0, pi, pib, pi0b) = (base.pi0, base.pi, base.pib(), base.pi0b());
        let h = Homography {
            alpha: pi * pi0b * zb1 - pi0 * pib * zb0,
            beta: pi0 * zb0,
            gamma: -pib,
            delta: 1.0,
        };
        let bb = 1.0 - h.alpha;
        let disc = bb * bb - 4.0 * pib * pi0 * zb0;
        if disc < -1e-14 {
            return Err(Error::NegativeDiscriminant(disc));
        }
        let sq = disc.max(0.0).sqrt();
        // stable pair of roots of pib z^2 - B z + pi0 zb0 = 0
        let zp = (bb + sq) / (2.0 * pib);
        let zm = if zp > 0.0 { pi0 * zb0 / (pib * zp) } else { (bb - sq) / (2.0 * pib) };
        Ok(MarkedLf { base, zb0, zb1, h, disc, z_minus: zm, z_plus: zp })
    }

    /// `(1 - pib z-)/(1 - pib z+)`, the inverse multiplier at the attracting point.
    pub fn multiplier(&self) -> f64 {
        let pib = self.base.pib();
        (1.0 - pib * self.z_minus) / (1.0 - pib * self.z_plus)
    }

    pub fn is_parabolic(&self) -> bool {
        self.disc.abs() < 1e-13
    }

    /// `n`-fold iterate at `z` through the conjugacy with `z -> lambda z`.
    pub fn iterate(&self, n: u32, z: f64) -> f64 {
        if n == 0 {
            return z;
        }
        if self.is_parabolic() {
            let z0 = 0.5 * (self.z_minus + self.z_plus);
            let h = self.h;
            let c = 2.0 * h.gamma / (h.alpha + h.delta);
            if (z - z0).abs() < 1e-300 {
                return z0;
            }
            return z0 + 1.0 / (1.0 / (z - z0) + n as f64 * c);
        }
        let (zm, zp) = (self.z_minus, self.z_plus);
        if z == zm {
            return zm;
        }
        let ln = n as f64 * self.multiplier().ln();
        zm + (zp - zm) / (1.0 - ln.exp() * (z - zp) / (z - zm))
    }

    /// `Psi`-type iterate as an LF map in `z`: `(alpha_n z + beta_n)/(gamma_n z + delta_n)`.
    pub fn iterate_homography(&self, n: u32) -> Homography {
        let (zm, zp) = (self.z_minus, self.z_plus);
        if self.is_parabolic() {
            return self.h.power(n).unwrap_or(self.h);
        }
        let l = self.multiplier().powi(n as i32);
        Homography {
            alpha: zp - zm * l,
            beta: zm * zp * (l - 1.0),
            gamma: -(l - 1.0),
            delta: zp * l - zm,
        }
    }
}

/// `E(zb0^{Nb0_n} zb1^{Nb1_n})`, the cumulated sterile / prolific counts up to `n`.
pub fn cumulated_joint(p: &LfParams, n: u32, zb0: f64, zb1: f64) -> Result<f64> {
    let m = MarkedLf::new(*p, zb0, zb1)?;
    Ok(m.iterate(n, p.pi0 * zb0 + p.pi0b() * zb1))
}

/// `Psi_n(z, zb0) = E(z^{N_n} zb0^{Nb0_{n-1}})`.
pub fn psi_current_vs_cum_sterile(p: &LfParams, n: u32, z: f64, zb0: f64) -> Result<f64> {
    Ok(MarkedLf::new(*p, zb0, 1.0)?.iterate(n, z))
}

/// `[z^k]` of an LF map, `k >= 1`.
pub fn lf_coefficient(h: &Homography, k: u64) -> f64 {
    if k == 0 {
        return h.beta / h.delta;
    }
    let d = h.delta;
    h.det() / (d * d) * (-h.gamma / d).powi(k as i32 - 1)
}

/// `E(zb0^{Nb0_{n-1}} | N_n = k)`.
pub fn conditional_sterile_given_current(p: &LfParams, n: u32, k: u64, zb0: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::DomainError("k must be at least 1".into()));
    }
    let num = lf_coefficient(&MarkedLf::new(*p, zb0, 1.0)?.iterate_homography(n), k);
    let den = lf_coefficient(&MarkedLf::new(*p, 1.0, 1.0)?.iterate_homography(n), k);
    if den <= 0.0 || !den.is_finite() {
        return Err(Error::ZeroProbabilityCondition);
    }
    Ok(num / den)
}

/// Large-`n` coefficient asymptotic `(z+ - z-)^2 a^{-n} z+^{-(k+1)}`.
pub fn psi_coefficient_asymptotic(p: &LfParams, n: u32, k: u64, zb0: f64) -> Result<f64> {
    let m = MarkedLf::new(*p, zb0, 1.0)?;
    let d = m.z_plus - m.z_minus;
    Ok(d * d * m.multiplier().powi(-(n as i32)) * m.z_plus.powi(-(k as i32 + 1)))
}

/// `alpha(zb0) = z+(1)/z+(zb0)`, the per-individual rate for `k >> n >> 1`.
pub fn sterile_alpha(p: &LfParams, zb0: f64) -> Result<f64> {
    Ok(MarkedLf::new(*p, 1.0, 1.0)?.z_plus / MarkedLf::new(*p, zb0, 1.0)?.z_plus)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SterileRatio {
    pub rho: f64,
    pub exceeds: bool,
}

/// Two-branch ratio `pi0 pib0/(pi0 - pib)` (subcritical) or
/// `pi pib/(pib - pi0)` (supercritical), with the exceedance condition.
pub fn rho_sterile_ratio(p: &LfParams) -> Result<SterileRatio> {
    let (pi0, pi, pib, pi0b) = (p.pi0, p.pi, p.pib(), p.pi0b());
    if (pi0 - pib).abs() < 1e-15 {
        return Err(Error::CriticalBoundary);
    }
    let rho = if pi0 > pib { pi0 * pi0b / (pi0 - pib) } else { pi * pib / (pib - pi0) };
    let exceeds = (pib.sqrt() > pi0 && pi0 > pib) || (pi0.sqrt() > pib && pib > pi0);
    Ok(SterileRatio { rho, exceeds })
}

/// `-z+'(1)/z+(1) = -d/dlambda log alpha(e^{-lambda})` at 0, the mean of
/// `Nb0_{n-1}/k` given `N_n = k`.
pub fn sterile_log_derivative(p: &LfParams) -> Result<f64> {
    if (p.pi0 - p.pib()).abs() < 1e-15 {
        return Err(Error::CriticalBoundary);
    }
    let m = MarkedLf::new(*p, 1.0, 1.0)?;
    let z = m.z_plus;
    let pib = p.pib();
    let bb = 1.0 - m.h.alpha;
    let dz = p.pi0 * (pib * z - 1.0) / (2.0 * pib * z - bb);
    Ok(-dz / z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lf(a: f64, b: f64) -> LfParams {
        LfParams::new(a, b).unwrap()
    }

    #[test]
    fn joint_marginals() {
        let p = lf(0.3, 0.4);
        assert_relative_eq!(gen_n_joint(&p, 3, 0.4, 1.0, 1.0), p.phi_n(3, 0.4), epsilon = 1e-15);
        assert_relative_eq!(gen_n_joint(&p, 1, 1.0, 0.0, 1.0), 0.637_931_034_482_758_6, epsilon = 1e-12);
        assert_relative_eq!(gen_n_joint(&p, 0, 1.0, 1.0, 0.0), 0.3, epsilon = 1e-15);
        assert_relative_eq!(gen_n_joint(&p, 1, 1.0, 1.0, 0.0), p.pgf(0.3), epsilon = 1e-15);
        assert_relative_eq!(p.pgf(0.3), 0.402_439_024_390_243_9, epsilon = 1e-12);
    }

    #[test]
    fn cumulated_closed_form_vs_iteration() {
        for p in [lf(0.3, 0.4), lf(0.6, 0.5), lf(0.4, 0.6)] {
            let mech: Mechanism = p.into();
            for &(zb0, zb1) in &[(0.7, 0.9), (0.2, 0.5), (1.0, 0.3), (0.0, 1.0), (1.0, 1.0)] {
                for n in 0..=6 {
                    let m = Marks { zb0, zb1, ..Marks::default() };
                    let a = cumulated_joint(&p, n, zb0, zb1).unwrap();
                    let b = marked_iteration_generic(&mech, m, Start::Phi, n);
                    assert!((a - b).abs() < 1e-12, "{p:?} {zb0} {zb1} {n}: {a} {b}");
                }
            }
        }
    }

    #[test]
    fn psi_examples() {
        let p = lf(0.4, 0.6);
        let direct = {
            let f = |z: f64| p.pi0 * (0.5 - 1.0) + p.pgf(z);
            f(f(0.5))
        };
        assert!((psi_current_vs_cum_sterile(&p, 2, 0.5, 0.5).unwrap() - direct).abs() < 1e-12);
        for n in 0..8 {
            assert!((psi_current_vs_cum_sterile(&p, n, 0.3, 1.0).unwrap() - p.phi_n(n, 0.3)).abs() < 1e-12);
        }
        let q = lf(0.3, 0.4);
        let zp0 = (1.0 - q.pi0b() * q.pi) / q.pib();
        for n in 0..6 {
            let stated = zp0 / (1.0 + (q.pi0b() * q.pi).powi(-(n as i32 + 1)) * (zp0 - 1.0));
            let v = psi_current_vs_cum_sterile(&q, n + 1, 1.0, 0.0).unwrap();
            assert!((v - stated).abs() < 1e-12);
        }
    }

    #[test]
    fn ratio_examples() {
        let r = |a, b| rho_sterile_ratio(&LfParams::from_pib(a, b).unwrap()).unwrap();
        let a = r(0.4, 0.405);
        assert!((a.rho - 48.2).abs() < 0.5 && a.exceeds);
        let b = r(0.5, 0.2);
        assert!((b.rho - 0.8333).abs() < 1e-4 && !b.exceeds);
        let c = r(0.4, 0.7);
        assert!((c.rho - 0.7).abs() < 1e-10 && !c.exceeds);
        let d = sterile_log_derivative(&LfParams::from_pib(0.4, 0.7).unwrap()).unwrap();
        assert_relative_eq!(d, 0.4, epsilon = 1e-12);
    }

    #[test]
    fn log_derivative_matches_alpha() {
        for p in [lf(0.3, 0.4), lf(0.6, 0.5)] {
            let h = 1e-6;
            let f = |l: f64| sterile_alpha(&p, (-l).exp()).unwrap().ln();
            let fd = (f(h) - f(0.0)) / h;
            assert!((fd + sterile_log_derivative(&p).unwrap()).abs() < 1e-4);
        }
    }

    #[test]
    fn conditional_limits() {
        let p = lf(0.4, 0.6);
        assert_relative_eq!(conditional_sterile_given_current(&p, 3, 2, 1.0).unwrap(), 1.0, epsilon = 1e-12);
        let den = lf_coefficient(&MarkedLf::new(p, 1.0, 1.0).unwrap().iterate_homography(2), 2);
        assert!((den - pmf_current(&p, 2, 2)).abs() < 1e-12);
    }
}
