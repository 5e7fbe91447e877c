//! Total progeny: the tree-size p.g.f. `Phi = z phi(Phi)`, Lagrange series,
//! singularity-analysis tails, critical tilting, leaves and forests.

use std::f64::consts::PI;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::lf::{LfParams, Tau};
use crate::mechanism::Mechanism;
use crate::numeric::{bisect, diff};
use crate::series::{lagrange_progeny, PowerSeries};

const FP_TOL: f64 = 1e-14;
const FP_MAX_ITER: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Recursion,
    FixedPoint,
    LfClosedForm,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "recursion" => Ok(Method::Recursion),
            "fixed-point" => Ok(Method::FixedPoint),
            "lf-closed-form" => Ok(Method::LfClosedForm),
            _ => Err(Error::InvalidParams(format!("unknown method {s}"))),
        }
    }
}

/// Smallest root of `x = g(x)` for convex increasing `g` with `g(0) >= 0`,
/// by Newton from 0 (monotone from below).
fn smallest_fixed_point<G, D>(g: G, dg: D) -> Result<f64>
where
    G: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut x = 0.0;
    for _ in 0..FP_MAX_ITER {
        let u = g(x) - x;
        if u <= 0.0 {
            return Ok(x);
        }
        let du = dg(x) - 1.0;
        if du >= 0.0 {
            // past the tangency: the root is the touching point
            return Ok(x);
        }
        let step = -u / du;
        x += step;
        if step < FP_TOL * x.max(1e-300) || step < 1e-300 {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence(FP_MAX_ITER))
}

/// `Phi(zb)`, the p.g.f. of the total progeny of one tree.
pub fn progeny_pgf(mech: &Mechanism, zb: f64, method: Method) -> Result<f64> {
    if !(0.0..=1.0).contains(&zb) {
        return Err(Error::DomainError(format!("zb = {zb} outside [0,1]")));
    }
    match method {
        Method::Recursion => {
            let mut x = 0.0;
            for _ in 0..FP_MAX_ITER {
                let nx = zb * mech.pgf(x);
                if (nx - x).abs() <= FP_TOL {
                    return Ok(nx);
                }
                x = nx;
            }
            Err(Error::NonConvergence(FP_MAX_ITER))
        }
        Method::FixedPoint => smallest_fixed_point(|x| zb * mech.pgf(x), |x| zb * mech.d1(x)),
        Method::LfClosedForm => {
            let p = mech
                .as_lf()
                .ok_or_else(|| Error::InvalidParams("closed form needs an LF mechanism".into()))?;
            Ok(lf_progeny_closed(&p, zb))
        }
    }
}

/// Smaller root of `pib x^2 - (1 - zb (pi - pi0)) x + zb pi0 = 0`.
pub fn lf_progeny_closed(p: &LfParams, zb: f64) -> f64 {
    let b = 1.0 - zb * (p.pi - p.pi0);
    let disc = (b * b - 4.0 * p.pib() * p.pi0 * zb).max(0.0);
    let den = b + disc.sqrt();
    if den == 0.0 {
        return 0.0;
    }
    2.0 * zb * p.pi0 / den
}

/// Critical LF radical `(1/(2 pib))(1 - zb(pi - pib) - sqrt((1-zb)(1-(pi-pib)^2 zb)))`.
pub fn critical_lf_radical(pi: f64, zb: f64) -> f64 {
    let pib = 1.0 - pi;
    let d = pi - pib;
    (1.0 - zb * d - ((1.0 - zb) * (1.0 - d * d * zb)).sqrt()) / (2.0 * pib)
}

/// Exact progeny pmf of a Geo0(pi) tree, `(pi pib)^k/pib * (2k-2)!/(k!(k-1)!)`.
pub fn geo0_pmf(pi: f64, k: u64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let pib = 1.0 - pi;
    let kf = k as f64;
    let lc = ln_gamma(2.0 * kf - 1.0) - ln_gamma(kf + 1.0) - ln_gamma(kf);
    (kf * (pi * pib).ln() - pib.ln() + lc).exp()
}

fn ln_binom(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

/// Exact LF progeny pmf `(1/k)[z^{k-1}] phi^k`, summed in log space.
pub fn lf_pmf(p: &LfParams, k: u64) -> f64 {
    match k {
        0 => 0.0,
        1 => p.pi0,
        _ => {
            let kf = k as f64;
            let (l0, l1, lb) = (p.pi0.ln(), p.pi1().ln(), p.pib().ln());
            let mut s = 0.0;
            for j in 1..k {
                let jf = j as f64;
                let lt = ln_binom(kf, jf)
                    + ln_binom(kf - 2.0, jf - 1.0)
                    + (kf - jf) * l0
                    + jf * l1
                    + (kf - 1.0 - jf) * lb;
                s += lt.exp();
            }
            s / kf
        }
    }
}

/// Tree-size law with its tail parameters.
#[derive(Clone, Debug)]
pub struct ProgenyLaw {
    pub mech: Mechanism,
    pub tau: Tau,
    /// `sqrt(phi(tau) / (2 pi phi''(tau)))`
    pub amplitude: f64,
}

impl ProgenyLaw {
    pub fn new(mech: Mechanism) -> Result<Self> {
        let tau = mech.tau()?;
        let amplitude = tail_amplitude(&mech, tau.tau);
        Ok(Self { mech, tau, amplitude })
    }

    pub fn pgf(&self, zb: f64) -> Result<f64> {
        progeny_pgf(&self.mech, zb, Method::FixedPoint)
    }

    /// `P(N = k)` for `k = 0..=order`.
    pub fn pmf(&self, order: usize) -> Vec<f64> {
        lagrange_progeny(&self.mech, 1, order).into_coeffs()
    }

    pub fn tail(&self, k: u64) -> f64 {
        let kf = k as f64;
        self.amplitude * kf.powf(-1.5) * self.tau.zc.powf(-kf)
    }

    /// Pure-power tail of the tilted (critical) tree.
    pub fn tilted_tail(&self, k: u64) -> f64 {
        self.amplitude / self.tau.tau * (k as f64).powf(-1.5)
    }

    /// Periodic offspring laws break the singularity analysis.
    pub fn tail_verified(&self) -> bool {
        !self.mech.is_periodic()
    }
}

fn tail_amplitude(mech: &Mechanism, tau: f64) -> f64 {
    (mech.pgf(tau) / (2.0 * PI * mech.d2(tau))).sqrt()
}

/// Leading-order `P(N = k)`.
pub fn progeny_tail(mech: &Mechanism, k: u64) -> Result<f64> {
    Ok(ProgenyLaw::new(*mech)?.tail(k))
}

/// Leading-order tree-size pmf of the tilted critical mechanism.
pub fn tilted_tail(mech: &Mechanism, k: u64) -> Result<f64> {
    Ok(ProgenyLaw::new(*mech)?.tilted_tail(k))
}

/// `phi(tau z)/phi(tau)`, a critical mechanism of the same family.
pub fn tilt_critical(mech: &Mechanism) -> Result<Mechanism> {
    let Tau { tau, .. } = mech.tau()?;
    let norm = mech.pgf(tau);
    let out = match *mech {
        Mechanism::Lf { .. } | Mechanism::Geo0 { .. } => {
            let p = mech.as_lf().unwrap();
            Mechanism::Lf { pi0: p.pi0 / norm, pi: 1.0 - p.pib() * tau }
        }
        Mechanism::Binary { q, r, p } => Mechanism::Binary {
            q: q / norm,
            r: r * tau / norm,
            p: p * tau * tau / norm,
        },
        Mechanism::Poisson { mu } => Mechanism::Poisson { mu: mu * tau },
        Mechanism::NegBin { alpha, theta } => Mechanism::NegBin { alpha: alpha * tau, theta },
        Mechanism::Binomial { alpha, d } => {
            let a = alpha * tau;
            Mechanism::Binomial { alpha: a / (1.0 - alpha + a), d }
        }
        Mechanism::Affine { .. } => return Err(Error::AffineMechanism),
        Mechanism::DampedSibuya { alpha, lambda, zstar } => {
            Mechanism::DampedSibuya { alpha, lambda, zstar: zstar / tau }
        }
    };
    Ok(out)
}

/// `phibar(x) = phi(1-x) - 1 + mu x` as a series in `x`.
pub fn phibar_series(mech: &Mechanism, order: usize) -> PowerSeries {
    let t = mech.taylor(1.0, order);
    let mut c: Vec<f64> = t
        .iter()
        .enumerate()
        .map(|(k, &v)| if k % 2 == 0 { v } else { -v })
        .collect();
    c[0] = 0.0;
    if order >= 1 {
        c[1] = 0.0;
    }
    PowerSeries::new(c)
}

/// Lagrange inversion: coefficients of `x(w)` solving `x = w r(x)`,
/// `x_n = (1/n)[x^{n-1}] r^n`, together with `(1/n)[x^{n-1}] h'(x) r^n`.
fn lagrange(r: &PowerSeries, h_prime: Option<&PowerSeries>, order: usize) -> Vec<f64> {
    let mut out = vec![0.0; order + 1];
    let mut rp = PowerSeries::constant(1.0, r.order());
    for n in 1..=order {
        rp = rp.mul(r);
        let c = match h_prime {
            Some(h) => h.mul(&rp).coeff(n - 1),
            None => rp.coeff(n - 1),
        };
        out[n] = c / n as f64;
    }
    out
}

fn shift_down(s: &PowerSeries, by: usize) -> PowerSeries {
    let c = s.coeffs();
    let mut v: Vec<f64> = c[by.min(c.len())..].to_vec();
    v.resize(c.len() - by, 0.0);
    PowerSeries::new(v)
}

/// Coefficients `rho_k` (index `k`, `rho_0 = 0`) of `1 - rho_e` in powers of `mu - 1`.
pub fn extinction_series(mech: &Mechanism, order: usize) -> Result<Vec<f64>> {
    let k = order + 2;
    let pb = phibar_series(mech, k);
    let r = shift_down(&pb, 2).reciprocal()?;
    Ok(lagrange(&r, None, order))
}

/// `delta(x) = phibar(x) + (1-x) phibar'(x)`; the tangency is `delta(1 - tau) = mu - 1`.
fn delta_series(mech: &Mechanism, order: usize) -> PowerSeries {
    let pb = phibar_series(mech, order);
    let d = pb.derivative();
    let one_minus = {
        let mut c = vec![0.0; order + 1];
        c[0] = 1.0;
        if order >= 1 {
            c[1] = -1.0;
        }
        PowerSeries::new(c)
    };
    pb.add(&one_minus.mul(&d))
}

/// Coefficients `tau_n` of `1 - tau` in powers of `mu - 1`.
pub fn tau_series(mech: &Mechanism, order: usize) -> Result<Vec<f64>> {
    let k = order + 2;
    let r = shift_down(&delta_series(mech, k), 1).reciprocal()?;
    Ok(lagrange(&r, None, order))
}

/// Coefficients `z_n` of `z_c` in powers of `mu - 1`, with `z_0 = 1/mu`.
pub fn zc_series(mech: &Mechanism, order: usize) -> Result<Vec<f64>> {
    let k = order + 2;
    let mu = mech.mean();
    let r = shift_down(&delta_series(mech, k), 1).reciprocal()?;
    let slope = PowerSeries::constant(mu, k).sub(&phibar_series(mech, k).derivative());
    let h = slope.reciprocal()?;
    let mut out = lagrange(&r, Some(&h.derivative()), order);
    out[0] = 1.0 / mu;
    Ok(out)
}

/// `sum_n c_n w^n`.
pub fn eval_series(c: &[f64], w: f64) -> f64 {
    c.iter().rev().fold(0.0, |a, &x| a * w + x)
}

/// Joint p.g.f. of (leaves, nodes): smallest root of `x = zb(pi0(zb0 - 1) + phi(x))`.
pub fn leaves_joint(mech: &Mechanism, zb0: f64, zb: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&zb0) || !(0.0..=1.0).contains(&zb) {
        return Err(Error::DomainError(format!("({zb0}, {zb}) outside [0,1]^2")));
    }
    let shift = mech.pi0() * (zb0 - 1.0);
    smallest_fixed_point(|x| zb * (shift + mech.pgf(x)), |x| zb * mech.d1(x))
}

/// `(m0, sigma0^2)`: asymptotic mean and variance per node of the leaf count.
pub fn leaves_moments(mech: &Mechanism) -> Result<(f64, f64)> {
    let Tau { tau, .. } = mech.tau()?;
    let p0 = mech.pi0();
    let ft = mech.pgf(tau);
    let m0 = p0 / ft;
    let s2 = m0 - m0 * m0 - p0 * p0 / (tau * tau * ft * ft * mech.d2(tau));
    Ok((m0, s2))
}

/// Large-deviation data for the leaf fraction of size-`k` trees.
#[derive(Clone, Debug)]
pub struct LeafLaw {
    pub mech: Mechanism,
    pub tau: f64,
    pub m0: f64,
    pub sigma0_sq: f64,
    /// `F'(0)`, the almost-sure leaf fraction.
    pub rho_star: f64,
    grid: Vec<(f64, f64)>,
}

pub const LDP_LAMBDA_MAX: f64 = 10.0;
pub const LDP_GRID: usize = 10_000;

impl LeafLaw {
    pub fn new(mech: Mechanism) -> Result<Self> {
        let tau = mech.tau()?.tau;
        let (m0, sigma0_sq) = leaves_moments(&mech)?;
        let mut law = LeafLaw { mech, tau, m0, sigma0_sq, rho_star: f64::NAN, grid: Vec::new() };
        let h = 1e-5;
        law.rho_star = (law.big_f(h)? - law.big_f(-h)?) / (2.0 * h);
        let mut grid = Vec::with_capacity(2 * LDP_GRID + 1);
        for i in 0..=2 * LDP_GRID {
            let l = LDP_LAMBDA_MAX * (i as f64 / LDP_GRID as f64 - 1.0);
            if let Ok(f) = law.big_f(l) {
                grid.push((l, f));
            }
        }
        law.grid = grid;
        Ok(law)
    }

    /// `tau(zb0)`: root of `pi0(zb0 - 1) + phi(t) - t phi'(t) = 0`.
    pub fn marked_tau(&self, zb0: f64) -> Result<f64> {
        let m = &self.mech;
        let p0 = m.pi0();
        if zb0 == 0.0 {
            return Ok(0.0);
        }
        let g = |t: f64| p0 * (zb0 - 1.0) + m.pgf(t) - t * m.d1(t);
        if zb0 == 1.0 {
            return Ok(self.tau);
        }
        if zb0 < 1.0 {
            return bisect(g, 0.0, self.tau, 1e-15);
        }
        let zs = m.radius();
        let hi = if zs.is_finite() {
            zs * (1.0 - 1e-12)
        } else {
            let mut h = 2.0 * self.tau.max(1.0);
            while g(h) > 0.0 && h < 1e8 {
                h *= 2.0;
            }
            h
        };
        bisect(g, self.tau, hi, 1e-15)
    }

    /// `alpha(zb0) = phi'(tau(1)) / phi'(tau(zb0))`.
    pub fn alpha(&self, zb0: f64) -> Result<f64> {
        let t = self.marked_tau(zb0)?;
        Ok(self.mech.d1(self.tau) / self.mech.d1(t))
    }

    /// `F(lambda) = log alpha(e^{-lambda})`.
    pub fn big_f(&self, lambda: f64) -> Result<f64> {
        Ok(self.alpha((-lambda).exp())?.ln())
    }

    /// `f(rho) = inf_lambda (lambda rho - F(lambda))` over the grid, refined
    /// by golden-section search around the best grid point.
    pub fn rate(&self, rho: f64) -> f64 {
        let obj = |l: f64, f: f64| l * rho - f;
        let (mut best, mut bi) = (f64::INFINITY, 0);
        for (i, &(l, f)) in self.grid.iter().enumerate() {
            let v = obj(l, f);
            if v < best {
                best = v;
                bi = i;
            }
        }
        let lo = self.grid[bi.saturating_sub(1)].0;
        let hi = self.grid[(bi + 1).min(self.grid.len() - 1)].0;
        let eval = |l: f64| self.big_f(l).map(|f| obj(l, f)).unwrap_or(f64::INFINITY);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (lo, hi);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (eval(c), eval(d));
        for _ in 0..80 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = eval(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = eval(d);
            }
        }
        best.min(fc).min(fd)
    }

    pub fn joint(&self, zb0: f64, zb: f64) -> Result<f64> {
        leaves_joint(&self.mech, zb0, zb)
    }
}

pub fn leaves_ldp(mech: &Mechanism) -> Result<LeafLaw> {
    LeafLaw::new(*mech)
}

/// Leading-order pmf of the size of a forest whose founder count has p.g.f. `founder`.
pub fn forest_tail(mech: &Mechanism, founder: &Mechanism, k: u64) -> Result<f64> {
    let law = ProgenyLaw::new(*mech)?;
    Ok(founder.d1(law.tau.tau) * law.tail(k))
}

/// Exact forest-size pmf `[z^k] phi0(Phi(z))` for `k = 0..=order`.
pub fn forest_pmf(mech: &Mechanism, founder: &Mechanism, order: usize) -> Result<Vec<f64>> {
    let phi = lagrange_progeny(mech, 1, order);
    let outer = PowerSeries::new(founder.coefficients(order));
    Ok(outer.compose(&phi)?.into_coeffs())
}

/// Residuals of the two candidate descriptions of a supercritical tree
/// conditioned on being finite.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FiniteConditioning {
    /// `Phi~ = (Phi - rho)/(1 - rho)` against `(phi(z) - rho)/(1 - rho)`.
    pub stated: f64,
    /// `Phi~ = Phi/rho` against `phi(rho z)/rho`.
    pub corrected: f64,
}

pub fn finite_conditioning(mech: &Mechanism, zb: f64) -> Result<FiniteConditioning> {
    let rho = mech.extinction();
    if rho >= 1.0 {
        return Err(Error::NotSupercritical(mech.mean()));
    }
    let full = progeny_pgf(mech, zb, Method::FixedPoint)?;
    let t = (full - rho) / (1.0 - rho);
    let stated = t - zb * (mech.pgf(t) - rho) / (1.0 - rho);
    let c = full / rho;
    let corrected = c - zb * mech.pgf(rho * c) / rho;
    Ok(FiniteConditioning { stated, corrected })
}

/// Mean of the tree size from its pmf.
pub fn mean_from_pmf(pmf: &[f64]) -> f64 {
    pmf.iter().enumerate().map(|(k, &p)| k as f64 * p).sum()
}

/// `phi'(1)` by central difference.
/// `P(progeny = k, leaves = l)` for `l = 0..=k`, by the cyclic lemma:
/// `(1/k) C(k, l) pi0^l [x^{k-1}] (phi(x) - pi0)^{k-l}`.
pub fn leaves_pmf(mech: &Mechanism, k: u64) -> Vec<f64> {
    let mut out = vec![0.0; k as usize + 1];
    if k == 0 {
        return out;
    }
    let order = k as usize - 1;
    let mut c = mech.coefficients(order);
    let pi0 = c[0];
    c[0] = 0.0;
    let psi = PowerSeries::new(c);
    for (l, slot) in out.iter_mut().enumerate() {
        let rest = k - l as u64;
        let coeff = if rest == 0 {
            if order == 0 { 1.0 } else { 0.0 }
        } else {
            psi.pow(rest as u32).coeff(order)
        };
        *slot = crate::numeric::binom(k, l as u64) * pi0.powi(l as i32) * coeff / k as f64;
    }
    out
}

pub fn numeric_mean(mech: &Mechanism) -> f64 {
    diff(|z| mech.pgf(z), 1.0, 1e-5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lf(a: f64, b: f64) -> Mechanism {
        Mechanism::lf(a, b).unwrap()
    }

    #[test]
    fn phi_zero_and_geo0() {
        let g = Mechanism::Geo0 { pi0: 0.5 };
        for m in [Method::Recursion, Method::FixedPoint, Method::LfClosedForm] {
            assert_eq!(progeny_pgf(&g, 0.0, m).unwrap(), 0.0);
            assert_relative_eq!(progeny_pgf(&g, 0.75, m).unwrap(), 0.5, epsilon = 1e-12);
        }
        assert_relative_eq!(critical_lf_radical(0.5, 0.75), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn phi_one_is_extinction() {
        let m = lf(0.3, 0.4);
        for meth in [Method::Recursion, Method::FixedPoint, Method::LfClosedForm] {
            assert_relative_eq!(progeny_pgf(&m, 1.0, meth).unwrap(), 0.5, epsilon = 1e-10);
        }
    }

    #[test]
    fn methods_agree() {
        for m in [lf(0.3, 0.4), lf(0.6, 0.5), lf(0.5, 0.5), lf(0.2, 0.7)] {
            let pmf = lagrange_progeny(&m, 1, 400);
            for i in 0..=10 {
                let z = 0.5 * i as f64 / 10.0;
                let a = progeny_pgf(&m, z, Method::Recursion).unwrap();
                let b = progeny_pgf(&m, z, Method::FixedPoint).unwrap();
                let c = progeny_pgf(&m, z, Method::LfClosedForm).unwrap();
                let d = pmf.eval(z);
                assert!((a - b).abs() < 1e-10 && (b - c).abs() < 1e-10 && (c - d).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn critical_radical_matches() {
        let m = lf(0.5, 0.5);
        let p = m.as_lf().unwrap();
        let crit = LfParams::new(1.0 - 0.7, 0.7).unwrap();
        for i in 0..=10 {
            let z = i as f64 / 10.0;
            assert_relative_eq!(lf_progeny_closed(&p, z), critical_lf_radical(0.5, z), epsilon = 1e-12);
            assert_relative_eq!(lf_progeny_closed(&crit, z), critical_lf_radical(0.7, z), epsilon = 1e-12);
        }
    }

    #[test]
    fn functional_residual() {
        for m in [lf(0.3, 0.4), lf(0.6, 0.5), Mechanism::Poisson { mu: 0.8 }] {
            let zc = m.tau().unwrap().zc;
            for i in 0..=20 {
                let z = 0.99 * zc.min(1.0) * i as f64 / 20.0;
                let x = progeny_pgf(&m, z, Method::FixedPoint).unwrap();
                assert!((x - z * m.pgf(x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn geo0_catalan_pmf() {
        let pi = 0.6;
        let m = Mechanism::Geo0 { pi0: pi };
        let pmf = lagrange_progeny(&m, 1, 60);
        for k in 1..=60 {
            assert_relative_eq!(pmf.coeff(k), geo0_pmf(pi, k as u64), max_relative = 1e-10);
            assert_relative_eq!(lf_pmf(&m.as_lf().unwrap(), k as u64), geo0_pmf(pi, k as u64), max_relative = 1e-10);
        }
        let law = ProgenyLaw::new(m).unwrap();
        let rel = (law.tail(200) / geo0_pmf(pi, 200) - 1.0).abs();
        assert!(rel < 0.02, "{rel}");
    }

    #[test]
    fn critical_pure_power() {
        let m = lf(0.4, 0.6);
        assert_eq!(m.class(), crate::CriticalityClass::Critical);
        let law = ProgenyLaw::new(m).unwrap();
        let d2 = 2.0 * 0.4 / 0.6;
        assert_relative_eq!(m.d2(1.0), d2, epsilon = 1e-12);
        let k = 500u64;
        let pure = (k as f64).powf(-1.5) / (2.0 * PI * d2).sqrt();
        assert_relative_eq!(law.tail(k), pure, max_relative = 1e-9);
        let exact = lf_pmf(&m.as_lf().unwrap(), k);
        assert!((exact / pure - 1.0).abs() < 0.01);
    }

    #[test]
    fn subcritical_mean() {
        let p = LfParams::new(0.6, 0.5).unwrap();
        let mu = p.mu();
        let pmf: Vec<f64> = (0..6000).map(|k| lf_pmf(&p, k)).collect();
        assert_relative_eq!(pmf.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(mean_from_pmf(&pmf), 1.0 / (1.0 - mu), epsilon = 1e-8);
    }

    #[test]
    fn conditioning_on_finite() {
        let m = lf(0.3, 0.4);
        let mut worst: f64 = 0.0;
        for i in 0..=10 {
            let r = finite_conditioning(&m, i as f64 / 10.0).unwrap();
            assert!(r.corrected.abs() < 1e-10);
            worst = worst.max(r.stated.abs());
        }
        assert!(worst > 1e-2);
    }

    #[test]
    fn shifted_geometric_extinction_series() {
        let mu = 1.08;
        let m = Mechanism::Geo0 { pi0: 1.0 / (1.0 + mu) };
        let rho = extinction_series(&m, 10).unwrap();
        for k in 1..=10 {
            assert_relative_eq!(rho[k], mu.powi(-(k as i32 + 1)), max_relative = 1e-9);
        }
        let d2 = m.d2(1.0);
        let d3 = m.pgf_derivative(1.0, 3);
        assert_relative_eq!(rho[1], 2.0 / d2, max_relative = 1e-12);
        assert_relative_eq!(rho[2], 4.0 / 3.0 * d3 / d2.powi(3), max_relative = 1e-10);
        let s = eval_series(&rho, mu - 1.0);
        assert!((s - (1.0 - 1.0 / mu)).abs() < 1e-9);
    }

    #[test]
    fn lf_rho1_near_critical() {
        let (pi0, pi) = (0.4, 0.6 * 0.98);
        let m = lf(pi0, pi);
        let rho = extinction_series(&m, 4).unwrap();
        let sc2 = 2.0 * pi0 / pi;
        assert_relative_eq!(rho[1], 2.0 / m.d2(1.0), max_relative = 1e-12);
        assert!((rho[1] - 2.0 / sc2).abs() / (2.0 / sc2) < 0.05);
    }

    #[test]
    fn tau_and_zc_series() {
        for &w in &[-0.1, -0.05, 0.03, 0.08] {
            let pi0: f64 = 0.4;
            let mu: f64 = 1.0 + w;
            let m = Mechanism::Lf { pi0, pi: (1.0 - pi0) / mu };
            assert_relative_eq!(m.mean(), mu, epsilon = 1e-12);
            let t = m.tau().unwrap();
            let mut prev = f64::INFINITY;
            for order in [2usize, 4, 8] {
                let ts = tau_series(&m, order).unwrap();
                let zs = zc_series(&m, order).unwrap();
                let et = (1.0 - eval_series(&ts, w) - t.tau).abs();
                let ez = (eval_series(&zs, w) - t.zc).abs();
                let bound = (3.0 * w.abs()).powi(order as i32 + 1);
                assert!(et < bound && ez < bound, "{w} {order} {et} {ez}");
                assert!(et <= prev + 1e-15);
                prev = et;
            }
        }
    }

    #[test]
    fn zc_quadratic_constant() {
        let pi0 = 0.4;
        for &w in &[0.01f64, -0.01, 0.005] {
            let m = Mechanism::Lf { pi0, pi: (1.0 - pi0) / (1.0 + w) };
            let zc = m.tau().unwrap().zc;
            let s2 = m.d2(1.0);
            let lead = 1.0 - w * w / (2.0 * s2);
            assert!((1.0 / zc - lead).abs() < 5.0 * w.abs().powi(3));
        }
    }

    #[test]
    fn tilts() {
        let cases = [
            (Mechanism::Geo0 { pi0: 0.3 }, Box::new(|z: f64| 1.0 / (2.0 - z)) as Box<dyn Fn(f64) -> f64>),
            (Mechanism::Poisson { mu: 1.7 }, Box::new(|z: f64| (z - 1.0).exp())),
            (Mechanism::NegBin { alpha: 0.3, theta: 2.5 }, Box::new(|z: f64| (2.5 / (3.5 - z)).powf(2.5))),
            (Mechanism::Binomial { alpha: 0.6, d: 3 }, Box::new(|z: f64| (1.0 - 1.0 / 3.0 + z / 3.0).powi(3))),
        ];
        for (m, closed) in cases {
            let t = tilt_critical(&m).unwrap();
            let tau = m.tau().unwrap().tau;
            for i in 0..=10 {
                let z = i as f64 / 10.0;
                assert_relative_eq!(t.pgf(z), closed(z), epsilon = 1e-10);
                assert_relative_eq!(t.pgf(z), m.pgf(tau * z) / m.pgf(tau), epsilon = 1e-10);
            }
            assert_relative_eq!(t.mean(), 1.0, epsilon = 1e-10);
        }
        let t = tilt_critical(&lf(0.6, 0.5)).unwrap();
        assert_relative_eq!(numeric_mean(&t), 1.0, epsilon = 1e-8);
        assert!(tilt_critical(&Mechanism::Affine { alpha: 0.3 }).is_err());
    }

    #[test]
    fn tilted_tail_is_critical_tail() {
        for m in [lf(0.3, 0.4), lf(0.6, 0.5), Mechanism::Poisson { mu: 1.4 }] {
            let t = tilt_critical(&m).unwrap();
            let k = 300;
            assert_relative_eq!(tilted_tail(&m, k).unwrap(), progeny_tail(&t, k).unwrap(), max_relative = 1e-6);
        }
    }

    #[test]
    fn leaves_basics() {
        let g = Mechanism::Geo0 { pi0: 0.5 };
        assert_eq!(leaves_joint(&g, 0.0, 1.0).unwrap(), 0.0);
        let m = lf(0.3, 0.4);
        assert_relative_eq!(leaves_joint(&m, 1.0, 1.0).unwrap(), 0.5, epsilon = 1e-12);
        for i in 0..=5 {
            let z = i as f64 / 5.0;
            assert_relative_eq!(
                leaves_joint(&m, 1.0, z).unwrap(),
                progeny_pgf(&m, z, Method::FixedPoint).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn leaf_fractions() {
        let (m0, s2) = leaves_moments(&Mechanism::Geo0 { pi0: 0.5 }).unwrap();
        assert_relative_eq!(m0, 0.5, epsilon = 1e-12);
        assert_relative_eq!(s2, 0.125, epsilon = 1e-12);
        assert_relative_eq!(leaves_moments(&Mechanism::Geo0 { pi0: 0.3 }).unwrap().0, 0.5, epsilon = 1e-10);
        assert_relative_eq!(leaves_moments(&Mechanism::Poisson { mu: 1.6 }).unwrap().0, (-1f64).exp(), epsilon = 1e-10);
        let nb = leaves_moments(&Mechanism::NegBin { alpha: 0.4, theta: 2.0 }).unwrap().0;
        assert_relative_eq!(nb, (2.0f64 / 3.0).powi(2), epsilon = 1e-10);
        for a in [0.2, 0.5, 0.7] {
            let f = leaves_moments(&Mechanism::Binomial { alpha: a, d: 3 }).unwrap().0;
            assert_relative_eq!(f, 8.0 / 27.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn geo0_ldp() {
        let pi0 = 0.35;
        let law = LeafLaw::new(Mechanism::Geo0 { pi0 }).unwrap();
        for &z in &[0.2, 0.5, 0.9, 1.5, 4.0] {
            let closed = (z - f64::sqrt(z)) / ((1.0 - pi0) * (z - 1.0));
            assert_relative_eq!(law.marked_tau(z).unwrap(), closed, epsilon = 1e-10);
        }
        for &l in &[-2.0, -0.3, 0.4, 3.0] {
            let closed = 4f64.ln() - 2.0 * (1.0 + (-l / 2.0f64).exp()).ln();
            assert_relative_eq!(law.big_f(l).unwrap(), closed, epsilon = 1e-9);
        }
        assert_relative_eq!(law.rho_star, 0.5, epsilon = 1e-8);
        assert!(law.rate(law.rho_star).abs() < 1e-10);
        for &r in &[0.3, 0.45, 0.6, 0.7] {
            let closed = -4f64.ln() - 2.0 * (r * f64::ln(r) + (1.0 - r) * f64::ln(1.0 - r));
            assert_relative_eq!(law.rate(r), closed, epsilon = 1e-9);
            assert!(law.rate(r) < 0.0);
        }
    }

    #[test]
    fn binary_ldp() {
        let m = Mechanism::binary(0.25, 0.5, 0.25).unwrap();
        let law = LeafLaw::new(m).unwrap();
        assert_relative_eq!(law.marked_tau(0.64).unwrap(), 0.8, epsilon = 1e-10);
        assert_relative_eq!(law.rho_star, 0.25, epsilon = 1e-8);
        assert_relative_eq!(law.m0, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn forests() {
        let m = lf(0.4, 0.6);
        let k = 200;
        let base = progeny_tail(&m, k).unwrap();
        let single = Mechanism::Affine { alpha: 1.0 };
        assert_relative_eq!(forest_tail(&m, &single, k).unwrap(), base, max_relative = 1e-12);
        let pois = Mechanism::Poisson { mu: 2.0 };
        assert_relative_eq!(forest_tail(&m, &pois, k).unwrap(), 2.0 * base, max_relative = 1e-12);
        let exact = forest_pmf(&m, &pois, 60).unwrap();
        let rel = (exact[60] / forest_tail(&m, &pois, 60).unwrap() - 1.0).abs();
        assert!(rel < 0.05, "{rel}");
        let sub = lf(0.6, 0.5);
        let exact = forest_pmf(&sub, &pois, 60).unwrap();
        let rel = (exact[60] / forest_tail(&sub, &pois, 60).unwrap() - 1.0).abs();
        assert!(rel < 0.05, "{rel}");
    }
}
