//! The skip-free-to-the-left walk `S_{n+1} = S_n + M - 1` attached to a
//! BGW process: harmonic function, first passages, scale functions, width.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::function::factorial::ln_binomial as ln_binom;

use crate::error::{Error, Result};
use crate::lf::LfParams;
use crate::mechanism::Mechanism;
use crate::progeny::{progeny_pgf, Method};
use crate::series::{lagrange_progeny, PowerSeries};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Moment {
    Finite(f64),
    Infinite,
}

impl Moment {
    pub fn value(self) -> f64 {
        match self {
            Moment::Finite(v) => v,
            Moment::Infinite => f64::INFINITY,
        }
    }
}

/// `h(i) = (1 - rho^i)/(1 - rho)`, or `i` when `rho = 1`.
pub fn harmonic(mech: &Mechanism, i: u64) -> f64 {
    let rho = mech.extinction();
    if rho >= 1.0 {
        i as f64
    } else {
        (1.0 - rho.powi(i as i32)) / (1.0 - rho)
    }
}

/// `sum_j Pi(i, j) h(j) - h(i)` on the absorbed walk, truncated once the
/// offspring tail drops below `tail`. Returns the residual and the neglected mass.
pub fn harmonic_residual(mech: &Mechanism, i: u64, tail: f64) -> (f64, f64) {
    let mut k = 64;
    let coeffs = loop {
        let c = mech.coefficients(k);
        let mass: f64 = c.iter().sum();
        if 1.0 - mass < tail || k >= 1 << 16 {
            break c;
        }
        k *= 2;
    };
    let h = |j: u64| if j == 0 { 0.0 } else { harmonic(mech, j) };
    let s: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(m, &p)| p * h(i + m as u64 - 1))
        .sum();
    let neglected = 1.0 - coeffs.iter().sum::<f64>();
    (s - h(i), neglected)
}

/// `P(theta_{i,k} < theta_{i,0}) = h(i)/h(k)`.
pub fn hit_before_ruin(mech: &Mechanism, i: u64, k: u64) -> Result<f64> {
    if k <= i || i == 0 {
        return Err(Error::DomainError(format!("need k > i >= 1, got i={i}, k={k}")));
    }
    Ok(harmonic(mech, i) / harmonic(mech, k))
}

/// `P(S_n(i) = j) = [z^{j-i+n}] phi^n` for the free walk.
pub fn free_walk_pmf(mech: &Mechanism, n: u64, i: i64, j: i64) -> f64 {
    let idx = j - i + n as i64;
    if idx < 0 {
        return 0.0;
    }
    if n == 0 {
        return if idx == 0 { 1.0 } else { 0.0 };
    }
    let order = idx as usize;
    let phi = PowerSeries::new(mech.coefficients(order));
    phi.pow(n as u32).coeff(order)
}

/// `P(theta_{i,0} = m) = (i/m) P(S_m(i) = 0)`.
pub fn first_passage_pmf(mech: &Mechanism, i: u64, m: u64) -> f64 {
    if m < i || i == 0 {
        return 0.0;
    }
    i as f64 / m as f64 * free_walk_pmf(mech, m, i as i64, 0)
}

/// `P(theta_{i,0} = m)` for `m = 0..=order`.
pub fn first_passage_law(mech: &Mechanism, i: u64, order: usize) -> Vec<f64> {
    lagrange_progeny(mech, i as usize, order).into_coeffs()
}

/// LF convolution form `P(S_n(i) = 0) = pi0^n (a*b)_{n-i}`.
pub fn law_s0_lf(p: &LfParams, n: u64, i: u64) -> f64 {
    if n < i {
        return 0.0;
    }
    let m = n - i;
    let r = (p.pi0b() - p.pib()) / p.pi0;
    let (lr, lb, l0) = (r.abs().ln(), p.pib().ln(), p.pi0.ln());
    let mut s = 0.0;
    let kmax = if r == 0.0 { 0 } else { m.min(n) };
    for k in 0..=kmax {
        let l = m - k;
        let lt = ln_binom(n, k) + if k == 0 { 0.0 } else { k as f64 * lr } + ln_binom(n + l - 1, n - 1) + l as f64 * lb + n as f64 * l0;
        let sign = if r < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        s += sign * lt.exp();
    }
    s
}

pub fn first_passage_lf(p: &LfParams, i: u64, n: u64) -> f64 {
    if n < i || i == 0 {
        return 0.0;
    }
    i as f64 / n as f64 * law_s0_lf(p, n, i)
}

/// `E(theta_{i,0} | theta_{i,0} < inf) = i / (1 - phi'(rho))`.
pub fn theta_conditional_mean(mech: &Mechanism, i: u64) -> Moment {
    let rho = mech.extinction();
    let slope = mech.d1(rho);
    if slope >= 1.0 - 1e-12 {
        Moment::Infinite
    } else {
        Moment::Finite(i as f64 / (1.0 - slope))
    }
}

/// The printed variant `i rho / (1 - phi'(rho))`.
pub fn theta_conditional_mean_stated(mech: &Mechanism, i: u64) -> Moment {
    let rho = mech.extinction();
    match theta_conditional_mean(mech, i) {
        Moment::Finite(v) => Moment::Finite(v * rho),
        m => m,
    }
}

/// Scale function `w_u` of the walk, from `1/(phi(z) - z/u)`.
#[derive(Clone, Debug, Serialize)]
pub struct ScaleFunction {
    pub mech: Mechanism,
    pub u: f64,
    pub values: Vec<f64>,
    /// smallest root of `u phi(r) = r`
    pub radius: f64,
}

impl ScaleFunction {
    pub fn w(&self, j: usize) -> f64 {
        self.values[j]
    }
}

pub fn scale(mech: &Mechanism, u: f64, order: usize) -> Result<ScaleFunction> {
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::DomainError(format!("u = {u} outside (0,1]")));
    }
    let mut c = mech.coefficients(order);
    if order >= 1 {
        c[1] -= 1.0 / u;
    }
    if c[0] <= 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let values = PowerSeries::new(c).reciprocal()?.into_coeffs();
    let radius = progeny_pgf(mech, u, Method::FixedPoint)?;
    Ok(ScaleFunction { mech: *mech, u, values, radius })
}

/// LF closed form of `w(j) = w_1(j)` in the three regimes.
pub fn scale_lf_closed(p: &LfParams, j: u64) -> f64 {
    let (pi0, pi, pib, pi0b) = (p.pi0, p.pi, p.pib(), p.pi0b());
    let e = (j + 1) as i32;
    if (pi0 - pib).abs() < 1e-14 {
        (1.0 + pi * j as f64) / pib
    } else if pi0 > pib {
        pi / (pi0 - pib) * (1.0 - (pi0b / pi) * (pi0 / pib).powi(-e))
    } else {
        pi / (pib - pi0) * ((pi0b / pi) * (pib / pi0).powi(e) - 1.0)
    }
}

/// Binary `q + r z + p z^2` closed form of `w(j)`.
pub fn scale_binary_closed(q: f64, p: f64, j: u64) -> f64 {
    let e = (j + 1) as i32;
    if (p - q).abs() < 1e-14 {
        (1.0 + j as f64) / p
    } else if p < q {
        (1.0 - (q / p).powi(-e)) / (q - p)
    } else {
        ((p / q).powi(e) - 1.0) / (p - q)
    }
}

/// `w(j)`, by the closed form when one is available.
pub fn scale_value(mech: &Mechanism, j: u64) -> Result<f64> {
    if let Some(p) = mech.as_lf() {
        return Ok(scale_lf_closed(&p, j));
    }
    if let Mechanism::Binary { q, p, .. } = *mech {
        return Ok(scale_binary_closed(q, p, j));
    }
    Ok(scale(mech, 1.0, j as usize)?.w(j as usize))
}

/// `w(j)/w(i+j)`: the law of the running maximum of the walk before ruin,
/// stated in the source as the law of the maximal generation size.
pub fn width_cdf(mech: &Mechanism, i: u64, j: u64) -> Result<f64> {
    if i == 0 {
        return Err(Error::DomainError("i >= 1".into()));
    }
    Ok(scale_value(mech, j)? / scale_value(mech, i + j)?)
}

/// `P(max_n N_n <= m, extinction)` for `i` founders, from the BGW chain
/// killed above `m` (exact up to linear-solve rounding).
pub fn width_markov_cdf(mech: &Mechanism, i: u64, m: u64) -> Result<f64> {
    if i == 0 || i > m {
        return Ok(if i == 0 { 1.0 } else { 0.0 });
    }
    let n = m as usize;
    let phi = PowerSeries::new(mech.coefficients(n));
    let mut a = DMatrix::<f64>::identity(n, n);
    let mut b = DVector::<f64>::zeros(n);
    let mut pw = PowerSeries::constant(1.0, n);
    for row in 0..n {
        pw = pw.mul(&phi);
        b[row] = pw.coeff(0);
        for col in 0..n {
            a[(row, col)] -= pw.coeff(col + 1);
        }
    }
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::DomainError("singular killed chain".into()))?;
    Ok(x[(i - 1) as usize])
}

/// Free-walk resolvent `g_{i,j}(u) = sum_n u^n P(S_n(i) = j)`, summed directly.
pub fn resolvent(mech: &Mechanism, u: f64, i: i64, j: i64, max_terms: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::DomainError(format!("u = {u}")));
    }
    let d = j - i;
    let mut sum = if d == 0 { 1.0 } else { 0.0 };
    if u == 0.0 {
        return Ok(sum);
    }
    if d < 0 {
        // skip-free downward: first reach j, then return
        let phi_u = progeny_pgf(mech, u, Method::FixedPoint)?;
        let g00 = 1.0 / (1.0 - u * mech.d1(phi_u));
        return Ok(phi_u.powi((-d) as i32) * g00);
    }
    let d = d as usize;
    let mut order = d + 64;
    let mut phi = PowerSeries::new(mech.coefficients(order));
    let mut pw = PowerSeries::constant(1.0, order);
    let mut un = 1.0;
    let mut small = 0;
    for n in 1..=max_terms {
        if n + d > order {
            order *= 2;
            phi = PowerSeries::new(mech.coefficients(order));
            pw = phi.pow((n - 1) as u32);
        }
        pw = pw.mul(&phi);
        un *= u;
        let t = un * pw.coeff(n + d);
        sum += t;
        if t < 1e-16 * sum.max(1.0) {
            small += 1;
            if small > 20 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence(max_terms))
}

/// The printed resolvent `delta_ij + (u^{1-j}/i) d/du Phi(u)^i`.
pub fn resolvent_stated(mech: &Mechanism, u: f64, i: u64, j: u64) -> Result<f64> {
    let x = progeny_pgf(mech, u, Method::FixedPoint)?;
    let dphi = mech.pgf(x) / (1.0 - u * mech.d1(x));
    let delta = if i == j { 1.0 } else { 0.0 };
    Ok(delta + u.powi(1 - j as i32) * x.powi(i as i32 - 1) * dphi)
}

/// `E(u^{theta_{i,i}}) = 1 - 1/g_{i,i}(u)`.
pub fn first_return_pgf(mech: &Mechanism, u: f64) -> Result<f64> {
    Ok(1.0 - 1.0 / resolvent(mech, u, 0, 0, 100_000)?)
}
