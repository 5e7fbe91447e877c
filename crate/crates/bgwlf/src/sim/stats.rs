//! Empirical laws on the integers: probabilities, standard errors,
//! Kolmogorov-Smirnov distances and a chi-square uniformity test.

use std::collections::BTreeMap;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Asymptotic Kolmogorov quantile at level 0.01.
pub const KS_C_01: f64 = 1.627_624;

#[derive(Clone, Debug, Default, Serialize)]
pub struct EmpiricalLaw {
    pub counts: BTreeMap<i64, u64>,
    pub n: u64,
}

impl EmpiricalLaw {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_values<I: IntoIterator<Item = i64>>(it: I) -> Self {
        let mut e = Self::new();
        for v in it {
            e.push(v);
        }
        e
    }

    pub fn push(&mut self, v: i64) {
        *self.counts.entry(v).or_insert(0) += 1;
        self.n += 1;
    }

    pub fn prob(&self, v: i64) -> f64 {
        self.counts.get(&v).copied().unwrap_or(0) as f64 / self.n as f64
    }

    pub fn cdf(&self, v: i64) -> f64 {
        self.counts.range(..=v).map(|(_, &c)| c).sum::<u64>() as f64 / self.n as f64
    }

    /// Standard error of the frequency estimate of `p`.
    pub fn se(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.n as f64).sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.counts.iter().map(|(&v, &c)| v as f64 * c as f64).sum::<f64>() / self.n as f64
    }

    pub fn max_value(&self) -> Option<i64> {
        self.counts.keys().next_back().copied()
    }

    /// `sup_v |F_n(v) - F(v)|` over the integers, for a nondecreasing `F`.
    /// Checked at `lo..=upto` and at each support point and its predecessor,
    /// where the supremum over a gap is attained.
    pub fn ks<F: Fn(i64) -> f64>(&self, reference: F, upto: i64) -> f64 {
        let lo = self.counts.keys().next().copied().unwrap_or(0).min(0);
        let mut points: std::collections::BTreeSet<i64> = (lo..=upto).collect();
        for &k in self.counts.keys() {
            points.insert(k);
            points.insert(k - 1);
        }
        let mut acc = 0u64;
        let mut d: f64 = 0.0;
        let mut it = self.counts.iter().peekable();
        for v in points {
            while let Some((&k, &c)) = it.peek() {
                if k <= v {
                    acc += c;
                    it.next();
                } else {
                    break;
                }
            }
            let f = acc as f64 / self.n as f64;
            d = d.max((f - reference(v)).abs());
        }
        d
    }

    /// `sup_{v <= upto} |F_n(v) - F(v)|`, for a reference known only up to `upto`.
    pub fn ks_truncated<F: Fn(i64) -> f64>(&self, reference: F, upto: i64) -> f64 {
        let lo = self.counts.keys().next().copied().unwrap_or(0).min(0);
        let mut acc = 0u64;
        let mut d: f64 = 0.0;
        let mut it = self.counts.iter().peekable();
        for v in lo..=upto {
            while let Some((&k, &c)) = it.peek() {
                if k <= v {
                    acc += c;
                    it.next();
                } else {
                    break;
                }
            }
            d = d.max((acc as f64 / self.n as f64 - reference(v)).abs());
        }
        d
    }

    pub fn ks_critical(&self) -> f64 {
        KS_C_01 / (self.n as f64).sqrt()
    }

    /// Two-sample statistic and its 0.01 critical value.
    pub fn ks_two_sample(&self, other: &EmpiricalLaw) -> (f64, f64) {
        let keys: std::collections::BTreeSet<i64> =
            self.counts.keys().chain(other.counts.keys()).copied().collect();
        let mut d: f64 = 0.0;
        let (mut a, mut b) = (0u64, 0u64);
        for v in keys {
            a += self.counts.get(&v).copied().unwrap_or(0);
            b += other.counts.get(&v).copied().unwrap_or(0);
            d = d.max((a as f64 / self.n as f64 - b as f64 / other.n as f64).abs());
        }
        let (n, m) = (self.n as f64, other.n as f64);
        (d, KS_C_01 * ((n + m) / (n * m)).sqrt())
    }
}

/// Pearson chi-square test of `observed` against expected probabilities;
/// returns `(statistic, p_value)`, pooling cells with expectation < 5.
pub fn chi_square(observed: &[u64], expected_p: &[f64]) -> (f64, f64) {
    let n: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    let (mut po, mut pe) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(expected_p) {
        po += o as f64;
        pe += p * n as f64;
        if pe >= 5.0 {
            stat += (po - pe).powi(2) / pe;
            cells += 1;
            po = 0.0;
            pe = 0.0;
        }
    }
    if pe > 0.0 {
        stat += (po - pe).powi(2) / pe;
        cells += 1;
    }
    let df = (cells.max(2) - 1) as f64;
    let pv = 1.0 - ChiSquared::new(df).unwrap().cdf(stat);
    (stat, pv)
}

/// Mean and standard error of a sample.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, (v / n).sqrt())
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_law() {
        let e = EmpiricalLaw::from_values([0, 1, 1, 2]);
        assert_eq!(e.prob(1), 0.5);
        assert_eq!(e.cdf(1), 0.75);
        assert_eq!(e.mean(), 1.0);
        let d = e.ks(|v| if v < 0 { 0.0 } else { ((v + 1) as f64 / 3.0).min(1.0) }, 3);
        assert!((d - (0.75 - 2.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn chi_square_uniform() {
        let (_, p) = chi_square(&[100, 100, 100, 100], &[0.25; 4]);
        assert!(p > 0.99);
        let (_, p) = chi_square(&[200, 50, 100, 50], &[0.25; 4]);
        assert!(p < 1e-6);
    }

    #[test]
    fn slope() {
        let pts: Vec<(f64, f64)> = (1..10).map(|t| (t as f64, (t as f64).powf(-0.5))).collect();
        assert!((loglog_slope(&pts) + 0.5).abs() < 1e-12);
    }
}
