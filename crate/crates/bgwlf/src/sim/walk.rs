//! The skip-free-to-the-left walk `S_{n+1} = S_n + M - 1`, simulated one
//! increment at a time.

use rand::Rng;
use serde::Serialize;

use super::trees::OffspringSampler;

#[derive(Clone, Debug, Serialize)]
pub struct WalkSample {
    /// first passage time to 0, if reached within the horizon
    pub theta: Option<u64>,
    /// running maximum up to `theta` (or the horizon)
    pub max: i64,
    /// last time the maximum is attained
    pub last_argmax: u64,
    /// `sum_n u^n 1{S_n = target}` for the requested discount
    pub discounted_visits: f64,
}

/// Walk from `i` until it hits 0 or `horizon` steps elapse.
pub fn simulate_walk<R: Rng + ?Sized>(
    sampler: &OffspringSampler,
    i: i64,
    horizon: u64,
    u: f64,
    target: i64,
    rng: &mut R,
) -> WalkSample {
    let mut s = i;
    let (mut max, mut arg) = (i, 0);
    let mut un = 1.0;
    let mut visits = if s == target { 1.0 } else { 0.0 };
    for n in 1..=horizon {
        s += sampler.single(rng) as i64 - 1;
        un *= u;
        if s == target {
            visits += un;
        }
        if s >= max {
            max = s;
            arg = n;
        }
        if s == 0 {
            return WalkSample { theta: Some(n), max, last_argmax: arg, discounted_visits: visits };
        }
    }
    WalkSample { theta: None, max, last_argmax: arg, discounted_visits: visits }
}

/// Free walk (no absorption), returning `sum_{n <= horizon} u^n 1{S_n = target}`.
pub fn free_walk_visits<R: Rng + ?Sized>(
    sampler: &OffspringSampler,
    i: i64,
    target: i64,
    u: f64,
    horizon: u64,
    rng: &mut R,
) -> f64 {
    let mut s = i;
    let mut un = 1.0;
    let mut v = if s == target { 1.0 } else { 0.0 };
    for _ in 0..horizon {
        s += sampler.single(rng) as i64 - 1;
        un *= u;
        if s == target {
            v += un;
        }
    }
    v
}

/// Generation sizes read off a walk through the Lamperti time change:
/// `N_0 = i`, `T_{m+1} = T_m + N_m`, `N_{m+1} = S_{T_{m+1}}` (stopped at 0).
pub fn lamperti_generations<R: Rng + ?Sized>(
    sampler: &OffspringSampler,
    i: u64,
    generations: usize,
    rng: &mut R,
) -> Vec<u64> {
    let mut s = i as i64;
    let mut out = vec![i];
    let mut n = i;
    for _ in 0..generations {
        for _ in 0..n {
            if s == 0 {
                break;
            }
            s += sampler.single(rng) as i64 - 1;
        }
        n = s.max(0) as u64;
        out.push(n);
        if n == 0 {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism::Mechanism;
    use crate::sim::stream_rng;

    #[test]
    fn immediate_fall() {
        let s = OffspringSampler::Binary { q: 1.0, r: 0.0, p: 0.0 };
        let mut r = stream_rng(1, 0);
        let w = simulate_walk(&s, 1, 10, 1.0, 0, &mut r);
        assert_eq!(w.theta, Some(1));
        assert_eq!(w.max, 1);
        let g = lamperti_generations(&s, 3, 5, &mut r);
        assert_eq!(g, vec![3, 0]);
    }

    #[test]
    fn lamperti_mean() {
        let m = Mechanism::lf(0.6, 0.5).unwrap();
        let s = OffspringSampler::new(&m);
        let mut r = stream_rng(2, 0);
        let n = 100_000;
        let tot: u64 = (0..n).map(|_| *lamperti_generations(&s, 2, 2, &mut r).get(2).unwrap_or(&0)).sum();
        let mean = tot as f64 / n as f64;
        assert!((mean - 2.0 * m.mean().powi(2)).abs() < 0.02, "{mean}");
    }
}
