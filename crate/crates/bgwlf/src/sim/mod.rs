//! Independent oracles: Monte-Carlo simulation of trees, walks and
//! excursions, exhaustive enumeration of small trees, truncated matrices.

pub mod enumerate;
pub mod matrix;
pub mod stats;
pub mod trees;
pub mod walk;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use stats::EmpiricalLaw;

use serde::Serialize;

use crate::mechanism::Mechanism;
use trees::{simulate_tree, OffspringSampler, TreeSample};
use walk::{lamperti_generations, simulate_walk};

/// Replicas handled by one RNG stream.
pub const CHUNK: usize = 4096;

/// Default seed when neither a flag nor `BGWLF_SEED` is given.
pub const DEFAULT_SEED: u64 = 20_240_501;

pub fn default_seed() -> u64 {
    std::env::var("BGWLF_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// ChaCha8 keyed by `seed`, positioned on stream `stream`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Runs `f` once per replica, in parallel, returning results in replica
/// order. Replica `k` draws from stream `k / CHUNK`, so the output only
/// depends on `(seed, replicas)`, never on the worker count.
pub fn par_map<T, F>(seed: u64, replicas: usize, workers: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync + Send,
{
    let chunks = replicas.div_ceil(CHUNK);
    let run = || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = stream_rng(seed, c as u64);
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(replicas);
                (lo..hi).map(|k| f(&mut rng, k)).collect::<Vec<T>>()
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    };
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    }
}

/// `replicas` independent trees from `founders` ancestors, up to `horizon`
/// generations.
pub fn simulate_trees(
    mech: &Mechanism,
    founders: u64,
    horizon: usize,
    replicas: usize,
    seed: u64,
    workers: Option<usize>,
) -> Vec<TreeSample> {
    let s = OffspringSampler::new(mech);
    par_map(seed, replicas, workers, |rng, _| {
        let mut t = simulate_tree(&s, founders, horizon, rng);
        t.seed = seed;
        t
    })
}

/// Empirical laws of the skip-free walk started at `i`.
#[derive(Clone, Debug, Serialize)]
pub struct SkipFreeBundle {
    /// first passage times of the walks that reached 0
    pub theta: EmpiricalLaw,
    pub unfinished: u64,
    /// running maximum up to `theta`, finished walks only
    pub max: EmpiricalLaw,
    /// `sum_n u^n 1{S_n = target}` before absorption: mean and standard error
    pub visits: (f64, f64),
}

pub fn simulate_skipfree(
    mech: &Mechanism,
    i: i64,
    horizon: u64,
    replicas: usize,
    seed: u64,
    discount: f64,
    target: i64,
) -> SkipFreeBundle {
    let s = OffspringSampler::new(mech);
    let runs = par_map(seed, replicas, None, |rng, _| simulate_walk(&s, i, horizon, discount, target, rng));
    let mut theta = EmpiricalLaw::new();
    let mut max = EmpiricalLaw::new();
    for w in runs.iter() {
        if let Some(t) = w.theta {
            theta.push(t as i64);
            max.push(w.max);
        }
    }
    let v: Vec<f64> = runs.iter().map(|w| w.discounted_visits).collect();
    SkipFreeBundle { unfinished: (replicas as u64) - theta.n, theta, max, visits: stats::mean_se(&v) }
}

#[derive(Clone, Debug, Serialize)]
pub struct LampertiReport {
    pub ks: f64,
    pub critical: f64,
    /// `sum_k |P_tree(k) - P_walk(k)| / 2`
    pub total_variation: f64,
    pub pass: bool,
}

/// Law of `N_n(i)` from trees against the walk read at the Lamperti times.
pub fn lamperti_check(mech: &Mechanism, i: u64, n: usize, samples: usize, seed: u64) -> LampertiReport {
    let s = OffspringSampler::new(mech);
    let trees = par_map(seed, samples, None, |rng, _| simulate_tree(&s, i, n, rng).size_at(n) as i64);
    let walks = par_map(seed ^ 0x6a09_e667_f3bc_c909, samples, None, |rng, _| {
        lamperti_generations(&s, i, n, rng).get(n).copied().unwrap_or(0) as i64
    });
    let a = EmpiricalLaw::from_values(trees);
    let b = EmpiricalLaw::from_values(walks);
    let (ks, critical) = a.ks_two_sample(&b);
    let keys: std::collections::BTreeSet<i64> = a.counts.keys().chain(b.counts.keys()).copied().collect();
    let total_variation = 0.5 * keys.iter().map(|&k| (a.prob(k) - b.prob(k)).abs()).sum::<f64>();
    LampertiReport { ks, critical, total_variation, pass: ks <= critical }
}
