//! BGW trees simulated generation by generation.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma, Poisson};
use serde::Serialize;

use crate::mechanism::Mechanism;

/// Node budget per tree before it is flagged as exploded.
pub const NODE_BUDGET: u64 = 10_000_000;

/// Draws the offspring of a whole generation at once.
#[derive(Clone, Debug)]
pub enum OffspringSampler {
    /// zeros ~ Bin(n, pi0); productive ones get 1 + NB-geometric children
    Lf { pi0: f64, pi: f64 },
    Binary { q: f64, r: f64, p: f64 },
    /// inverse-CDF table for the remaining kinds
    Table { cdf: Vec<f64> },
}

impl OffspringSampler {
    pub fn new(mech: &Mechanism) -> Self {
        if let Some(p) = mech.as_lf() {
            return OffspringSampler::Lf { pi0: p.pi0, pi: p.pi };
        }
        if let Mechanism::Binary { q, r, p } = *mech {
            return OffspringSampler::Binary { q, r, p };
        }
        let mut order = 256;
        loop {
            let c = mech.coefficients(order);
            let mut cdf = Vec::with_capacity(c.len());
            let mut s = 0.0;
            for x in c {
                s += x;
                cdf.push(s);
            }
            if 1.0 - s < 1e-14 || order >= 1 << 17 {
                return OffspringSampler::Table { cdf };
            }
            order *= 2;
        }
    }

    /// `(sterile, children)` summed over `n` individuals.
    pub fn generation<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> (u64, u64) {
        if n == 0 {
            return (0, 0);
        }
        match *self {
            OffspringSampler::Lf { pi0, pi } => {
                let zeros = Binomial::new(n, pi0).unwrap().sample(rng);
                let k = n - zeros;
                if k == 0 {
                    return (zeros, 0);
                }
                let extra = if pi >= 1.0 {
                    0
                } else {
                    let lam = Gamma::new(k as f64, (1.0 - pi) / pi).unwrap().sample(rng);
                    if lam > 0.0 {
                        Poisson::new(lam).unwrap().sample(rng) as u64
                    } else {
                        0
                    }
                };
                (zeros, k + extra)
            }
            OffspringSampler::Binary { q, r, p } => {
                let zeros = Binomial::new(n, q).unwrap().sample(rng);
                let rest = n - zeros;
                let ones = if rest == 0 || r + p == 0.0 {
                    0
                } else {
                    Binomial::new(rest, (r / (r + p)).min(1.0)).unwrap().sample(rng)
                };
                (zeros, ones + 2 * (rest - ones))
            }
            OffspringSampler::Table { ref cdf } => {
                let (mut zeros, mut total) = (0, 0);
                for _ in 0..n {
                    let m = self.one(cdf, rng);
                    if m == 0 {
                        zeros += 1;
                    }
                    total += m;
                }
                (zeros, total)
            }
        }
    }

    fn one<R: Rng + ?Sized>(&self, cdf: &[f64], rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        cdf.partition_point(|&c| c < u) as u64
    }

    /// Offspring count of a single individual.
    pub fn single<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self {
            OffspringSampler::Table { cdf } => self.one(cdf, rng),
            _ => self.generation(1, rng).1,
        }
    }
}

/// Generation sizes of one tree.
#[derive(Clone, Debug, Default, Serialize)]
pub struct TreeSample {
    /// `N_0, N_1, ...`; ends with 0 when the tree died out within the horizon
    pub sizes: Vec<u64>,
    /// `N^0_n`: individuals of generation `n` with no offspring
    pub sterile: Vec<u64>,
    pub exploded: bool,
    pub seed: u64,
}

impl TreeSample {
    pub fn extinct(&self) -> bool {
        self.sizes.last() == Some(&0)
    }

    /// Extinction time `tau` (first empty generation), if reached.
    pub fn height(&self) -> Option<usize> {
        if self.extinct() {
            Some(self.sizes.len() - 1)
        } else {
            None
        }
    }

    pub fn width(&self) -> u64 {
        self.sizes.iter().copied().max().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.sizes.iter().sum()
    }

    pub fn leaves(&self) -> u64 {
        self.sterile.iter().sum()
    }

    pub fn size_at(&self, n: usize) -> u64 {
        self.sizes.get(n).copied().unwrap_or(0)
    }

    /// `N_bar_n = sum_{m <= n} N_m`.
    pub fn cumulated(&self) -> Vec<u64> {
        self.sizes
            .iter()
            .scan(0, |s, &x| {
                *s += x;
                Some(*s)
            })
            .collect()
    }

    pub fn prolific(&self) -> Vec<u64> {
        self.sizes.iter().zip(&self.sterile).map(|(n, s)| n - s).collect()
    }
}

/// Simulates up to generation `horizon` (inclusive) or extinction.
pub fn simulate_tree<R: Rng + ?Sized>(
    sampler: &OffspringSampler,
    founders: u64,
    horizon: usize,
    rng: &mut R,
) -> TreeSample {
    let mut t = TreeSample { sizes: vec![founders], ..Default::default() };
    let mut total = founders;
    let mut n = founders;
    for _ in 0..horizon {
        if n == 0 {
            break;
        }
        let (zeros, children) = sampler.generation(n, rng);
        t.sterile.push(zeros);
        t.sizes.push(children);
        total += children;
        n = children;
        if total > NODE_BUDGET {
            t.exploded = true;
            break;
        }
    }
    if t.sterile.len() < t.sizes.len() && n == 0 {
        t.sterile.push(0);
    }
    t
}

/// Leaf count of a tree conditioned on having exactly `k` nodes.
///
/// The offspring vector of a size-`k` tree is a cyclic rotation of an
/// exchangeable vector summing to `k - 1`, and the leaf count is rotation
/// invariant. For Geo0 the vector is a uniform weak composition, for
/// Poisson a uniform multinomial allocation; other laws use rejection.
pub fn conditioned_leaf_count<R: Rng + ?Sized>(
    mech: &Mechanism,
    sampler: &OffspringSampler,
    k: u64,
    rng: &mut R,
) -> u64 {
    match *mech {
        Mechanism::Geo0 { .. } => {
            if k == 1 {
                return 1;
            }
            let slots = (2 * k - 2) as usize;
            let mut bars: Vec<usize> = sample(rng, slots, (k - 1) as usize).into_vec();
            bars.sort_unstable();
            let mut zeros = 0;
            let mut prev: isize = -1;
            for &b in &bars {
                if b as isize == prev + 1 {
                    zeros += 1;
                }
                prev = b as isize;
            }
            if prev as usize == slots - 1 {
                zeros += 1;
            }
            zeros
        }
        Mechanism::Poisson { .. } => {
            let mut boxes = vec![0u32; k as usize];
            for _ in 0..k - 1 {
                boxes[rng.random_range(0..k as usize)] += 1;
            }
            boxes.iter().filter(|&&b| b == 0).count() as u64
        }
        _ => loop {
            let mut alive = 1u64;
            let (mut total, mut leaves) = (1u64, 0u64);
            while alive > 0 && total <= k {
                let (z, c) = sampler.generation(alive, rng);
                leaves += z;
                total += c;
                alive = c;
            }
            if alive == 0 && total == k {
                return leaves;
            }
        },
    }
}
