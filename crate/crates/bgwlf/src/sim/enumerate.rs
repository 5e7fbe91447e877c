//! Exact joint law of (progeny, leaves, height, width) over all trees with
//! at most `max_nodes` nodes, by dynamic programming over generations.

use std::collections::{BTreeMap, HashMap};

use crate::mechanism::Mechanism;

pub const MAX_NODES: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeStats {
    pub progeny: u32,
    pub leaves: u32,
    /// extinction time: index of the first empty generation
    pub height: u32,
    /// largest generation size
    pub width: u32,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub law: BTreeMap<TreeStats, f64>,
    /// probability of trees with more than `max_nodes` nodes
    pub truncated: f64,
    pub max_nodes: usize,
}

impl Enumeration {
    pub fn progeny_pmf(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.max_nodes + 1];
        for (s, &p) in &self.law {
            v[s.progeny as usize] += p;
        }
        v
    }

    /// `P(N = k, leaves = l)` for `l = 0..=k`.
    pub fn leaves_at(&self, k: u32) -> Vec<f64> {
        let mut v = vec![0.0; k as usize + 1];
        for (s, &p) in self.law.iter().filter(|(s, _)| s.progeny == k) {
            v[s.leaves as usize] += p;
        }
        v
    }

    pub fn marginal<F: Fn(&TreeStats) -> u32>(&self, f: F) -> BTreeMap<u32, f64> {
        let mut m = BTreeMap::new();
        for (s, &p) in &self.law {
            *m.entry(f(s)).or_insert(0.0) += p;
        }
        m
    }
}

/// Law of (children, sterile count) for `c` individuals, children <= cap.
fn generation_law(coeffs: &[f64], c: usize, cap: usize) -> HashMap<(usize, usize), f64> {
    let mut cur: HashMap<(usize, usize), f64> = HashMap::from([((0, 0), 1.0)]);
    for _ in 0..c {
        let mut next = HashMap::new();
        for (&(m, z), &p) in &cur {
            for (j, &q) in coeffs.iter().enumerate() {
                if m + j > cap || q == 0.0 {
                    continue;
                }
                let key = (m + j, z + usize::from(j == 0));
                *next.entry(key).or_insert(0.0) += p * q;
            }
        }
        cur = next;
    }
    cur
}

pub fn enumerate_trees(mech: &Mechanism, max_nodes: usize) -> Enumeration {
    assert!(max_nodes <= MAX_NODES, "enumeration is limited to {MAX_NODES} nodes");
    let coeffs = mech.coefficients(max_nodes);
    let mut gen_cache: HashMap<usize, HashMap<(usize, usize), f64>> = HashMap::new();
    // (current size, total, leaves, generations so far, width)
    let mut states: HashMap<(usize, usize, usize, usize, usize), f64> = HashMap::from([((1, 1, 0, 0, 1), 1.0)]);
    let mut law = BTreeMap::new();
    let mut kept = 0.0;
    while !states.is_empty() {
        let mut next = HashMap::new();
        for (&(c, t, l, h, w), &p) in &states {
            let g = gen_cache
                .entry(c)
                .or_insert_with(|| generation_law(&coeffs, c, max_nodes));
            for (&(m, z), &q) in g.iter() {
                if t + m > max_nodes {
                    continue;
                }
                let pr = p * q;
                if m == 0 {
                    let s = TreeStats {
                        progeny: t as u32,
                        leaves: (l + z) as u32,
                        height: (h + 1) as u32,
                        width: w as u32,
                    };
                    *law.entry(s).or_insert(0.0) += pr;
                    kept += pr;
                } else {
                    *next.entry((m, t + m, l + z, h + 1, w.max(m))).or_insert(0.0) += pr;
                }
            }
        }
        states = next;
    }
    let truncated = 1.0 - kept;
    Enumeration { law, truncated, max_nodes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let e = enumerate_trees(&Mechanism::Geo0 { pi0: 0.5 }, 6);
        assert!((e.progeny_pmf()[3] - 1.0 / 16.0).abs() < 1e-15);
        let b = enumerate_trees(&Mechanism::binary(0.25, 0.5, 0.25).unwrap(), 6);
        assert!((b.progeny_pmf()[1] - 0.25).abs() < 1e-15);
        let single = b.law.iter().find(|(s, _)| s.progeny == 1).unwrap().0;
        assert_eq!(*single, TreeStats { progeny: 1, leaves: 1, height: 1, width: 1 });
    }

    #[test]
    fn leaves_against_cyclic_lemma() {
        let m = Mechanism::lf(0.3, 0.4).unwrap();
        let e = enumerate_trees(&m, 10);
        for k in 1..=10u32 {
            let a = e.leaves_at(k);
            let b = crate::progeny::leaves_pmf(&m, k as u64);
            for l in 0..=k as usize {
                let x = a.get(l).copied().unwrap_or(0.0);
                assert!((x - b[l]).abs() < 1e-12, "k={k} l={l}: {x} vs {}", b[l]);
            }
        }
    }
}
