//! The BGW tree nested inside a `{p, q, r}` nearest-neighbour random walk
//! excursion: path extraction, claimed and exact laws, Monte-Carlo verdicts
//! and the contour reconstruction for `r = 0`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::error::{Error, Result};
use crate::mechanism::Mechanism;
use crate::progeny::{geo0_pmf, progeny_pgf, Method};
use crate::sim::stats::EmpiricalLaw;
use crate::sim::trees::OffspringSampler;
use crate::sim::{par_map, stream_rng};
use crate::verdict::{Check, Status};

/// Default excursion horizon for the Monte-Carlo report.
pub const DEFAULT_HORIZON: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SrwParams {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl SrwParams {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        let ok = [p, q, r].iter().all(|x| x.is_finite() && (0.0..=1.0).contains(x));
        if !ok || (p + q + r - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!("need p, q, r >= 0 summing to 1, got {p}, {q}, {r}")));
        }
        if q <= 0.0 {
            return Err(Error::InvalidParams("q must be positive".into()));
        }
        Ok(SrwParams { p, q, r })
    }

    /// Two of the three probabilities; the third is `1 - p - q`.
    pub fn from_pq(p: f64, q: f64) -> Result<Self> {
        Self::new(p, q, (1.0 - p - q).max(0.0))
    }

    pub fn p0(&self) -> f64 {
        self.p / (1.0 - self.r)
    }

    pub fn q0(&self) -> f64 {
        self.q / (1.0 - self.r)
    }

    pub fn has_holds(&self) -> bool {
        self.r > 0.0
    }

    /// `1 ∧ q/p`.
    pub fn return_probability(&self) -> f64 {
        if self.p <= self.q {
            1.0
        } else {
            self.q / self.p
        }
    }
}

/// Heights `Sigma_{-1} = 0, Sigma_0 = 1, ...`, stopped at the first return
/// to 0 or at the horizon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExcursionPath {
    pub heights: Vec<i64>,
    pub finished: bool,
}

impl ExcursionPath {
    pub fn from_heights(heights: Vec<i64>) -> Result<Self> {
        if heights.len() < 2 || heights[0] != 0 || heights[1] != 1 {
            return Err(Error::InvalidParams("a path starts with 0, 1".into()));
        }
        for w in heights.windows(2) {
            if (w[1] - w[0]).abs() > 1 {
                return Err(Error::InvalidParams(format!("step {} -> {} is not nearest-neighbour", w[0], w[1])));
            }
        }
        let last = heights.len() - 1;
        if heights[1..last].iter().any(|&h| h < 1) {
            return Err(Error::InvalidParams("path visits 0 before its last point".into()));
        }
        let finished = heights[last] == 0;
        Ok(ExcursionPath { heights, finished })
    }

    /// Single-digit heights, with optional parentheses marking plateaus,
    /// e.g. `01(222)(33)210`.
    pub fn parse_compact(s: &str) -> Result<Self> {
        let hs = s
            .chars()
            .filter(|c| !matches!(c, '(' | ')' | ' '))
            .map(|c| c.to_digit(10).map(i64::from).ok_or_else(|| Error::InvalidParams(format!("bad height {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_heights(hs)
    }

    /// One integer height per line; blank lines and `#` comments ignored.
    pub fn parse_lines(s: &str) -> Result<Self> {
        let hs = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.parse::<i64>().map_err(|e| Error::InvalidParams(format!("line {l:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_heights(hs)
    }

    /// Number of steps from time 0 to the last recorded point.
    pub fn steps(&self) -> u64 {
        self.heights.len() as u64 - 2
    }

    /// First passage time to 0, if reached.
    pub fn theta(&self) -> Option<u64> {
        self.finished.then(|| self.steps())
    }

    /// The path with holding steps removed.
    pub fn skeleton(&self) -> Vec<i64> {
        let mut s = self.heights.clone();
        s.dedup();
        s
    }
}

pub fn simulate_excursion<R: Rng + ?Sized>(params: &SrwParams, horizon: u64, rng: &mut R) -> ExcursionPath {
    let mut heights = vec![0, 1];
    let mut h = 1i64;
    let up = params.p;
    let down = params.p + params.q;
    for _ in 0..horizon {
        let u: f64 = rng.random();
        if u < up {
            h += 1;
        } else if u < down {
            h -= 1;
        }
        heights.push(h);
        if h == 0 {
            return ExcursionPath { heights, finished: true };
        }
    }
    ExcursionPath { heights, finished: false }
}

pub fn simulate_excursion_seeded(params: &SrwParams, seed: u64, horizon: u64) -> ExcursionPath {
    simulate_excursion(params, horizon, &mut stream_rng(seed, 0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NestedCounts {
    /// `N_0 = 1, N_1, ..., N_tau`: rises `h -> h+1`, each weighted by
    /// `1 +` the holds right after the arrival at `h + 1`
    pub n: Vec<u64>,
    /// unweighted rise counts of the skeleton
    pub rises: Vec<u64>,
    /// highest peak `H`
    pub h: u64,
    /// lowest valley, or `H` when the profile has none
    pub l: u64,
    pub theta: u64,
    pub nbar: u64,
    pub nstar: u64,
    /// last non-empty generation, `H - 1`
    pub tau: u64,
    /// area and restricted area of the skeleton
    pub area: i64,
    pub restricted_area: i64,
    /// the same two areas on the raw path, holds included
    pub raw_area: i64,
    pub raw_restricted_area: i64,
}

impl NestedCounts {
    /// `sum_h h * rises_h`.
    pub fn weighted_rises(&self) -> i64 {
        self.rises.iter().enumerate().map(|(h, &c)| h as i64 * c as i64).sum()
    }

    /// `B = 2 sum_h h N_h` on the skeleton.
    pub fn area_identity_holds(&self) -> bool {
        self.restricted_area == 2 * self.weighted_rises()
    }

    /// `theta = 2 Nbar - 1`.
    pub fn parity_identity_holds(&self) -> bool {
        self.theta + 1 == 2 * self.nbar
    }
}

fn areas(h: &[i64]) -> (i64, i64) {
    let a: i64 = h[1..].iter().sum();
    let downs: i64 = h[1..].windows(2).map(|w| (w[0] - w[1]).max(0)).sum();
    (a, a - downs)
}

pub fn extract_nested(path: &ExcursionPath) -> Result<NestedCounts> {
    if !path.finished {
        return Err(Error::UnfinishedPath);
    }
    let hs = &path.heights;
    let top = *hs.iter().max().unwrap() as usize;
    let mut n = vec![0u64; top];
    for i in 0..hs.len() - 1 {
        if hs[i + 1] == hs[i] + 1 {
            let mut j = i + 1;
            while j + 1 < hs.len() && hs[j + 1] == hs[j] {
                j += 1;
            }
            n[hs[i] as usize] += 1 + (j - i - 1) as u64;
        }
    }
    n[0] = 1;
    let sk = path.skeleton();
    let mut rises = vec![0u64; top];
    for w in sk.windows(2) {
        if w[1] > w[0] {
            rises[w[0] as usize] += 1;
        }
    }
    let l = sk
        .windows(3)
        .filter(|w| w[0] > w[1] && w[1] < w[2])
        .map(|w| w[1] as u64)
        .min()
        .unwrap_or(top as u64);
    let (area, restricted_area) = areas(&sk);
    let (raw_area, raw_restricted_area) = areas(hs);
    Ok(NestedCounts {
        nbar: n.iter().sum(),
        nstar: n.iter().copied().max().unwrap_or(0),
        n,
        rises,
        h: top as u64,
        l,
        theta: path.steps(),
        tau: top as u64 - 1,
        area,
        restricted_area,
        raw_area,
        raw_restricted_area,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HarrisMechanism {
    pub mechanism: Mechanism,
    /// true for `r = 0`, where the nesting is a theorem
    pub exact: bool,
}

/// `Geo0(q0)` for `r = 0`, otherwise the claimed `(q + r z)/(1 - p z)`.
pub fn harris_mechanism(params: &SrwParams) -> HarrisMechanism {
    if params.has_holds() {
        HarrisMechanism { mechanism: Mechanism::Lf { pi0: params.q, pi: 1.0 - params.p }, exact: false }
    } else {
        HarrisMechanism { mechanism: Mechanism::Geo0 { pi0: params.q }, exact: true }
    }
}

/// `E z^theta = (1 - r z - sqrt((1 - r z)^2 - 4 p q z^2)) / (2 p z)`,
/// evaluated as `2 q z / (1 - r z + sqrt(..))`.
pub fn theta_pgf(params: &SrwParams, z: f64) -> f64 {
    let SrwParams { p, q, r } = *params;
    let a = 1.0 - r * z;
    let d = (a * a - 4.0 * p * q * z * z).max(0.0);
    2.0 * q * z / (a + d.sqrt())
}

/// `P(theta = n)` for `r = 0`: `(p0 q0)^k / p0 * C(2k-2, k-1) / k` at `n = 2k - 1`.
pub fn theta_pmf_r0(params: &SrwParams, n: u64) -> f64 {
    if n % 2 == 0 {
        return 0.0;
    }
    let k = n.div_ceil(2);
    if params.p == 0.0 {
        return if k == 1 { 1.0 } else { 0.0 };
    }
    geo0_pmf(params.q0(), k)
}

/// `P(theta <= t)` for any `r`: each skeleton step lasts a `Geo1(1 - r)`
/// number of steps, so `P(theta <= t) = sum_k P(theta_0 = 2k-1) P(Bin(t, 1-r) >= 2k-1)`.
pub fn theta_cdf(params: &SrwParams, t: u64) -> f64 {
    let skel = SrwParams { p: params.p0(), q: params.q0(), r: 0.0 };
    let bin = (params.r > 0.0).then(|| Binomial::new(1.0 - params.r, t).unwrap());
    let mut s = 0.0;
    for k in 1..=t.div_ceil(2) {
        let m = 2 * k - 1;
        let w = match &bin {
            Some(b) => 1.0 - b.cdf(m - 1),
            None => 1.0,
        };
        s += theta_pmf_r0(&skel, m) * w;
    }
    s
}

/// `Phi_SRW(z^2) - z h(z)`, the progeny transform of the claimed nested tree.
pub fn progeny_theta_residual(params: &SrwParams, z: f64) -> Result<f64> {
    let mech = harris_mechanism(params).mechanism;
    let phi = progeny_pgf(&mech, z * z, Method::LfClosedForm)?;
    Ok(phi - z * theta_pgf(params, z))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HeightLaw {
    /// closed form attached to the nested tree, `P(H > h)`
    pub claimed: f64,
    /// gambler's ruin value for the walk itself
    pub exact: f64,
    pub claim_is_exact: bool,
}

/// `P(H > h)`: the stated closed form next to the ruin probability
/// `P(reach h + 1 before 0 from 1)`.
pub fn height_law(params: &SrwParams, h: u64) -> HeightLaw {
    let SrwParams { p, q, .. } = *params;
    let hf = h as f64;
    let claimed = if (p - q).abs() < 1e-15 {
        (1.0 - p) / (1.0 + p * (hf - 1.0))
    } else {
        (p - q) / (p - q * ((1.0 - p) / (1.0 - q)).powf(hf))
    };
    let exact = if p == 0.0 {
        if h == 0 {
            1.0
        } else {
            0.0
        }
    } else if (p - q).abs() < 1e-15 {
        1.0 / (hf + 1.0)
    } else {
        let rho = q / p;
        (1.0 - rho) / (1.0 - rho.powf(hf + 1.0))
    };
    HeightLaw { claimed, exact, claim_is_exact: !params.has_holds() }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DepthLaw {
    /// `(1 - pi1) pi1^(h-1)` with `pi1 = (1 - p)(1 - q)`
    pub claimed: f64,
    /// the same geometric law with `pi1 = p0 q0`
    pub exact: f64,
    pub claim_is_exact: bool,
}

/// `P(L = h)`. Holds do not change the profile's valleys, so the exact
/// single-child probability is that of the skeleton walk, `p0 q0`.
pub fn depth_law(params: &SrwParams, h: u64) -> DepthLaw {
    let geo = |pi1: f64| if h == 0 { 0.0 } else { (1.0 - pi1) * pi1.powi(h as i32 - 1) };
    DepthLaw {
        claimed: geo((1.0 - params.p) * (1.0 - params.q)),
        exact: geo(params.p0() * params.q0()),
        claim_is_exact: !params.has_holds(),
    }
}

/// A plane tree stored as its preorder offspring sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlaneTree {
    pub offspring: Vec<u64>,
}

impl PlaneTree {
    pub fn new(offspring: Vec<u64>) -> Result<Self> {
        let mut open = 1i64;
        for (i, &c) in offspring.iter().enumerate() {
            open += c as i64 - 1;
            if open == 0 && i + 1 != offspring.len() {
                return Err(Error::InvalidParams("preorder sequence closes early".into()));
            }
        }
        if open != 0 || offspring.is_empty() {
            return Err(Error::InvalidParams("preorder sequence does not close".into()));
        }
        Ok(PlaneTree { offspring })
    }

    pub fn len(&self) -> usize {
        self.offspring.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offspring.is_empty()
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack: Vec<u64> = Vec::new();
        for &c in &self.offspring {
            out.push(stack.len());
            if let Some(top) = stack.last_mut() {
                *top -= 1;
            }
            stack.push(c);
            while stack.last() == Some(&0) {
                stack.pop();
            }
        }
        out
    }

    pub fn level_counts(&self) -> Vec<u64> {
        let d = self.depths();
        let mut n = vec![0u64; d.iter().max().map_or(0, |m| m + 1)];
        for x in d {
            n[x] += 1;
        }
        n
    }

    /// The nested tree of an `r = 0` excursion: every rise is a node, its
    /// children are the rises of the sub-excursion it starts.
    pub fn from_excursion(path: &ExcursionPath) -> Result<Self> {
        if !path.finished {
            return Err(Error::UnfinishedPath);
        }
        let hs = &path.heights;
        if hs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::UnsupportedHoldings);
        }
        let mut offspring = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        for w in hs.windows(2) {
            if w[1] > w[0] {
                if let Some(&parent) = stack.last() {
                    offspring[parent] += 1;
                }
                stack.push(offspring.len());
                offspring.push(0);
            } else {
                stack.pop();
            }
        }
        PlaneTree::new(offspring)
    }
}

/// Contour walk of the tree: up along each edge into a node, down on leaving it.
pub fn reconstruct_excursion(tree: &PlaneTree, params: &SrwParams) -> Result<ExcursionPath> {
    if params.has_holds() {
        return Err(Error::UnsupportedHoldings);
    }
    let mut heights = vec![0i64];
    let mut h = 0i64;
    let mut stack: Vec<u64> = Vec::new();
    for &c in &tree.offspring {
        h += 1;
        heights.push(h);
        if let Some(top) = stack.last_mut() {
            *top -= 1;
        }
        stack.push(c);
        while stack.last() == Some(&0) {
            stack.pop();
            h -= 1;
            heights.push(h);
        }
    }
    ExcursionPath::from_heights(heights)
}

/// A plane tree grown depth first, or `None` past `max_nodes`.
pub fn simulate_plane_tree<R: Rng + ?Sized>(mech: &Mechanism, max_nodes: usize, rng: &mut R) -> Option<PlaneTree> {
    let s = OffspringSampler::new(mech);
    let mut offspring = Vec::new();
    let mut open = 1u64;
    while open > 0 {
        if offspring.len() >= max_nodes {
            return None;
        }
        let c = s.single(rng);
        offspring.push(c);
        open = open + c - 1;
    }
    Some(PlaneTree { offspring })
}

#[derive(Clone, Copy, Debug)]
struct Profile {
    theta: u32,
    nbar: u32,
    nstar: u32,
    h: u32,
    l: u32,
    gens: [u32; 3],
    area_ok: bool,
    parity_ok: bool,
}

/// What an excursion, finished or not, says about `H` and `L`: each lies in
/// `[lo, hi]`, with `hi = u32::MAX` when still open.
#[derive(Clone, Copy, Debug)]
struct Bounds {
    h: (u32, u32),
    l: (u32, u32),
}

fn excursion_profile_of(path: &ExcursionPath) -> Option<Profile> {
    let c = extract_nested(path).ok()?;
    let g = |i: usize| c.n.get(i).copied().unwrap_or(0) as u32;
    Some(Profile {
        theta: c.theta as u32,
        nbar: c.nbar as u32,
        nstar: c.nstar as u32,
        h: c.h as u32,
        l: c.l as u32,
        gens: [g(1), g(2), g(3)],
        area_ok: c.area_identity_holds(),
        parity_ok: c.parity_identity_holds(),
    })
}

fn excursion_profile(params: &SrwParams, horizon: u64, rng: &mut ChaCha8Rng) -> (Option<Profile>, Bounds) {
    let path = simulate_excursion(params, horizon, rng);
    let Some(p) = excursion_profile_of(&path) else {
        let top = *path.heights.iter().max().unwrap() as u32;
        let valley = path
            .skeleton()
            .windows(3)
            .filter(|w| w[0] > w[1] && w[1] < w[2])
            .map(|w| w[1] as u32)
            .min()
            .unwrap_or(u32::MAX);
        return (None, Bounds { h: (top, u32::MAX), l: (1, valley) });
    };
    (Some(p), Bounds { h: (p.h, p.h), l: (p.l, p.l) })
}

/// KS distance from `cdf` to the band of empirical CDFs compatible with
/// interval-censored observations, with its 0.01 critical value.
fn band_ks(obs: &[(u32, u32)], cdf: impl Fn(u32) -> f64) -> (f64, f64) {
    let n = obs.len() as f64;
    let top = obs.iter().map(|&(lo, hi)| if hi == u32::MAX { lo } else { hi }).max().unwrap_or(1) as usize + 1;
    let (mut sure, mut maybe) = (vec![0u64; top + 1], vec![0u64; top + 1]);
    for &(lo, hi) in obs {
        maybe[(lo as usize).min(top)] += 1;
        if hi != u32::MAX {
            sure[(hi as usize).min(top)] += 1;
        }
    }
    let (mut s, mut m, mut d) = (0u64, 0u64, 0.0f64);
    for v in 0..top {
        s += sure[v];
        m += maybe[v];
        let f = cdf(v as u32);
        d = d.max(f - m as f64 / n).max(s as f64 / n - f);
    }
    (d, crate::sim::stats::KS_C_01 / n.sqrt())
}

/// Generation sizes of the nested tree, censored once the total passes `cap`.
fn tree_profile(sampler: &OffspringSampler, cap: u64, rng: &mut ChaCha8Rng) -> Option<Profile> {
    let mut sizes = vec![1u64];
    let mut total = 1u64;
    let mut n = 1u64;
    while n > 0 {
        n = sampler.generation(n, rng).1;
        total += n;
        if total > cap {
            return None;
        }
        sizes.push(n);
    }
    let chain = sizes.iter().take_while(|&&x| x == 1).count();
    let g = |i: usize| sizes.get(i).copied().unwrap_or(0) as u32;
    Some(Profile {
        theta: (2 * total - 1) as u32,
        nbar: total as u32,
        nstar: *sizes.iter().max().unwrap() as u32,
        h: (sizes.len() - 1) as u32,
        l: chain as u32,
        gens: [g(1), g(2), g(3)],
        area_ok: true,
        parity_ok: true,
    })
}

/// Laws of one statistic on both sides, censored values mapped past the
/// largest observed one.
fn paired_laws(
    a: &[Option<Profile>],
    b: &[Option<Profile>],
    f: impl Fn(&Profile) -> u32,
) -> (EmpiricalLaw, EmpiricalLaw) {
    let top = a.iter().chain(b).flatten().map(&f).max().unwrap_or(0) as i64 + 1;
    let law = |xs: &[Option<Profile>]| EmpiricalLaw::from_values(xs.iter().map(|x| x.as_ref().map_or(top, |p| f(p) as i64)));
    (law(a), law(b))
}

#[derive(Clone, Debug, Serialize)]
pub struct SrwReport {
    pub params: SrwParams,
    pub samples: usize,
    pub horizon: u64,
    pub seed: u64,
    pub unfinished: u64,
    pub claimed_mechanism: HarrisMechanism,
    pub checks: Vec<Check>,
}

impl SrwReport {
    pub fn exit_code(&self) -> i32 {
        crate::verdict::exit_code(&self.checks)
    }

    pub fn check(&self, identity: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.identity == identity)
    }
}

pub fn verify_correspondences(params: &SrwParams, samples: usize, seed: u64) -> SrwReport {
    verify_with(params, samples, seed, DEFAULT_HORIZON, None)
}

/// Every claimed identity checked against excursions and against nested
/// trees simulated under the claimed mechanism. For `r = 0` failures are
/// errors; for `r > 0` they raise flags, except for the pathwise area
/// identity and the return probability, which hold for every `r`.
pub fn verify_with(
    params: &SrwParams,
    samples: usize,
    seed: u64,
    horizon: u64,
    workers: Option<usize>,
) -> SrwReport {
    let harris = harris_mechanism(params);
    let strict = harris.exact;
    let sampler = OffspringSampler::new(&harris.mechanism);
    let cap = horizon.div_ceil(2);
    let (exc, bounds): (Vec<_>, Vec<_>) =
        par_map(seed, samples, workers, |rng, _| excursion_profile(params, horizon, rng)).into_iter().unzip();
    let trees = par_map(seed ^ 0x9e37_79b9_7f4a_7c15, samples, workers, |rng, _| tree_profile(&sampler, cap, rng));
    let finished: Vec<Profile> = exc.iter().flatten().copied().collect();
    let nf = finished.len() as f64;
    let n = samples as f64;
    let mut checks = Vec::new();

    let bad = finished.iter().filter(|p| !p.parity_ok).count();
    let even = finished.iter().filter(|p| p.theta % 2 == 0).count();
    checks.push(
        Check::judged(
            "theta = 2 Nbar - 1 (pathwise)",
            bad == 0,
            strict,
            format!("{bad} of {} finished excursions violate it; {even} have even theta while 2 Nbar - 1 is odd", finished.len()),
        )
        .compare(bad as f64, 0.0),
    );

    let bad_area = finished.iter().filter(|p| !p.area_ok).count();
    checks.push(
        Check::judged(
            "B = 2 sum h N_h (pathwise)",
            bad_area == 0,
            true,
            format!("{bad_area} violations on the hold-free skeleton"),
        )
        .compare(bad_area as f64, 0.0),
    );

    let two_sample = |name: &str, f: &dyn Fn(&Profile) -> u32, what: &str| {
        let (a, b) = paired_laws(&exc, &trees, f);
        let (d, c) = a.ks_two_sample(&b);
        Check::judged(name, d <= c, strict, format!("two-sample KS, excursions vs {what} under the nested mechanism")).ks(d, c)
    };
    checks.push(two_sample("theta =d 2 Nbar - 1", &|p| p.theta, "2 * total progeny - 1"));
    checks.push(two_sample("H =d tau + 1", &|p| p.h, "extinction time"));
    checks.push(two_sample("width =d N*", &|p| p.nstar, "maximal generation size"));
    checks.push(two_sample("Nbar law", &|p| p.nbar, "total progeny"));
    for g in 0..3 {
        checks.push(two_sample(&format!("N_{} law", g + 1), &|p| p.gens[g], "generation size"));
    }

    let grid: Vec<f64> = (0..100).map(|k| k as f64 * 0.01).collect();
    let resid = grid
        .iter()
        .map(|&z| progeny_theta_residual(params, z).map(f64::abs).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    checks.push(
        Check::judged("Phi(z^2) = z h(z)", resid < 1e-12, strict, "max residual on z in [0, 0.99]").compare(resid, 0.0),
    );

    let h1 = theta_pgf(params, 1.0);
    let ret = params.return_probability();
    checks.push(Check::judged("h(1) = 1 ∧ q/p", (h1 - ret).abs() < 1e-12, true, "closed form").compare(h1, ret));

    let frac = nf / n;
    let exact_t = theta_cdf(params, horizon);
    let se = (exact_t * (1.0 - exact_t) / n).sqrt().max(1.0 / n);
    checks.push(
        Check::judged(
            "P(theta <= T)",
            (frac - exact_t).abs() <= 3.0 * se,
            true,
            format!("finished fraction at horizon T = {horizon} vs the exact holding-time mixture, 3 SE"),
        )
        .compare(frac, exact_t),
    );
    if (params.p - params.q).abs() > 1e-12 {
        let se = (ret * (1.0 - ret) / n).sqrt().max(1.0 / n);
        checks.push(
            Check::judged(
                "P(theta < inf) = 1 ∧ q/p",
                (frac - ret).abs() <= 3.0 * se,
                true,
                format!("finished fraction at horizon T = {horizon}, 3 SE"),
            )
            .compare(frac, ret),
        );
    } else {
        checks.push(
            Check::new(
                "P(theta < inf) = 1 ∧ q/p",
                Status::Note,
                format!("recurrent walk: the mass beyond T = {horizon} decays like T^(-1/2), so only P(theta <= T) is asserted"),
            )
            .compare(frac, ret),
        );
    }

    let h_le1 = exc.iter().flatten().filter(|p| p.h == 1).count() as f64 / n;
    let claimed = harris.mechanism.pgf(0.0);
    let direct = params.q / (params.p + params.q);
    let se = (claimed * (1.0 - claimed) / n).sqrt();
    checks.push(
        Check::judged(
            "P(H <= 1) = phi_SRW(0)",
            (h_le1 - claimed).abs() <= 3.0 * se,
            strict,
            format!("claimed {claimed:.6}, first-step value q/(p+q) = {direct:.6}"),
        )
        .compare(h_le1, claimed),
    );

    if params.q >= params.p {
        let hs: Vec<_> = bounds.iter().map(|b| b.h).collect();
        let (d, c) = band_ks(&hs, |h| 1.0 - height_law(params, h as u64).claimed);
        checks.push(
            Check::judged("height law closed form", d <= c, strict, "one-sample KS against P(H > h), open excursions as censored bands").ks(d, c),
        );
        let ls: Vec<_> = bounds.iter().map(|b| b.l).collect();
        let pi1 = (1.0 - params.p) * (1.0 - params.q);
        let (d, c) = band_ks(&ls, |h| if h < 1 { 0.0 } else { 1.0 - pi1.powi(h as i32) });
        checks.push(
            Check::judged("depth law L ~ Geo(pi1)", d <= c, strict, format!("one-sample KS, pi1 = {pi1:.6}, open excursions as censored bands")).ks(d, c),
        );
    } else {
        checks.push(Check::new("height law closed form", Status::Note, "transient walk: finished excursions are conditioned, closed forms not comparable"));
        checks.push(Check::new("depth law L ~ Geo(pi1)", Status::Note, "transient walk: finished excursions are conditioned, closed forms not comparable"));
    }

    SrwReport {
        params: *params,
        samples,
        horizon,
        seed,
        unfinished: (samples - finished.len()) as u64,
        claimed_mechanism: harris,
        checks,
    }
}

/// Empirical survival `P(X > t)` of `theta`, `Nbar` and `H` at the given
/// thresholds, from `samples` excursions run to `horizon`.
pub fn survival_curves(
    params: &SrwParams,
    samples: usize,
    seed: u64,
    horizon: u64,
    thresholds: &[u64],
) -> Vec<(u64, f64, f64, f64)> {
    // open excursions enter P(H > t) through P(H > t | max, current height)
    let exc: Vec<std::result::Result<Profile, (i64, i64)>> = par_map(seed, samples, None, |rng, _| {
        let path = simulate_excursion(params, horizon, rng);
        match excursion_profile_of(&path) {
            Some(p) => Ok(p),
            None => Err((*path.heights.iter().max().unwrap(), *path.heights.last().unwrap())),
        }
    });
    let n = samples as f64;
    thresholds
        .iter()
        .map(|&t| {
            let over = |f: &dyn Fn(&Profile) -> u64| exc.iter().filter(|x| x.as_ref().map_or(true, |p| f(p) > t)).count() as f64 / n;
            let h = exc
                .iter()
                .map(|x| match x {
                    Ok(p) => f64::from(p.h as u64 > t),
                    Err((m, _)) if *m as u64 > t => 1.0,
                    Err((_, x)) => ruin_up(params, *x as u64, t + 1),
                })
                .sum::<f64>()
                / n;
            (t, over(&|p| p.theta as u64), over(&|p| p.nbar as u64), h)
        })
        .collect()
}

/// Probability that the walk from `x` reaches `top` before 0.
fn ruin_up(params: &SrwParams, x: u64, top: u64) -> f64 {
    if (params.p - params.q).abs() < 1e-15 {
        return x as f64 / top as f64;
    }
    let rho = params.q / params.p;
    (1.0 - rho.powf(x as f64)) / (1.0 - rho.powf(top as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const WORKED: &str = "0123234343454343210";
    const MARKED: &str = "01(222)(33)23(4444)3434(55)4343210";

    #[test]
    fn worked_path() {
        let c = extract_nested(&ExcursionPath::parse_compact(WORKED).unwrap()).unwrap();
        assert_eq!(c.n, vec![1, 1, 2, 4, 1]);
        assert_eq!((c.h, c.tau, c.theta, c.nbar), (5, 4, 17, 9));
        assert_eq!((c.area, c.restricted_area, c.weighted_rises()), (51, 42, 21));
        assert!(c.parity_identity_holds() && c.area_identity_holds());
    }

    #[test]
    fn marked_path() {
        let c = extract_nested(&ExcursionPath::parse_compact(MARKED).unwrap()).unwrap();
        assert_eq!(c.n, vec![1, 3, 3, 7, 2]);
        assert_eq!(c.rises, vec![1, 1, 2, 4, 1]);
        assert_eq!((c.area, c.restricted_area, c.weighted_rises()), (51, 42, 21));
        assert!(!c.parity_identity_holds());
    }

    #[test]
    fn trivial_paths() {
        let c = extract_nested(&ExcursionPath::parse_compact("010").unwrap()).unwrap();
        assert_eq!((c.n.clone(), c.h, c.theta, c.l), (vec![1], 1, 1, 1));
        let c = extract_nested(&ExcursionPath::parse_compact("0110").unwrap()).unwrap();
        assert_eq!(c.theta, 2);
        assert!(ExcursionPath::parse_compact("0120").is_err());
        let open = ExcursionPath::parse_compact("0121").unwrap();
        assert_eq!(extract_nested(&open), Err(Error::UnfinishedPath));
    }

    #[test]
    fn valleys() {
        let c = extract_nested(&ExcursionPath::parse_compact("01232343210").unwrap()).unwrap();
        assert_eq!(c.l, 2);
        let c = extract_nested(&ExcursionPath::parse_compact("0123210").unwrap()).unwrap();
        assert_eq!(c.l, 3);
    }

    #[test]
    fn theta_law() {
        let s = SrwParams::new(0.3, 0.7, 0.0).unwrap();
        assert_abs_diff_eq!(theta_pmf_r0(&s, 3), 0.3 * 0.49, epsilon = 1e-15);
        assert_abs_diff_eq!(theta_pmf_r0(&s, 5), 2.0 * 0.09 * 0.343, epsilon = 1e-15);
        let t = SrwParams::new(0.4, 0.2, 0.4).unwrap();
        assert_abs_diff_eq!(theta_pgf(&t, 1.0), 0.5, epsilon = 1e-15);
        let z0 = SrwParams::new(0.0, 0.6, 0.4).unwrap();
        assert_abs_diff_eq!(theta_pgf(&z0, 0.5), 0.6 * 0.5 / 0.8, epsilon = 1e-15);
        // cdf against the pmf of the lazy walk read off the series of h
        let mech = Mechanism::Binary { q: 0.3, r: 0.4, p: 0.3 };
        let s = SrwParams::new(0.3, 0.3, 0.4).unwrap();
        let direct: f64 = (1..=40).map(|m| crate::rw::first_passage_pmf(&mech, 1, m)).sum();
        assert_abs_diff_eq!(theta_cdf(&s, 40), direct, epsilon = 1e-12);
    }

    #[test]
    fn progeny_identity() {
        let s = SrwParams::new(0.45, 0.55, 0.0).unwrap();
        for k in 0..100 {
            let z = k as f64 / 100.0;
            assert!(progeny_theta_residual(&s, z).unwrap().abs() < 1e-12);
        }
        let t = SrwParams::new(0.3, 0.3, 0.4).unwrap();
        assert!(progeny_theta_residual(&t, 0.9).unwrap().abs() > 1e-3);
    }

    #[test]
    fn heights_and_depths() {
        let s = SrwParams::new(0.5, 0.5, 0.0).unwrap();
        assert_abs_diff_eq!(height_law(&s, 1).claimed, 0.5, epsilon = 1e-15);
        let s = SrwParams::new(0.6, 0.4, 0.0).unwrap();
        let hl = height_law(&s, 1);
        assert_abs_diff_eq!(hl.claimed, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(hl.exact, 0.6, epsilon = 1e-12);
        let t = SrwParams::new(0.3, 0.3, 0.4).unwrap();
        assert_abs_diff_eq!(height_law(&t, 1).claimed, 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(height_law(&t, 1).exact, 0.5, epsilon = 1e-12);
        let s = SrwParams::new(0.5, 0.5, 0.0).unwrap();
        assert_abs_diff_eq!(depth_law(&s, 1).claimed, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(depth_law(&t, 3).claimed / depth_law(&t, 2).claimed, 0.49, epsilon = 1e-12);
    }

    #[test]
    fn harris_mechanisms() {
        let s = SrwParams::new(0.5, 0.5, 0.0).unwrap();
        assert_eq!(harris_mechanism(&s).mechanism, Mechanism::Geo0 { pi0: 0.5 });
        let t = SrwParams::new(0.3, 0.3, 0.4).unwrap();
        let m = harris_mechanism(&t).mechanism;
        assert_abs_diff_eq!(m.mean(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.d1(0.0), 0.49, epsilon = 1e-12);
    }

    #[test]
    fn reconstruction() {
        let path = ExcursionPath::parse_compact(WORKED).unwrap();
        let tree = PlaneTree::from_excursion(&path).unwrap();
        assert_eq!(tree.level_counts(), vec![1, 1, 2, 4, 1]);
        let s = SrwParams::new(0.5, 0.5, 0.0).unwrap();
        assert_eq!(reconstruct_excursion(&tree, &s).unwrap(), path);
        let leaf = PlaneTree::new(vec![0]).unwrap();
        assert_eq!(reconstruct_excursion(&leaf, &s).unwrap().heights, vec![0, 1, 0]);
        let t = SrwParams::new(0.3, 0.3, 0.4).unwrap();
        assert_eq!(reconstruct_excursion(&leaf, &t), Err(Error::UnsupportedHoldings));
    }

    #[test]
    fn simulation_basics() {
        let s = SrwParams::new(0.0, 0.6, 0.4).unwrap();
        let p = simulate_excursion_seeded(&s, 3, 1000);
        assert!(p.finished && p.heights.iter().all(|&h| h <= 1));
        let s = SrwParams::new(0.5, 0.5, 0.0).unwrap();
        let mut rng = stream_rng(7, 0);
        let n = 200_000;
        let ones = (0..n).filter(|_| simulate_excursion(&s, 10, &mut rng).theta() == Some(1)).count() as f64 / n as f64;
        assert!((ones - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt());
    }
}
