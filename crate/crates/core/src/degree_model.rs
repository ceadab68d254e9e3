//! Degree distributions and concrete degree sequences.
//!
//! A [`DegreeDistribution`] is a probability vector `P` on `{k_min, …, k_max}`
//! with `k_min ≥ 2`. Its two derived constants are the mean degree
//! `b = 𝔼P` and the branching factor `a = 𝔼P(P−1)/𝔼P`, which is also the
//! mean of the size-biased offspring law `P̄(k) = (k+1)P(k+1)/𝔼P` and the
//! value the non-backtracking spectral radius concentrates around.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalization tolerance for probability vectors.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A finitely supported law on consecutive integers `min, min+1, …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteLaw {
    min: usize,
    probs: Vec<f64>,
}

impl DiscreteLaw {
    /// Builds a law from `probs[i] = P(min + i)`. Leading and trailing zeros
    /// are trimmed.
    pub fn new(min: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::Distribution(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Distribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        let first = probs
            .iter()
            .position(|&p| p > 0.0)
            .ok_or_else(|| Error::Distribution("all probabilities are zero".into()))?;
        let last = probs.iter().rposition(|&p| p > 0.0).unwrap();
        Ok(Self {
            min: min + first,
            probs: probs[first..=last].to_vec(),
        })
    }

    pub fn min(&self) -> usize {
        self.min
    }

    pub fn max(&self) -> usize {
        self.min + self.probs.len() - 1
    }

    /// `P(k)`, zero outside the support.
    pub fn prob(&self, k: usize) -> f64 {
        if k < self.min {
            return 0.0;
        }
        self.probs.get(k - self.min).copied().unwrap_or(0.0)
    }

    /// `(k, P(k))` over the support range, zeros included.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(i, &p)| (self.min + i, p))
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.iter().map(|(k, p)| p * (k as f64 - m).powi(2)).sum()
    }

    pub fn sampler(&self) -> LawSampler {
        let mut acc = 0.0;
        let cumulative = self
            .probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        LawSampler {
            min: self.min,
            cumulative,
        }
    }
}

/// Inverse-CDF sampler for a [`DiscreteLaw`]. Supports are short, so a
/// linear scan beats any table structure.
#[derive(Debug, Clone)]
pub struct LawSampler {
    min: usize,
    cumulative: Vec<f64>,
}

impl LawSampler {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let last = self.cumulative.len() - 1;
        let idx = self.cumulative[..last]
            .iter()
            .position(|&c| u < c)
            .unwrap_or(last);
        self.min + idx
    }
}

/// Probability vector on degrees `{k_min, …, k_max}` with `k_min ≥ 2` and
/// branching factor `a > 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<usize, f64>", into = "BTreeMap<usize, f64>")]
pub struct DegreeDistribution {
    law: DiscreteLaw,
}

impl DegreeDistribution {
    /// `probs[i] = P(k_min + i)`.
    pub fn new(k_min: usize, probs: Vec<f64>) -> Result<Self> {
        let law = DiscreteLaw::new(k_min, probs)?;
        if law.min() < 2 {
            return Err(Error::Distribution(format!(
                "minimum degree {} < 2",
                law.min()
            )));
        }
        let dist = Self { law };
        let (a, _) = dist.derived_constants();
        if a <= 1.0 + NORMALIZATION_TOL {
            return Err(Error::Distribution(format!(
                "branching factor a = {a} must exceed 1"
            )));
        }
        Ok(dist)
    }

    /// Builds from `(degree, probability)` pairs. Repeated degrees add up.
    pub fn from_pairs(pairs: &[(usize, f64)]) -> Result<Self> {
        let map: BTreeMap<usize, f64> = pairs.iter().fold(BTreeMap::new(), |mut m, &(k, p)| {
            *m.entry(k).or_insert(0.0) += p;
            m
        });
        Self::try_from(map)
    }

    /// The point mass at `d`.
    pub fn regular(d: usize) -> Result<Self> {
        Self::new(d, vec![1.0])
    }

    pub fn k_min(&self) -> usize {
        self.law.min()
    }

    pub fn k_max(&self) -> usize {
        self.law.max()
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.law.prob(k)
    }

    pub fn law(&self) -> &DiscreteLaw {
        &self.law
    }

    /// Degrees with positive mass, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.law.iter().filter(|&(_, p)| p > 0.0).map(|(k, _)| k).collect()
    }

    pub fn is_regular(&self) -> bool {
        self.k_min() == self.k_max()
    }

    /// Mean degree `b = 𝔼P`.
    pub fn mean_degree(&self) -> f64 {
        self.law.mean()
    }

    /// Branching factor `a = 𝔼P(P−1)/𝔼P`.
    pub fn branching_factor(&self) -> f64 {
        self.derived_constants().0
    }

    /// `(a, b)`.
    pub fn derived_constants(&self) -> (f64, f64) {
        let b = self.law.mean();
        let falling: f64 = self
            .law
            .iter()
            .map(|(k, p)| (k * (k - 1)) as f64 * p)
            .sum();
        (falling / b, b)
    }

    /// The size-biased offspring law `P̄(k) = (k+1)P(k+1)/𝔼P` on
    /// `{k_min−1, …, k_max−1}`.
    pub fn offspring_distribution(&self) -> DiscreteLaw {
        let b = self.law.mean();
        let mut probs: Vec<f64> = self.law.iter().map(|(k, p)| k as f64 * p / b).collect();
        // Rounding can leave the sum off by a few ulps.
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        DiscreteLaw::new(self.k_min() - 1, probs).expect("size-biased law is a valid law")
    }
}

impl TryFrom<BTreeMap<usize, f64>> for DegreeDistribution {
    type Error = Error;

    fn try_from(map: BTreeMap<usize, f64>) -> Result<Self> {
        let (&k_min, _) = map
            .iter()
            .next()
            .ok_or_else(|| Error::Distribution("empty distribution".into()))?;
        let k_max = *map.keys().next_back().unwrap();
        let probs = (k_min..=k_max)
            .map(|k| map.get(&k).copied().unwrap_or(0.0))
            .collect();
        Self::new(k_min, probs)
    }
}

impl From<DegreeDistribution> for BTreeMap<usize, f64> {
    fn from(d: DegreeDistribution) -> Self {
        d.law.iter().filter(|&(_, p)| p > 0.0).collect()
    }
}

/// Parses `"2:0.6667,4:0.3333"`. Literals are rounded by hand, so the vector
/// is renormalized when its sum is within `1e-3` of one.
impl FromStr for DegreeDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (k, p) = item
                .split_once(':')
                .ok_or_else(|| Error::Distribution(format!("expected degree:prob, got {item:?}")))?;
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| Error::Distribution(format!("bad degree {k:?}")))?;
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Distribution(format!("bad probability {p:?}")))?;
            *map.entry(k).or_insert(0.0) += p;
        }
        let total: f64 = map.values().sum();
        if (total - 1.0).abs() > 1e-3 {
            return Err(Error::Distribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        map.values_mut().for_each(|p| *p /= total);
        Self::try_from(map)
    }
}

impl fmt::Display for DegreeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .law
            .iter()
            .filter(|&(_, p)| p > 0.0)
            .map(|(k, p)| format!("{k}:{p}"))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

/// The two-point law on `{2, 2r}` whose branching factor is `alpha`.
///
/// Solving `(2p + 2r(2r−1)(1−p)) / (2p + 2r(1−p)) = alpha` for `p = P(2)`
/// gives `1−p = 2(alpha−1) / (2r(2r−1) − 2 − 2alpha(r−1))`.
pub fn solve_two_point(r: usize, alpha: f64) -> Result<DegreeDistribution> {
    if r < 2 {
        return Err(Error::Domain(format!("rank r = {r} must be at least 2")));
    }
    let top = (2 * r - 1) as f64;
    if !(alpha > 1.0 && alpha < top) {
        return Err(Error::Domain(format!(
            "alpha = {alpha} outside (1, {top})"
        )));
    }
    let r_f = r as f64;
    let c = 2.0 * r_f * (2.0 * r_f - 1.0);
    let q = 2.0 * (alpha - 1.0) / (c - 2.0 - 2.0 * alpha * (r_f - 1.0));
    let q = q.clamp(0.0, 1.0);
    let p = 1.0 - q;
    let mut probs = vec![0.0; 2 * r - 1];
    probs[0] = p;
    probs[2 * r - 2] = q;
    DegreeDistribution::new(2, probs)
}

/// A concrete degree assignment: vertex `v` has degree `degrees[v]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSequence {
    degrees: Vec<usize>,
}

impl DegreeSequence {
    /// Fails when the degree sum is odd.
    pub fn from_degrees(degrees: Vec<usize>) -> Result<Self> {
        let total: usize = degrees.iter().sum();
        if !total.is_multiple_of(2) {
            return Err(Error::Parity(format!("degree sum {total} is odd")));
        }
        Ok(Self { degrees })
    }

    /// Vertices are laid out by ascending degree.
    pub fn from_counts(counts: &BTreeMap<usize, usize>) -> Result<Self> {
        let degrees = counts
            .iter()
            .flat_map(|(&k, &c)| std::iter::repeat_n(k, c))
            .collect();
        Self::from_degrees(degrees)
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Number of half-edges `N = Σ i·n_i`.
    pub fn half_edges(&self) -> usize {
        self.degrees.iter().sum()
    }

    /// `degree → n_i`.
    pub fn counts(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &d in &self.degrees {
            *m.entry(d).or_insert(0) += 1;
        }
        m
    }

    pub fn min_degree(&self) -> usize {
        self.degrees.iter().copied().min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// `a` of the empirical degree law.
    pub fn empirical_branching_factor(&self) -> f64 {
        let s1: usize = self.degrees.iter().sum();
        let s2: usize = self.degrees.iter().map(|&d| d * d.saturating_sub(1)).sum();
        s2 as f64 / s1 as f64
    }
}

/// Degree counts `n_i = ⌊P(i)n⌋ + x_i` with `Σ n_i = n` and an even
/// half-edge count.
///
/// The `n − Σ⌊P(i)n⌋` leftover vertices go one at a time to the supported
/// classes in descending degree order. If the degree sum is then odd, one
/// vertex moves from the largest class to the nearest class of opposite
/// degree parity. Every count ends within `k_max` of `P(i)n`.
pub fn realize_sequence(dist: &DegreeDistribution, n: usize) -> Result<DegreeSequence> {
    if n < dist.k_max() + 1 {
        return Err(Error::Precondition(format!(
            "n = {n} must be at least k_max + 1 = {}",
            dist.k_max() + 1
        )));
    }
    let support = dist.support();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &k in &support {
        // The nudge keeps exact products like (2/3)·9 from flooring to 5.
        let c = (dist.prob(k) * n as f64 + 1e-9).floor() as usize;
        counts.insert(k, c);
    }
    let assigned: usize = counts.values().sum();
    let mut deficit = n
        .checked_sub(assigned)
        .ok_or_else(|| Error::Distribution("floors exceed n".into()))?;
    'fill: while deficit > 0 {
        for &k in support.iter().rev() {
            if deficit == 0 {
                break 'fill;
            }
            *counts.get_mut(&k).unwrap() += 1;
            deficit -= 1;
        }
    }

    let edge_sum: usize = counts.iter().map(|(k, c)| k * c).sum();
    if edge_sum % 2 == 1 {
        fix_parity(dist, &mut counts)?;
    }
    counts.retain(|_, c| *c > 0);
    DegreeSequence::from_counts(&counts)
}

fn fix_parity(dist: &DegreeDistribution, counts: &mut BTreeMap<usize, usize>) -> Result<()> {
    // Source: the most populated class (ties to the larger degree).
    let (&from, _) = counts
        .iter()
        .filter(|(_, &c)| c > 0)
        .max_by_key(|(&k, &c)| (c, k))
        .expect("n > 0");
    let supported = dist.support();
    let target = supported
        .iter()
        .copied()
        .filter(|&k| (k + from) % 2 == 1)
        .min_by_key(|&k| k.abs_diff(from))
        .or_else(|| {
            (dist.k_min()..=dist.k_max())
                .filter(|&k| (k + from) % 2 == 1)
                .min_by_key(|&k| k.abs_diff(from))
        });
    match target {
        Some(to) => {
            *counts.get_mut(&from).unwrap() -= 1;
            *counts.entry(to).or_insert(0) += 1;
            Ok(())
        }
        None => Err(Error::Parity(format!(
            "all degrees in [{}, {}] share one parity and the degree sum is odd",
            dist.k_min(),
            dist.k_max()
        ))),
    }
}

/// Erdős–Gallai: whether some simple graph has exactly these degrees.
pub fn erdos_gallai_check(seq: &DegreeSequence) -> bool {
    let mut d: Vec<usize> = seq.degrees().to_vec();
    let n = d.len();
    if d.iter().sum::<usize>() % 2 != 0 {
        return false;
    }
    if d.iter().any(|&x| x >= n.max(1)) && n > 0 {
        return false;
    }
    d.sort_unstable_by(|a, b| b.cmp(a));
    let mut prefix = vec![0usize; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + d[i];
    }
    for k in 1..=n {
        let lhs = prefix[k];
        // Number of degrees ≥ k (d is descending).
        let at_least_k = d.partition_point(|&x| x >= k);
        let capped = at_least_k.saturating_sub(k);
        let tail_start = k.max(at_least_k);
        let rhs = k * (k - 1) + k * capped + (prefix[n] - prefix[tail_start]);
        if lhs > rhs {
            return false;
        }
    }
    true
}
