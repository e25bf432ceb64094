//! Finite-alphabet distributions, datasets and their empirical types.
//!
//! Total variation is computed as half the L1 distance between probability
//! vectors, which on a finite alphabet coincides with the supremum of
//! `|P(A) - Q(A)|` over all events `A`.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::rng::{rng_from_seed, Rng};

/// Tolerance on probability-vector normalization.
pub const PROB_TOLERANCE: f64 = 1e-12;

/// Default budget for exact enumeration over `K^n` outcomes.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// A probability distribution on the alphabet `{0, .., K-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Categorical {
    probs: Vec<f64>,
    #[serde(skip)]
    cdf: Vec<f64>,
}

impl Categorical {
    /// Validates `probs` and renormalizes away rounding below
    /// [`PROB_TOLERANCE`]. Larger deviations are rejected.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(param("probs", "alphabet must contain at least one symbol"));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
            return Err(param(
                "probs",
                format!("entry {i} is {p}, expected a finite value >= 0"),
            ));
        }
        let total = compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(param("probs", format!("entries sum to {total}, expected 1")));
        }
        // Dividing by a total within a few ulps of 1 only shuffles last bits
        // and would make normalization non-idempotent.
        let probs = if (total - 1.0).abs() <= 4.0 * f64::EPSILON {
            probs
        } else {
            probs.into_iter().map(|p| p / total).collect()
        };
        Ok(Self::from_normalized(probs))
    }

    fn from_normalized(probs: Vec<f64>) -> Self {
        let mut cdf = Vec::with_capacity(probs.len());
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for &p in &probs {
            let y = p - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            cdf.push(sum);
        }
        // Pin the tail to exactly 1 from the last symbol with positive mass
        // onward, so inverse-CDF sampling never lands on a zero-mass symbol.
        if let Some(last) = probs.iter().rposition(|&p| p > 0.0) {
            for c in &mut cdf[last..] {
                *c = 1.0;
            }
        }
        Self { probs, cdf }
    }

    /// The uniform distribution on `k` symbols.
    pub fn uniform(k: usize) -> Result<Self> {
        Self::uniform_on(k, 0..k)
    }

    /// Uniform on the symbols in `support`, zero elsewhere.
    pub fn uniform_on(k: usize, support: std::ops::Range<usize>) -> Result<Self> {
        if support.is_empty() || support.end > k {
            return Err(param(
                "support",
                format!("{support:?} is not a nonempty subrange of 0..{k}"),
            ));
        }
        let m = support.len() as f64;
        let probs = (0..k)
            .map(|x| if support.contains(&x) { 1.0 / m } else { 0.0 })
            .collect();
        Ok(Self::from_normalized(probs))
    }

    /// The point mass on `symbol`.
    pub fn point_mass(k: usize, symbol: usize) -> Result<Self> {
        Self::uniform_on(k, symbol..symbol + 1)
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, symbol: usize) -> f64 {
        self.probs[symbol]
    }

    /// Draws one symbol by inverse-CDF lookup.
    pub fn draw(&self, rng: &mut Rng) -> usize {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c <= u);
        i.min(self.probs.len() - 1)
    }

    pub(crate) fn check_same_alphabet(&self, other: &Self) -> Result<()> {
        if self.alphabet_size() != other.alphabet_size() {
            return Err(Error::Dimension {
                left: self.alphabet_size(),
                right: other.alphabet_size(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for Categorical {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Self::new(probs)
    }
}

impl From<Categorical> for Vec<f64> {
    fn from(c: Categorical) -> Self {
        c.probs
    }
}

/// An observed sequence of symbols from `{0, .., K-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDataset")]
pub struct SymbolDataset {
    symbols: Vec<usize>,
    alphabet_size: usize,
}

#[derive(Deserialize)]
struct RawDataset {
    symbols: Vec<usize>,
    alphabet_size: usize,
}

impl TryFrom<RawDataset> for SymbolDataset {
    type Error = Error;

    fn try_from(raw: RawDataset) -> Result<Self> {
        Self::new(raw.symbols, raw.alphabet_size)
    }
}

impl SymbolDataset {
    pub fn new(symbols: Vec<usize>, alphabet_size: usize) -> Result<Self> {
        if symbols.is_empty() {
            return Err(param("symbols", "dataset must contain at least one sample"));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s >= alphabet_size) {
            return Err(param(
                "symbols",
                format!("symbol {s} outside alphabet of size {alphabet_size}"),
            ));
        }
        Ok(Self { symbols, alphabet_size })
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Occurrence counts of the observed symbols, sorted by symbol.
    ///
    /// Costs `O(N log N)` regardless of the alphabet size.
    pub fn sparse_counts(&self) -> Vec<(usize, usize)> {
        let mut sorted = self.symbols.clone();
        sorted.sort_unstable();
        let mut out: Vec<(usize, usize)> = Vec::new();
        for s in sorted {
            match out.last_mut() {
                Some((last, c)) if *last == s => *c += 1,
                _ => out.push((s, 1)),
            }
        }
        out
    }

    /// True when some symbol occurs more than once.
    pub fn has_repeat(&self) -> bool {
        self.sparse_counts().iter().any(|&(_, c)| c > 1)
    }
}

/// The type `S_N` of a dataset: its empirical symbol frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalType {
    probs: Vec<f64>,
    sample_count: usize,
}

impl EmpiricalType {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn to_categorical(&self) -> Categorical {
        Categorical::from_normalized(self.probs.clone())
    }
}

/// A clean/backdoor pair with its poisoning rate and closeness slack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair")]
pub struct DistributionPair {
    pub p0: Categorical,
    pub pb: Categorical,
    pub gamma: f64,
    pub beta: f64,
}

#[derive(Deserialize)]
struct RawPair {
    p0: Categorical,
    pb: Categorical,
    gamma: f64,
    #[serde(default)]
    beta: f64,
}

impl TryFrom<RawPair> for DistributionPair {
    type Error = Error;

    fn try_from(raw: RawPair) -> Result<Self> {
        Self::new(raw.p0, raw.pb, raw.gamma, raw.beta)
    }
}

impl DistributionPair {
    /// Accepts `gamma` and `beta` anywhere in `[0, 1]` so that degenerate
    /// mixtures can be expressed. Membership in the admissible family is a
    /// separate question, see [`DistributionPair::in_family`].
    pub fn new(p0: Categorical, pb: Categorical, gamma: f64, beta: f64) -> Result<Self> {
        p0.check_same_alphabet(&pb)?;
        if !(0.0..=1.0).contains(&gamma) {
            return Err(param("gamma", format!("{gamma} not in [0, 1]")));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(param("beta", format!("{beta} not in [0, 1]")));
        }
        Ok(Self { p0, pb, gamma, beta })
    }

    pub fn alphabet_size(&self) -> usize {
        self.p0.alphabet_size()
    }

    /// The poisoned training distribution `P1 = gamma Pb + (1 - gamma) P0`.
    pub fn p1(&self) -> Categorical {
        mix(self).expect("pair invariants guarantee a valid mixture")
    }

    /// `TV(P0, Pb)`.
    pub fn separation(&self) -> f64 {
        tv_distance(&self.p0, &self.pb).expect("pair shares one alphabet")
    }

    /// Whether `TV(P0, Pb) >= 1 - beta`.
    pub fn in_family(&self) -> bool {
        self.separation() >= 1.0 - self.beta - PROB_TOLERANCE
    }
}

/// Total variation distance `½ Σ |p(x) - q(x)|`.
pub fn tv_distance(p: &Categorical, q: &Categorical) -> Result<f64> {
    p.check_same_alphabet(q)?;
    let l1 = compensated_sum(p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()));
    Ok((0.5 * l1).clamp(0.0, 1.0))
}

/// Total variation between `p` and the type of `data`, without
/// materializing the dense type vector.
pub fn tv_to_type(p: &Categorical, data: &SymbolDataset) -> Result<f64> {
    if p.alphabet_size() != data.alphabet_size() {
        return Err(Error::Dimension {
            left: p.alphabet_size(),
            right: data.alphabet_size(),
        });
    }
    let n = data.len() as f64;
    let counts = data.sparse_counts();
    let on_support = compensated_sum(counts.iter().map(|&(x, c)| (c as f64 / n - p.probs[x]).abs()));
    let mass_on_support = compensated_sum(counts.iter().map(|&(x, _)| p.probs[x]));
    let off_support = (1.0 - mass_on_support).max(0.0);
    Ok((0.5 * (on_support + off_support)).clamp(0.0, 1.0))
}

/// Entrywise mixture `gamma Pb + (1 - gamma) P0`.
pub fn mix(pair: &DistributionPair) -> Result<Categorical> {
    mix_parts(&pair.p0, &pair.pb, pair.gamma)
}

pub fn mix_parts(p0: &Categorical, pb: &Categorical, gamma: f64) -> Result<Categorical> {
    p0.check_same_alphabet(pb)?;
    if !(0.0..=1.0).contains(&gamma) {
        return Err(param("gamma", format!("{gamma} not in [0, 1]")));
    }
    if gamma == 0.0 {
        return Ok(p0.clone());
    }
    if gamma == 1.0 {
        return Ok(pb.clone());
    }
    let probs = p0
        .probs
        .iter()
        .zip(&pb.probs)
        .map(|(a, b)| gamma * b + (1.0 - gamma) * a)
        .collect();
    Categorical::new(probs)
}

/// `n` i.i.d. draws from `p`, reproducible from `seed`.
pub fn sample(p: &Categorical, n: usize, seed: u64) -> Result<SymbolDataset> {
    sample_with(p, n, &mut rng_from_seed(seed))
}

pub fn sample_with(p: &Categorical, n: usize, rng: &mut Rng) -> Result<SymbolDataset> {
    if n == 0 {
        return Err(param("n", "sample size must be at least 1"));
    }
    let symbols = (0..n).map(|_| p.draw(rng)).collect();
    Ok(SymbolDataset {
        symbols,
        alphabet_size: p.alphabet_size(),
    })
}

/// The dense type `S_N(x) = count(x) / N`.
pub fn empirical_type(d: &SymbolDataset) -> EmpiricalType {
    let mut counts = vec![0usize; d.alphabet_size];
    for &s in &d.symbols {
        counts[s] += 1;
    }
    let n = d.len() as f64;
    EmpiricalType {
        probs: counts.into_iter().map(|c| c as f64 / n).collect(),
        sample_count: d.len(),
    }
}

/// Exact `TV(p0^n, p1^n)` by enumeration of all `K^n` outcomes.
pub fn product_tv_exact(p0: &Categorical, p1: &Categorical, n: usize) -> Result<f64> {
    product_tv_exact_capped(p0, p1, n, DEFAULT_ENUMERATION_CAP)
}

pub fn product_tv_exact_capped(p0: &Categorical, p1: &Categorical, n: usize, cap: u64) -> Result<f64> {
    p0.check_same_alphabet(p1)?;
    if n == 0 {
        return Err(param("n", "product length must be at least 1"));
    }
    let outcomes = (p0.alphabet_size() as f64).powi(n as i32);
    if outcomes > cap as f64 {
        return Err(Error::Resource { outcomes, cap });
    }
    let mut acc = 0.0;
    product_walk(&p0.probs, &p1.probs, n, 1.0, 1.0, &mut acc);
    Ok((0.5 * acc).clamp(0.0, 1.0))
}

fn product_walk(p0: &[f64], p1: &[f64], depth: usize, a: f64, b: f64, acc: &mut f64) {
    if depth == 0 {
        *acc += (a - b).abs();
        return;
    }
    for (x, y) in p0.iter().zip(p1) {
        let (na, nb) = (a * x, b * y);
        if na == 0.0 && nb == 0.0 {
            continue;
        }
        product_walk(p0, p1, depth - 1, na, nb, acc);
    }
}
