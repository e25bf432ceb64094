//! The random-subset attack: for a uniform `P0` on `k` symbols the attacker
//! draws `Y ~ P0^M` with `M = ⌊βk⌋` and sets `Pb` uniform on the entries of
//! `Y`. Each training symbol is `Z_n = (1 - G_n)·X_n + G_n·Y_{V_n}` with
//! `G_n ~ Bernoulli(γ)` and `V_n` uniform on `{1..M}`. Every `Z_n` is
//! marginally uniform, so a detector that only sees `D` and `P0` can tell
//! the two hypotheses apart only through repeated symbols.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::detectors::{Type2Detector, Verdict};
use crate::dist::{sample, Categorical, SymbolDataset};
use crate::error::{param, Result};
use crate::harness::{monte_carlo, RiskEstimate};
use crate::rng::{derive_seed, rng_from_seed, stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpossibilityConfig {
    pub k: usize,
    pub beta: f64,
    pub gamma: f64,
    pub n: usize,
}

impl ImpossibilityConfig {
    pub fn new(k: usize, beta: f64, gamma: f64, n: usize) -> Result<Self> {
        if k == 0 {
            return Err(param("k", "alphabet must be nonempty"));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(param("beta", format!("{beta} not in [0, 1]")));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(param("gamma", format!("{gamma} not in [0, 1]")));
        }
        if n == 0 {
            return Err(param("n", "need at least one sample"));
        }
        Ok(Self { k, beta, gamma, n })
    }

    /// `M = ⌊βk⌋`.
    pub fn m(&self) -> usize {
        (self.beta * self.k as f64).floor() as usize
    }

    fn check_m(&self) -> Result<usize> {
        match self.m() {
            0 => Err(param(
                "beta",
                format!(
                    "floor(beta * k) = floor({} * {}) is 0, the construction needs at least 1",
                    self.beta, self.k
                ),
            )),
            m => Ok(m),
        }
    }
}

/// One poisoned training set drawn from the construction.
pub fn imposs_sampler(config: &ImpossibilityConfig, seed: u64) -> Result<SymbolDataset> {
    let m = config.check_m()?;
    let mut rng = rng_from_seed(seed);
    let y: Vec<usize> = (0..m).map(|_| rng.random_range(0..config.k)).collect();
    let symbols = (0..config.n)
        .map(|_| {
            let clean = rng.random_range(0..config.k);
            let poisoned = rng.random::<f64>() < config.gamma;
            let v = rng.random_range(0..m);
            if poisoned {
                y[v]
            } else {
                clean
            }
        })
        .collect();
    SymbolDataset::new(symbols, config.k)
}

/// `½·exp(-N²/(M - N))`, the risk no clean-distribution detector can beat
/// against this attack.
pub fn imposs_floor(n: usize, m: usize) -> Result<f64> {
    if m <= n {
        return Err(param("m", format!("the floor needs M > N, got M = {m}, N = {n}")));
    }
    let n = n as f64;
    Ok(0.5 * (-n * n / (m as f64 - n)).exp())
}

/// Risk of `detector` when `J = 0` gives a uniform i.i.d. sample and
/// `J = 1` gives [`imposs_sampler`] output.
pub fn imposs_probe<G: Type2Detector>(
    detector: &G,
    config: &ImpossibilityConfig,
    trials: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    let m = config.check_m()?;
    if m <= config.n {
        return Err(param(
            "beta",
            format!("probe needs M = floor(beta * k) = {m} > n = {}", config.n),
        ));
    }
    let p0 = Categorical::uniform(config.k)?;
    monte_carlo(trials, seed, |s| {
        let j = rng_from_seed(derive_seed(s, stream::LABEL)).random::<bool>();
        let data_seed = derive_seed(s, stream::TRAINING);
        let data = if j {
            imposs_sampler(config, data_seed)?
        } else {
            sample(&p0, config.n, data_seed)?
        };
        let verdict = detector.detect(&data, &p0, derive_seed(s, stream::DETECTOR))?;
        Ok(verdict != Verdict::from_bit(j))
    })
}

/// Flags a dataset as poisoned when a symbol repeats; the natural attack on
/// the construction, since `J = 1` repeats far more often.
pub fn collision_detector(data: &SymbolDataset, _: &Categorical, _: u64) -> Result<Verdict> {
    Ok(Verdict::from_bit(data.has_repeat()))
}
