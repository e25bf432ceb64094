//! Monte-Carlo risk estimation.
//!
//! A trial draws `J ~ Bernoulli(½)`, a training set from `P0^N` (`J = 0`) or
//! `P1^N` (`J = 1`), builds the observation the detector type is entitled
//! to, and records whether the verdict differs from `J`. Trial `t` uses the
//! seed `derive_seed(master, t)` and nothing else, so estimates are
//! bit-identical for any thread count or scheduling order.

mod experiment;
mod generalized;
mod trainer;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use experiment::{run_experiment, ExperimentConfig, ExperimentResult, PairSpec};
pub use generalized::{
    estimate_generalized_risk, GeneralizedProblem, JointPrior, ProbeLikelihoodRule, SampleDetector, TargetFunction,
};
pub use trainer::{SmoothedFrequencies, TrainedParams, Trainer};

use crate::detectors::{Type0Detector, Type1Detector, Type2Detector, Type3Detector, Verdict};
use crate::dist::{sample, DistributionPair, SymbolDataset};
use crate::error::{param, Result};
use crate::rng::{derive_seed, rng_from_seed, stream};

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_901;

/// Minimum number of trials accepted by the estimators.
pub const MIN_TRIALS: usize = 100;

/// Empirical error rate with a 99% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: usize,
}

impl RiskEstimate {
    pub fn from_counts(errors: usize, trials: usize) -> Self {
        assert!(trials > 0 && errors <= trials);
        let n = trials as f64;
        let p = errors as f64 / n;
        let z2 = Z_99 * Z_99;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = Z_99 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        Self {
            p_hat: p,
            ci_low: (center - half).clamp(0.0, 1.0).min(p),
            ci_high: (center + half).clamp(0.0, 1.0).max(p),
            trials,
        }
    }

    pub fn ci_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }

    pub fn contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

/// Runs `trials` independent trials in parallel; `trial` receives the
/// trial's derived seed and reports whether the detector erred.
pub fn monte_carlo<F>(trials: usize, seed: u64, trial: F) -> Result<RiskEstimate>
where
    F: Fn(u64) -> Result<bool> + Sync,
{
    if trials < MIN_TRIALS {
        return Err(param("trials", format!("{trials} < minimum of {MIN_TRIALS}")));
    }
    let outcomes: Vec<Result<bool>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| trial(derive_seed(seed, t)))
        .collect();
    let mut errors = 0;
    for o in outcomes {
        errors += usize::from(o?);
    }
    Ok(RiskEstimate::from_counts(errors, trials))
}

/// A detector together with the observation model of its type.
pub trait DetectorAccess: Sync {
    /// Decides on training data `data` drawn under `pair`, building the
    /// type-specific side information from `seed`.
    fn judge(&self, data: &SymbolDataset, pair: &DistributionPair, seed: u64) -> Result<Verdict>;
}

/// Type-0 access: `(A(D), D')` with `D' ~ P0^m`.
#[derive(Debug, Clone)]
pub struct Type0Access<G, T> {
    pub detector: G,
    pub trainer: T,
    pub m: usize,
}

/// Type-1 access: `(D, D')` with `D' ~ P0^m`.
#[derive(Debug, Clone)]
pub struct Type1Access<G> {
    pub detector: G,
    pub m: usize,
}

/// Type-2 access: `(D, P0)`.
#[derive(Debug, Clone)]
pub struct Type2Access<G>(pub G);

/// Type-3 access: `(D, P0, Pb)`.
#[derive(Debug, Clone)]
pub struct Type3Access<G>(pub G);

fn clean_validation(pair: &DistributionPair, m: usize, seed: u64) -> Result<SymbolDataset> {
    sample(&pair.p0, m, derive_seed(seed, stream::CLEAN_SAMPLES))
}

impl<G: Type0Detector, T: Trainer> DetectorAccess for Type0Access<G, T> {
    fn judge(&self, data: &SymbolDataset, pair: &DistributionPair, seed: u64) -> Result<Verdict> {
        let clean = clean_validation(pair, self.m, seed)?;
        let model = self.trainer.train(data)?;
        self.detector
            .detect(&model, &clean, derive_seed(seed, stream::DETECTOR))
    }
}

impl<G: Type1Detector> DetectorAccess for Type1Access<G> {
    fn judge(&self, data: &SymbolDataset, pair: &DistributionPair, seed: u64) -> Result<Verdict> {
        let clean = clean_validation(pair, self.m, seed)?;
        self.detector.detect(data, &clean, derive_seed(seed, stream::DETECTOR))
    }
}

impl<G: Type2Detector> DetectorAccess for Type2Access<G> {
    fn judge(&self, data: &SymbolDataset, pair: &DistributionPair, seed: u64) -> Result<Verdict> {
        self.0.detect(data, &pair.p0, seed)
    }
}

impl<G: Type3Detector> DetectorAccess for Type3Access<G> {
    fn judge(&self, data: &SymbolDataset, pair: &DistributionPair, seed: u64) -> Result<Verdict> {
        self.0.detect(data, pair, seed)
    }
}

fn one_trial<D: DetectorAccess + ?Sized>(
    detector: &D,
    pair: &DistributionPair,
    p1: &crate::dist::Categorical,
    n: usize,
    j: bool,
    trial_seed: u64,
) -> Result<bool> {
    let law = if j { p1 } else { &pair.p0 };
    let data = sample(law, n, derive_seed(trial_seed, stream::TRAINING))?;
    let verdict = detector.judge(&data, pair, derive_seed(trial_seed, stream::DETECTOR))?;
    Ok(verdict != Verdict::from_bit(j))
}

/// Monte-Carlo estimate of `R(g; P0, Pb) = Pr{g(Q) != J}`.
pub fn estimate_risk<D: DetectorAccess + ?Sized>(
    detector: &D,
    pair: &DistributionPair,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    if n == 0 {
        return Err(param("n", "training set size must be at least 1"));
    }
    let p1 = pair.p1();
    monte_carlo(trials, seed, |s| {
        let j = rng_from_seed(derive_seed(s, stream::LABEL)).random::<bool>();
        one_trial(detector, pair, &p1, n, j, s)
    })
}

/// Conditional error rates `Pr{g != 0 | J = 0}` (false backdoor) and
/// `Pr{g != 1 | J = 1}` (missed backdoor), each from `trials` trials.
pub fn estimate_conditional_errors<D: DetectorAccess + ?Sized>(
    detector: &D,
    pair: &DistributionPair,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<(RiskEstimate, RiskEstimate)> {
    if n == 0 {
        return Err(param("n", "training set size must be at least 1"));
    }
    let p1 = pair.p1();
    let branch = |j: bool| {
        monte_carlo(trials, derive_seed(seed, u64::from(j)), |s| {
            one_trial(detector, pair, &p1, n, j, s)
        })
    };
    Ok((branch(false)?, branch(true)?))
}

/// Risk of a Type-0 detector operating on trained parameters.
#[allow(clippy::too_many_arguments)]
pub fn type0_demo_risk<G: Type0Detector, T: Trainer>(
    detector: G,
    pair: &DistributionPair,
    n: usize,
    m: usize,
    trainer: T,
    trials: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    let access = Type0Access { detector, trainer, m };
    estimate_risk(&access, pair, n, trials, seed)
}
