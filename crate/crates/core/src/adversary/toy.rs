//! Gaussian toy attack against a projection + Kolmogorov-Smirnov detector.
//!
//! Clean data is `Z = Y·1 + σW` with `Y` uniform on `{-1, +1}`. The detector
//! projects `f(X) = v·(YZ)`, which is `N(μ, σ²)` with `μ = v·1`, and runs a
//! KS test. The attacker maps `(z, y)` to `(z + yΔ, -y)`; because
//! `v·Δ = -2μ` the projection law is unchanged.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::detectors::{ks_test, KsResult};
use crate::error::{param, Error, Result};
use crate::rng::{derive_seed, rng_from_seed, stream};

/// Tolerance on `‖v‖ = 1`.
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// Fresh samples used to evaluate the trained classifier.
pub const EVAL_SAMPLES: usize = 2000;

/// Validated toy parameters together with the derived `μ` and `Δ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToyConfig {
    dims: usize,
    sigma: f64,
    gamma: f64,
    n: usize,
    v: Vec<f64>,
    mu: f64,
    delta: Vec<f64>,
}

impl ToyConfig {
    /// `v` must be a unit vector with `(v·1)² < K`. `gamma = 0` is accepted
    /// so that the unpoisoned pipeline can be run through the same code.
    pub fn new(v: Vec<f64>, sigma: f64, gamma: f64, n: usize) -> Result<Self> {
        if v.len() < 2 {
            return Err(param("v", format!("need at least 2 dimensions, got {}", v.len())));
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() <= UNIT_TOLERANCE) {
            return Err(param("v", format!("norm {norm} is not 1")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(param("sigma", format!("{sigma} must be positive")));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(param("gamma", format!("{gamma} not in [0, 1]")));
        }
        if n == 0 {
            return Err(param("n", "need at least one training sample"));
        }
        let delta = toy_delta(&v)?;
        Ok(Self {
            dims: v.len(),
            sigma,
            gamma,
            n,
            mu: v.iter().sum(),
            v,
            delta,
        })
    }

    /// The same parameters with a different poisoning rate.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.v.clone(), self.sigma, gamma, self.n)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }
}

/// A labeled point `(y, z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub y: i8,
    pub z: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `Δ = 2/√(K − μ²)·(1 − μv) − 2μv`.
pub fn toy_delta(v: &[f64]) -> Result<Vec<f64>> {
    let k = v.len();
    let mu: f64 = v.iter().sum();
    let gap = k as f64 - mu * mu;
    // A unit vector is only known to UNIT_TOLERANCE, so a gap at that scale
    // is indistinguishable from v parallel to the all-ones vector.
    if !(gap > UNIT_TOLERANCE * k as f64) {
        return Err(Error::DegenerateDirection {
            mu_sq: mu * mu,
            dims: k,
        });
    }
    let scale = 2.0 / gap.sqrt();
    Ok(v.iter().map(|vi| scale * (1.0 - mu * vi) - 2.0 * mu * vi).collect())
}

pub fn toy_sample_clean(config: &ToyConfig, n: usize, seed: u64) -> Result<Vec<LabeledSample>> {
    if n == 0 {
        return Err(param("n", "need at least one sample"));
    }
    let mut rng = rng_from_seed(seed);
    Ok((0..n)
        .map(|_| {
            let y: i8 = if rng.random::<bool>() { 1 } else { -1 };
            let z = (0..config.dims)
                .map(|_| f64::from(y) + config.sigma * rng.sample::<f64, _>(StandardNormal))
                .collect();
            LabeledSample { y, z }
        })
        .collect())
}

/// The detector statistic `f(x) = v·(yz)`.
pub fn projection(s: &LabeledSample, config: &ToyConfig) -> f64 {
    f64::from(s.y) * dot(&config.v, &s.z)
}

/// `b(z, y) = (z + yΔ, -y)`.
pub fn toy_backdoor(s: &LabeledSample, config: &ToyConfig) -> LabeledSample {
    let y = f64::from(s.y);
    LabeledSample {
        y: -s.y,
        z: s.z.iter().zip(&config.delta).map(|(z, d)| z + y * d).collect(),
    }
}

/// Replaces each sample by its backdoored version with probability `gamma`.
pub fn toy_poison(clean: &[LabeledSample], gamma: f64, config: &ToyConfig, seed: u64) -> Result<Vec<LabeledSample>> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(param("gamma", format!("{gamma} not in [0, 1]")));
    }
    let mut rng = rng_from_seed(seed);
    Ok(clean
        .iter()
        .map(|s| {
            if rng.random::<f64>() < gamma {
                toy_backdoor(s, config)
            } else {
                s.clone()
            }
        })
        .collect())
}

/// One-sample KS test of the projections against `N(μ, σ²)`.
pub fn toy_ks_defense(data: &[LabeledSample], config: &ToyConfig) -> Result<KsResult> {
    let normal = Normal::new(config.mu, config.sigma).map_err(|e| param("sigma", e.to_string()))?;
    let values: Vec<f64> = data.iter().map(|s| projection(s, config)).collect();
    ks_test(&values, |x| normal.cdf(x))
}

/// `sign(w·z + b)`, with ties going to `+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearClassifier {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearClassifier {
    pub fn score(&self, z: &[f64]) -> f64 {
        dot(&self.weights, z) + self.bias
    }

    pub fn predict(&self, z: &[f64]) -> i8 {
        if self.score(z) >= 0.0 {
            1
        } else {
            -1
        }
    }

    pub fn accuracy(&self, data: &[LabeledSample]) -> f64 {
        let hits = data.iter().filter(|s| self.predict(&s.z) == s.y).count();
        hits as f64 / data.len() as f64
    }
}

/// Least-squares regression of `y` on `[z, 1]`.
pub fn toy_train_classifier(data: &[LabeledSample]) -> Result<LinearClassifier> {
    let first = data
        .first()
        .ok_or_else(|| Error::DegenerateFit("empty training set".into()))?;
    if data.iter().all(|s| s.y == first.y) {
        return Err(Error::DegenerateFit(format!("all labels equal {}", first.y)));
    }
    let k = first.z.len();
    if data.iter().any(|s| s.z.len() != k) {
        return Err(Error::DegenerateFit("feature vectors have different lengths".into()));
    }
    let x = DMatrix::from_fn(data.len(), k + 1, |r, c| if c < k { data[r].z[c] } else { 1.0 });
    let y = DVector::from_iterator(data.len(), data.iter().map(|s| f64::from(s.y)));
    let coef = x
        .svd(true, true)
        .solve(&y, 1e-12)
        .map_err(|e| Error::DegenerateFit(e.to_string()))?;
    if coef.iter().any(|c| !c.is_finite()) {
        return Err(Error::DegenerateFit("non-finite coefficients".into()));
    }
    Ok(LinearClassifier {
        weights: coef.rows(0, k).iter().copied().collect(),
        bias: coef[k],
    })
}

/// Outcome of one end-to-end attack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub seed: u64,
    /// KS p-value on the poisoned training set.
    pub p_value: f64,
    pub ks_statistic: f64,
    /// KS p-value on the same training set before poisoning.
    pub clean_p_value: f64,
    pub clean_accuracy: f64,
    pub attack_success_rate: f64,
}

/// All intermediate artifacts of one attack, for plotting.
#[derive(Debug, Clone)]
pub struct ToyRun {
    pub clean: Vec<LabeledSample>,
    pub poisoned: Vec<LabeledSample>,
    pub clean_classifier: LinearClassifier,
    pub classifier: LinearClassifier,
    pub report: AttackReport,
}

pub fn toy_run(config: &ToyConfig, seed: u64) -> Result<ToyRun> {
    let clean = toy_sample_clean(config, config.n, derive_seed(seed, stream::TRAINING))?;
    let poisoned = toy_poison(&clean, config.gamma, config, derive_seed(seed, stream::POISON))?;
    let ks_clean = toy_ks_defense(&clean, config)?;
    let ks = toy_ks_defense(&poisoned, config)?;
    let clean_classifier = toy_train_classifier(&clean)?;
    let classifier = toy_train_classifier(&poisoned)?;
    let test = toy_sample_clean(config, EVAL_SAMPLES, derive_seed(seed, stream::TEST_SET))?;
    let triggered: Vec<LabeledSample> = test.iter().map(|s| toy_backdoor(s, config)).collect();
    let report = AttackReport {
        seed,
        p_value: ks.p_value,
        ks_statistic: ks.statistic,
        clean_p_value: ks_clean.p_value,
        clean_accuracy: classifier.accuracy(&test),
        attack_success_rate: classifier.accuracy(&triggered),
    };
    Ok(ToyRun {
        clean,
        poisoned,
        clean_classifier,
        classifier,
        report,
    })
}

/// Sample, poison, defend, train and evaluate. The success rate is the
/// fraction of fresh triggered inputs classified as their flipped label.
pub fn toy_attack_report(config: &ToyConfig, seed: u64) -> Result<AttackReport> {
    Ok(toy_run(config, seed)?.report)
}

/// Reports for seeds `first_seed .. first_seed + count`, in seed order.
pub fn toy_ensemble(config: &ToyConfig, first_seed: u64, count: usize) -> Result<Vec<AttackReport>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| toy_attack_report(config, first_seed + i))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub runs: usize,
    pub median_p_value: f64,
    pub median_clean_accuracy: f64,
    pub median_attack_success_rate: f64,
    /// KS test of the clean-data p-values against `U[0, 1]`.
    pub clean_p_uniformity: KsResult,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn summarize(reports: &[AttackReport]) -> Result<EnsembleSummary> {
    let col = |f: fn(&AttackReport) -> f64| reports.iter().map(f).collect::<Vec<_>>();
    let clean_p = col(|r| r.clean_p_value);
    Ok(EnsembleSummary {
        runs: reports.len(),
        median_p_value: median(&col(|r| r.p_value)),
        median_clean_accuracy: median(&col(|r| r.clean_accuracy)),
        median_attack_success_rate: median(&col(|r| r.attack_success_rate)),
        clean_p_uniformity: ks_test(&clean_p, |x| x.clamp(0.0, 1.0))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_config(gamma: f64) -> ToyConfig {
        let v = [0.981, 0.196];
        let norm = (0.981f64.powi(2) + 0.196f64.powi(2)).sqrt();
        ToyConfig::new(v.iter().map(|x| x / norm).collect(), 0.5, gamma, 150).unwrap()
    }

    #[test]
    fn delta_examples() {
        let d = toy_delta(&[1.0, 0.0]).unwrap();
        assert_close!(d[0], -2.0, 1e-15);
        assert_close!(d[1], 2.0, 1e-15);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let d = toy_delta(&[h, -h]).unwrap();
        for x in d {
            assert_close!(x, 2f64.sqrt(), 1e-15);
        }

        let cfg = reference_config(0.5);
        assert_close!(cfg.mu(), 1.177, 1e-3);
        assert_close!(cfg.delta()[0], -2.70, 0.01);
        assert_close!(cfg.delta()[1], 1.50, 0.01);
        assert_close!(dot(cfg.v(), cfg.delta()), -2.0 * cfg.mu(), 1e-9);
    }

    #[test]
    fn degenerate_direction() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(matches!(
            toy_delta(&[h, h]),
            Err(Error::DegenerateDirection { dims: 2, .. })
        ));
        let r = 1.0 / 2f64.sqrt();
        assert!(toy_delta(&[r, r]).is_err());
        assert!(ToyConfig::new(vec![1.0, 1.0], 0.5, 0.5, 10).is_err());
    }

    #[test]
    fn noiseless_sample() {
        let cfg = ToyConfig::new(vec![1.0, 0.0], 1e-300, 0.0, 1).unwrap();
        for s in toy_sample_clean(&cfg, 20, 1).unwrap() {
            assert!(s.z.iter().all(|&z| z == f64::from(s.y)));
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let cfg = reference_config(0.5);
        assert_eq!(
            toy_sample_clean(&cfg, 30, 9).unwrap(),
            toy_sample_clean(&cfg, 30, 9).unwrap()
        );
        assert_ne!(
            toy_sample_clean(&cfg, 30, 9).unwrap(),
            toy_sample_clean(&cfg, 30, 10).unwrap()
        );
    }

    #[test]
    fn projection_mean() {
        let cfg = reference_config(0.5);
        let data = toy_sample_clean(&cfg, 100_000, 2).unwrap();
        let mean = data.iter().map(|s| projection(s, &cfg)).sum::<f64>() / data.len() as f64;
        assert!((mean - cfg.mu()).abs() < 0.02, "{mean}");
    }

    #[test]
    fn backdoor_substitution() {
        let cfg = ToyConfig::new(vec![1.0, 0.0], 0.5, 1.0, 1).unwrap();
        let b = toy_backdoor(
            &LabeledSample {
                y: 1,
                z: vec![0.0, 0.0],
            },
            &cfg,
        );
        assert_eq!(
            b,
            LabeledSample {
                y: -1,
                z: vec![-2.0, 2.0]
            }
        );
    }

    #[test]
    fn poison_boundaries() {
        let cfg = reference_config(0.5);
        let clean = toy_sample_clean(&cfg, 10_000, 3).unwrap();
        assert_eq!(toy_poison(&clean, 0.0, &cfg, 4).unwrap(), clean);
        let all = toy_poison(&clean, 1.0, &cfg, 4).unwrap();
        assert!(all.iter().zip(&clean).all(|(p, c)| p.y == -c.y));
        let half = toy_poison(&clean, 0.5, &cfg, 4).unwrap();
        let replaced = half.iter().zip(&clean).filter(|(p, c)| p.y != c.y).count() as f64 / 1e4;
        assert!((replaced - 0.5).abs() <= 3.0 * (0.25f64 / 1e4).sqrt(), "{replaced}");
    }

    #[test]
    fn ks_detects_gross_shift() {
        let cfg = reference_config(0.5);
        let shift = 10.0 * cfg.sigma();
        let shifted: Vec<LabeledSample> = toy_sample_clean(&cfg, 150, 5)
            .unwrap()
            .into_iter()
            .map(|s| {
                let y = f64::from(s.y);
                LabeledSample {
                    z: s.z.iter().zip(cfg.v()).map(|(z, v)| z + y * shift * v).collect(),
                    y: s.y,
                }
            })
            .collect();
        assert!(toy_ks_defense(&shifted, &cfg).unwrap().p_value < 1e-6);
    }

    #[test]
    fn classifier_recovers_ideal_boundary() {
        let cfg = reference_config(0.0);
        let data = toy_sample_clean(&cfg, 1000, 6).unwrap();
        let clf = toy_train_classifier(&data).unwrap();
        let w = &clf.weights;
        let cos = (w[0] + w[1]) / (2f64.sqrt() * dot(w, w).sqrt());
        assert!(cos.acos().to_degrees() < 15.0, "{w:?}");

        let flipped: Vec<LabeledSample> = data
            .iter()
            .map(|s| LabeledSample {
                y: -s.y,
                z: s.z.clone(),
            })
            .collect();
        let neg = toy_train_classifier(&flipped).unwrap();
        for (a, b) in neg.weights.iter().zip(w) {
            assert_close!(*a, -b, 1e-9);
        }
        assert_close!(neg.bias, -clf.bias, 1e-9);
    }

    #[test]
    fn separable_pair_and_single_class() {
        let data = vec![
            LabeledSample {
                y: 1,
                z: vec![1.0, 1.0],
            },
            LabeledSample {
                y: -1,
                z: vec![-1.0, -1.0],
            },
        ];
        let clf = toy_train_classifier(&data).unwrap();
        assert_eq!(clf.accuracy(&data), 1.0);
        assert!(matches!(toy_train_classifier(&data[..1]), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn unpoisoned_run_keeps_p_values_equal() {
        let cfg = reference_config(0.0);
        let r = toy_attack_report(&cfg, 11).unwrap();
        assert_eq!(r.p_value, r.clean_p_value);
        assert!(r.clean_accuracy > 0.95);
        assert!(r.attack_success_rate < 0.5);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
