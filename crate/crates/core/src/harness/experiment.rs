//! Declarative experiment descriptions and their execution.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::generalized::{
    estimate_generalized_risk, GeneralizedProblem, JointPrior, ProbeLikelihoodRule, TargetFunction,
};
use super::{estimate_risk, RiskEstimate, SmoothedFrequencies, Type2Access, Type3Access};
use crate::detectors::{DetectorKind, NeymanPearson, TypeTvDetector};
use crate::dist::{Categorical, DistributionPair};
use crate::error::{Error, Result};

/// Clean and backdoor laws of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub p0: Categorical,
    pub pb: Categorical,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn default_flavor() -> TargetFunction {
    TargetFunction::Mbd
}

/// A JSON experiment document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub detector: DetectorKind,
    pub pair: PairSpec,
    pub n: usize,
    /// Clean validation samples; defaults to `n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub beta: f64,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_flavor")]
    pub flavor: TargetFunction,
    /// `prior[j][i]`; defaults to the flavor's prior.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<JointPrior>,
}

impl ExperimentConfig {
    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn m(&self) -> usize {
        self.m.unwrap_or(self.n)
    }

    pub fn distribution_pair(&self) -> Result<DistributionPair> {
        DistributionPair::new(self.pair.p0.clone(), self.pair.pb.clone(), self.gamma, self.beta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config_hash: String,
    pub detector: DetectorKind,
    pub flavor: TargetFunction,
    pub risk: RiskEstimate,
}

/// Runs an experiment. For the SBD and OOD flavors `np` denotes the
/// likelihood-ratio rule on the probe input.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let pair = config.distribution_pair()?;
    let risk = match (config.flavor, config.detector) {
        (TargetFunction::Mbd, kind) => {
            if let Some(prior) = &config.prior {
                prior.check_flavor(TargetFunction::Mbd)?;
                if prior.prob(false, false) != 0.5 {
                    return Err(Error::Config("MBD experiments use J ~ Bernoulli(1/2)".into()));
                }
            }
            match kind {
                DetectorKind::NeymanPearson => {
                    estimate_risk(&Type3Access(NeymanPearson), &pair, config.n, config.trials, config.seed)?
                }
                DetectorKind::TypeTv => {
                    let det = TypeTvDetector::new(config.gamma, config.beta)?;
                    estimate_risk(&Type2Access(det), &pair, config.n, config.trials, config.seed)?
                }
            }
        }
        (flavor, DetectorKind::NeymanPearson) => {
            let problem = GeneralizedProblem {
                prior: config.prior.unwrap_or_else(|| JointPrior::default_for(flavor)),
                pair,
                n: config.n,
                m: config.m(),
                target: flavor,
            };
            let rule = ProbeLikelihoodRule::new(&problem.pair);
            estimate_generalized_risk(
                &rule,
                &problem,
                &SmoothedFrequencies::default(),
                config.trials,
                config.seed,
            )?
        }
        (flavor, kind) => {
            return Err(Error::Config(format!(
                "detector `{kind}` is not defined for flavor {flavor:?}"
            )));
        }
    };
    Ok(ExperimentResult {
        config_hash: config.hash(),
        detector: config.detector,
        flavor: config.flavor,
        risk,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{
        "detector": "np",
        "pair": {"p0": [0.5, 0.5], "pb": [1.0, 0.0]},
        "n": 2, "gamma": 0.5, "beta": 0.5, "trials": 2000, "seed": 3
    }"#;

    #[test]
    fn parses_with_defaults() {
        let cfg: ExperimentConfig = serde_json::from_str(DOC).unwrap();
        assert_eq!(cfg.flavor, TargetFunction::Mbd);
        assert_eq!(cfg.m(), 2);
        assert!(cfg.prior.is_none());
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn hash_changes_with_seed() {
        let a: ExperimentConfig = serde_json::from_str(DOC).unwrap();
        let mut b = a.clone();
        b.seed = 4;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn unknown_fields_rejected() {
        let doc = DOC.replace("\"n\": 2", "\"n\": 2, \"bogus\": 1");
        assert!(serde_json::from_str::<ExperimentConfig>(&doc).is_err());
    }

    #[test]
    fn runs_mbd_deterministically() {
        let cfg: ExperimentConfig = serde_json::from_str(DOC).unwrap();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.risk.contains(0.34375), "{:?}", a.risk);
    }

    #[test]
    fn generalized_flavors() {
        let mut cfg: ExperimentConfig = serde_json::from_str(DOC).unwrap();
        cfg.flavor = TargetFunction::Ood;
        assert!(run_experiment(&cfg).is_ok());
        cfg.detector = DetectorKind::TypeTv;
        assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));
        cfg.detector = DetectorKind::NeymanPearson;
        cfg.prior = Some(JointPrior::default_for(TargetFunction::Mbd));
        assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));
    }
}
