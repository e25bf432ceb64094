//! Attacker constructions.

mod impossibility;
mod toy;

pub use impossibility::{collision_detector, imposs_floor, imposs_probe, imposs_sampler, ImpossibilityConfig};
pub use toy::{
    median, projection, summarize, toy_attack_report, toy_backdoor, toy_delta, toy_ensemble, toy_ks_defense,
    toy_poison, toy_run, toy_sample_clean, toy_train_classifier, AttackReport, EnsembleSummary, LabeledSample,
    LinearClassifier, ToyConfig, ToyRun, EVAL_SAMPLES, UNIT_TOLERANCE,
};
