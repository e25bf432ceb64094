//! The detector hierarchy.
//!
//! A detector receives progressively more information as its type grows:
//!
//! | Type | Input |
//! |------|-------|
//! | 0 | trained parameters and `M` clean validation samples |
//! | 1 | the raw training dataset and `M` clean validation samples |
//! | 2 | the training dataset and the clean distribution `P0` |
//! | 3 | the training dataset, `P0` and the backdoor distribution `Pb` |
//!
//! Every detector also receives a 64-bit seed and must be a pure function of
//! its inputs and that seed. Randomized detectors (for example the adapters
//! that sample clean data on the fly) draw all their randomness from it.
//!
//! Verdict polarity is fixed crate-wide: [`Verdict::Backdoored`] (bit 1)
//! claims the data came from the poisoned mixture `P1`.

mod adapters;
mod ks;
mod np;
mod ood;
mod type_tv;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use adapters::{
    adapt_type1_from_type0, adapt_type2_from_type1, adapt_type3_from_type2, Type0AsType1, Type1AsType2, Type2AsType3,
};
pub use ks::{ks_pvalue, ks_statistic, ks_test, KsResult};
pub use np::{log_likelihood_ratio, np_type3, NeymanPearson};
pub use ood::{bayes_labeling, ood_risk_exact};
pub use type_tv::{tv_between_types, type2_tv, SmoothedTvDetector, TypePairTvDetector, TypeTvDetector};

use crate::dist::{Categorical, DistributionPair, SymbolDataset};
use crate::error::{Error, Result};
use crate::harness::TrainedParams;

/// Binary decision of a detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Verdict {
    Clean,
    Backdoored,
}

impl Verdict {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Verdict::Backdoored
        } else {
            Verdict::Clean
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Verdict::Clean => 0,
            Verdict::Backdoored => 1,
        }
    }
}

impl From<Verdict> for u8 {
    fn from(v: Verdict) -> u8 {
        v.bit()
    }
}

impl TryFrom<u8> for Verdict {
    type Error = Error;

    fn try_from(bit: u8) -> Result<Self> {
        match bit {
            0 => Ok(Verdict::Clean),
            1 => Ok(Verdict::Backdoored),
            other => Err(crate::error::param("verdict", format!("{other} is not binary"))),
        }
    }
}

/// Sees only the trained parameters and clean validation samples.
pub trait Type0Detector: Sync {
    fn detect(&self, model: &TrainedParams, clean: &SymbolDataset, seed: u64) -> Result<Verdict>;
}

/// Sees the training dataset and clean validation samples.
pub trait Type1Detector: Sync {
    fn detect(&self, data: &SymbolDataset, clean: &SymbolDataset, seed: u64) -> Result<Verdict>;
}

/// Sees the training dataset and the clean distribution.
pub trait Type2Detector: Sync {
    fn detect(&self, data: &SymbolDataset, p0: &Categorical, seed: u64) -> Result<Verdict>;
}

/// Sees the training dataset, both distributions and the poisoning rate.
pub trait Type3Detector: Sync {
    fn detect(&self, data: &SymbolDataset, pair: &DistributionPair, seed: u64) -> Result<Verdict>;
}

impl<F> Type0Detector for F
where
    F: Fn(&TrainedParams, &SymbolDataset, u64) -> Result<Verdict> + Sync,
{
    fn detect(&self, model: &TrainedParams, clean: &SymbolDataset, seed: u64) -> Result<Verdict> {
        self(model, clean, seed)
    }
}

impl<F> Type1Detector for F
where
    F: Fn(&SymbolDataset, &SymbolDataset, u64) -> Result<Verdict> + Sync,
{
    fn detect(&self, data: &SymbolDataset, clean: &SymbolDataset, seed: u64) -> Result<Verdict> {
        self(data, clean, seed)
    }
}

impl<F> Type2Detector for F
where
    F: Fn(&SymbolDataset, &Categorical, u64) -> Result<Verdict> + Sync,
{
    fn detect(&self, data: &SymbolDataset, p0: &Categorical, seed: u64) -> Result<Verdict> {
        self(data, p0, seed)
    }
}

impl<F> Type3Detector for F
where
    F: Fn(&SymbolDataset, &DistributionPair, u64) -> Result<Verdict> + Sync,
{
    fn detect(&self, data: &SymbolDataset, pair: &DistributionPair, seed: u64) -> Result<Verdict> {
        self(data, pair, seed)
    }
}

/// Detectors addressable by name from the command line and config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectorKind {
    #[serde(rename = "np")]
    NeymanPearson,
    #[serde(rename = "type2-tv")]
    TypeTv,
}

impl DetectorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DetectorKind::NeymanPearson => "np",
            DetectorKind::TypeTv => "type2-tv",
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "np" => Ok(DetectorKind::NeymanPearson),
            "type2-tv" => Ok(DetectorKind::TypeTv),
            other => Err(Error::Config(format!(
                "unknown detector `{other}` (expected `np` or `type2-tv`)"
            ))),
        }
    }
}
