//! Detectors that threshold a total-variation distance involving the type of
//! the training data.

use super::{Type0Detector, Type1Detector, Type2Detector, Verdict};
use crate::dist::{compensated_sum, tv_to_type, Categorical, SymbolDataset};
use crate::error::{param, Error, Result};
use crate::harness::TrainedParams;

/// Slack on threshold comparisons so that exact ties survive rounding.
const TIE_SLACK: f64 = 1e-12;

fn check_gamma_beta(gamma: f64, beta: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(param("gamma", format!("{gamma} not in (0, 1]")));
    }
    if !(0.0..1.0).contains(&beta) {
        return Err(param("beta", format!("{beta} not in [0, 1)")));
    }
    Ok(())
}

/// Outputs 1 when `TV(P0, S_N) >= gamma (1 - beta) / 2`.
pub fn type2_tv(data: &SymbolDataset, p0: &Categorical, gamma: f64, beta: f64) -> Result<Verdict> {
    TypeTvDetector::new(gamma, beta)?.decide(data, p0)
}

/// The type-based Type-2 detector with threshold `gamma (1 - beta) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeTvDetector {
    gamma: f64,
    beta: f64,
}

impl TypeTvDetector {
    pub fn new(gamma: f64, beta: f64) -> Result<Self> {
        check_gamma_beta(gamma, beta)?;
        Ok(Self { gamma, beta })
    }

    pub fn threshold(&self) -> f64 {
        self.gamma * (1.0 - self.beta) / 2.0
    }

    pub fn decide(&self, data: &SymbolDataset, p0: &Categorical) -> Result<Verdict> {
        let tv = tv_to_type(p0, data)?;
        Ok(Verdict::from_bit(tv >= self.threshold() - TIE_SLACK))
    }
}

impl Type2Detector for TypeTvDetector {
    fn detect(&self, data: &SymbolDataset, p0: &Categorical, _seed: u64) -> Result<Verdict> {
        self.decide(data, p0)
    }
}

/// Total variation between the types of two datasets on one alphabet.
pub fn tv_between_types(a: &SymbolDataset, b: &SymbolDataset) -> Result<f64> {
    if a.alphabet_size() != b.alphabet_size() {
        return Err(Error::Dimension {
            left: a.alphabet_size(),
            right: b.alphabet_size(),
        });
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ca, cb) = (a.sparse_counts(), b.sparse_counts());
    let (mut i, mut j) = (0, 0);
    let mut diffs = Vec::with_capacity(ca.len() + cb.len());
    while i < ca.len() || j < cb.len() {
        let (xa, xb) = (ca.get(i).map(|c| c.0), cb.get(j).map(|c| c.0));
        match (xa, xb) {
            (Some(x), Some(y)) if x == y => {
                diffs.push((ca[i].1 as f64 / na - cb[j].1 as f64 / nb).abs());
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                diffs.push(ca[i].1 as f64 / na);
                i += 1;
            }
            (Some(_), None) => {
                diffs.push(ca[i].1 as f64 / na);
                i += 1;
            }
            _ => {
                diffs.push(cb[j].1 as f64 / nb);
                j += 1;
            }
        }
    }
    Ok((0.5 * compensated_sum(diffs)).clamp(0.0, 1.0))
}

/// Type-1 two-sample test: 1 when `TV(S_N(D), S_M(D')) >= threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypePairTvDetector {
    pub threshold: f64,
}

impl Type1Detector for TypePairTvDetector {
    fn detect(&self, data: &SymbolDataset, clean: &SymbolDataset, _seed: u64) -> Result<Verdict> {
        let tv = tv_between_types(data, clean)?;
        Ok(Verdict::from_bit(tv >= self.threshold - TIE_SLACK))
    }
}

/// Type-0 detector: compares the trained frequencies with the type of the
/// clean validation samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedTvDetector {
    pub threshold: f64,
}

impl Type0Detector for SmoothedTvDetector {
    fn detect(&self, model: &TrainedParams, clean: &SymbolDataset, _seed: u64) -> Result<Verdict> {
        let tv = tv_to_type(&model.frequencies, clean)?;
        Ok(Verdict::from_bit(tv >= self.threshold - TIE_SLACK))
    }
}
