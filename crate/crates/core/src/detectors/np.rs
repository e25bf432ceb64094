use super::{Type3Detector, Verdict};
use crate::dist::{Categorical, DistributionPair, SymbolDataset};
use crate::error::{Error, Result};

/// `Σ_n ln p1(x_n) - ln p0(x_n)`.
///
/// Symbols with zero mass under exactly one hypothesis contribute `±∞`
/// without evaluating `ln 0`. If both signs of infinity occur the dataset is
/// impossible under both hypotheses and the result is `+∞`, matching the
/// tie-goes-to-backdoor convention of [`np_type3`].
pub fn log_likelihood_ratio(data: &SymbolDataset, p0: &Categorical, p1: &Categorical) -> Result<f64> {
    p0.check_same_alphabet(p1)?;
    if data.alphabet_size() != p0.alphabet_size() {
        return Err(Error::Dimension {
            left: data.alphabet_size(),
            right: p0.alphabet_size(),
        });
    }
    let mut finite = 0.0;
    let mut plus_inf = false;
    let mut minus_inf = false;
    for &x in data.symbols() {
        match (p0.prob(x) > 0.0, p1.prob(x) > 0.0) {
            (true, true) => finite += p1.prob(x).ln() - p0.prob(x).ln(),
            (false, true) => plus_inf = true,
            (true, false) => minus_inf = true,
            (false, false) => return Err(Error::ImpossibleSample { symbol: x }),
        }
    }
    Ok(if plus_inf {
        f64::INFINITY
    } else if minus_inf {
        f64::NEG_INFINITY
    } else {
        finite
    })
}

/// The likelihood-ratio test `1{dP1^N/dP0^N (D) >= 1}`.
pub fn np_type3(data: &SymbolDataset, pair: &DistributionPair) -> Result<Verdict> {
    let llr = log_likelihood_ratio(data, &pair.p0, &pair.p1())?;
    Ok(Verdict::from_bit(llr >= 0.0))
}

/// Risk-optimal Type-3 detector.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeymanPearson;

impl Type3Detector for NeymanPearson {
    fn detect(&self, data: &SymbolDataset, pair: &DistributionPair, _seed: u64) -> Result<Verdict> {
        np_type3(data, pair)
    }
}
