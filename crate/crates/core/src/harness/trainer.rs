use crate::dist::{Categorical, SymbolDataset};
use crate::error::{param, Result};

/// Parameters produced by a training algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedParams {
    pub frequencies: Categorical,
}

/// A deterministic training algorithm `θ = A(D)`.
pub trait Trainer: Sync {
    fn train(&self, data: &SymbolDataset) -> Result<TrainedParams>;
}

/// Additive smoothing: `θ(x) = (count(x) + c) / (N + cK)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedFrequencies {
    pub smoothing: f64,
}

impl Default for SmoothedFrequencies {
    fn default() -> Self {
        Self { smoothing: 1.0 }
    }
}

impl Trainer for SmoothedFrequencies {
    fn train(&self, data: &SymbolDataset) -> Result<TrainedParams> {
        if !(self.smoothing >= 0.0) || !self.smoothing.is_finite() {
            return Err(param(
                "smoothing",
                format!("{} must be a finite value >= 0", self.smoothing),
            ));
        }
        let k = data.alphabet_size();
        let denom = data.len() as f64 + self.smoothing * k as f64;
        let mut probs = vec![self.smoothing / denom; k];
        for (x, c) in data.sparse_counts() {
            probs[x] = (c as f64 + self.smoothing) / denom;
        }
        Ok(TrainedParams {
            frequencies: Categorical::new(probs)?,
        })
    }
}
