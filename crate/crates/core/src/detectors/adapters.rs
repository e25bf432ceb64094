//! Reductions between detector types.
//!
//! A detector of a lower type can always be run with more information: a
//! Type-1 detector becomes Type 2 by sampling its clean validation set from
//! `P0`, and a Type-2 detector becomes Type 3 by ignoring `Pb`. Each adapter
//! has exactly the risk of the detector it wraps.

use super::{Type0Detector, Type1Detector, Type2Detector, Type3Detector, Verdict};
use crate::dist::{sample, Categorical, DistributionPair, SymbolDataset};
use crate::error::{param, Result};
use crate::harness::Trainer;
use crate::rng::{derive_seed, stream};

/// `g1(D, D') = g0(A(D), D')`.
#[derive(Debug, Clone)]
pub struct Type0AsType1<G, T> {
    inner: G,
    trainer: T,
}

pub fn adapt_type1_from_type0<G: Type0Detector, T: Trainer>(g0: G, trainer: T) -> Type0AsType1<G, T> {
    Type0AsType1 { inner: g0, trainer }
}

impl<G: Type0Detector, T: Trainer> Type1Detector for Type0AsType1<G, T> {
    fn detect(&self, data: &SymbolDataset, clean: &SymbolDataset, seed: u64) -> Result<Verdict> {
        let model = self.trainer.train(data)?;
        self.inner.detect(&model, clean, seed)
    }
}

/// `g2(D, P0) = g1(D, D')` with `D' ~ P0^m` drawn from the call's seed.
#[derive(Debug, Clone)]
pub struct Type1AsType2<G> {
    inner: G,
    m: usize,
}

pub fn adapt_type2_from_type1<G: Type1Detector>(g1: G, m: usize) -> Result<Type1AsType2<G>> {
    if m == 0 {
        return Err(param("m", "clean sample count must be at least 1"));
    }
    Ok(Type1AsType2 { inner: g1, m })
}

impl<G> Type1AsType2<G> {
    pub fn clean_samples(&self) -> usize {
        self.m
    }
}

impl<G: Type1Detector> Type2Detector for Type1AsType2<G> {
    fn detect(&self, data: &SymbolDataset, p0: &Categorical, seed: u64) -> Result<Verdict> {
        let clean = sample(p0, self.m, derive_seed(seed, stream::CLEAN_SAMPLES))?;
        self.inner.detect(data, &clean, derive_seed(seed, stream::DETECTOR))
    }
}

/// `g3(D, P0, Pb) = g2(D, P0)`.
#[derive(Debug, Clone)]
pub struct Type2AsType3<G> {
    inner: G,
}

pub fn adapt_type3_from_type2<G: Type2Detector>(g2: G) -> Type2AsType3<G> {
    Type2AsType3 { inner: g2 }
}

impl<G: Type2Detector> Type3Detector for Type2AsType3<G> {
    fn detect(&self, data: &SymbolDataset, pair: &DistributionPair, seed: u64) -> Result<Verdict> {
        self.inner.detect(data, &pair.p0, seed)
    }
}
