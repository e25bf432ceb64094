//! Shared fixtures for the benchmarks.

use backdoor_core::adversary::ToyConfig;
use backdoor_core::{Categorical, DistributionPair};

/// `P0` uniform on `k` symbols, `Pb` uniform on the first half.
pub fn half_support_pair(k: usize, gamma: f64) -> DistributionPair {
    let p0 = Categorical::uniform(k).unwrap();
    let pb = Categorical::uniform_on(k, 0..k.div_ceil(2)).unwrap();
    let beta = 1.0 - backdoor_core::tv_distance(&p0, &pb).unwrap();
    DistributionPair::new(p0, pb, gamma, beta).unwrap()
}

/// The two-dimensional toy configuration with `v` normalized.
pub fn toy_config(n: usize) -> ToyConfig {
    let raw = [0.981f64, 0.196];
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    ToyConfig::new(raw.iter().map(|x| x / norm).collect(), 0.5, 0.5, n).unwrap()
}
