#![allow(dead_code)]

use backdoor_core::rng::Rng;
use backdoor_core::Categorical;
use rand::Rng as _;

/// Flat Dirichlet draw on `k` symbols.
pub fn random_categorical(rng: &mut Rng, k: usize) -> Categorical {
    let w: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    Categorical::new(w.into_iter().map(|x| x / s).collect()).unwrap()
}

/// Like [`random_categorical`] but zeroes each symbol with probability
/// `sparsity`, keeping at least one.
pub fn random_sparse_categorical(rng: &mut Rng, k: usize, sparsity: f64) -> Categorical {
    let keep = rng.random_range(0..k);
    let w: Vec<f64> = (0..k)
        .map(|i| {
            if i != keep && rng.random::<f64>() < sparsity {
                0.0
            } else {
                -(1.0 - rng.random::<f64>()).ln()
            }
        })
        .collect();
    let s: f64 = w.iter().sum();
    Categorical::new(w.into_iter().map(|x| x / s).collect()).unwrap()
}
