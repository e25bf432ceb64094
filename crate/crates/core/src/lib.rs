//! Executable feasibility theory for backdoor detection on finite alphabets.
//!
//! The crate is organized around the objects of the detection problem:
//!
//! * [`dist`]: categorical distributions, datasets, empirical types and total
//!   variation, including an exact enumeration oracle for product measures.
//! * [`detectors`]: the detector hierarchy (Types 0 to 3), the
//!   Neyman-Pearson and type-threshold detectors, reduction adapters, the
//!   Kolmogorov-Smirnov primitive and the exact OOD-risk functional.
//! * [`bounds`]: closed-form impossibility and achievability bounds in
//!   log-space, plus the dataset alphabet catalog.
//! * [`adversary`]: the Gaussian projection toy attack and the random-subset
//!   construction that defeats any clean-distribution detector.
//! * [`harness`]: seeded, parallel Monte-Carlo risk estimation for every
//!   detector type and for the generalized (sample-level / OOD) risk.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#[cfg(test)]
macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b, tol): (f64, f64, f64) = ($a, $b, $tol);
        assert!((a - b).abs() <= tol, "{} != {} (tol {})", a, b, tol);
    }};
}

pub mod adversary;
pub mod bounds;
pub mod detectors;
pub mod dist;
pub mod error;
pub mod harness;
pub mod rng;

pub use dist::{
    empirical_type, mix, product_tv_exact, sample, tv_distance, Categorical, DistributionPair, EmpiricalType,
    SymbolDataset,
};
pub use error::{Error, Result};
pub use harness::RiskEstimate;
