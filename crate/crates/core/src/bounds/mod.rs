//! Closed-form feasibility bounds.
//!
//! All logarithms inside the bounds are natural; base 10 is used only for
//! storage ([`LogNumber`]) and reporting.

mod catalog;
mod lognum;

use serde::{Deserialize, Serialize};

pub use catalog::{alphabet_log10, bundled_catalog, bundled_catalog_json, parse_catalog, AlphabetSpec, DatasetSpec};
pub use lognum::LogNumber;

use crate::dist::{product_tv_exact, Categorical, DistributionPair};
use crate::error::{param, Result};

/// Smallest `N` solving `N² + N ln(t) - (β|X| - 1) ln(1/t) >= 0` for a
/// threshold ratio `t < 1`, written with `c = ln(1/t) > 0` as
/// `N = -c/2 + sqrt(c²/4 + B)`, `B = (β|X| - 1) c`.
///
/// The root is evaluated as `B / (sqrt(c²/4 + B) + c/2)`, which has no
/// cancellation and works entirely in log-space.
fn quadratic_min_n(c: f64, beta: f64, log_alphabet: LogNumber) -> LogNumber {
    if !(c > 0.0) {
        return LogNumber::ZERO;
    }
    let beta_ln = match LogNumber::from_f64(beta) {
        Ok(b) => b,
        Err(_) => return LogNumber::ZERO,
    };
    let backdoor_support = beta_ln * log_alphabet;
    let Some(excess) = backdoor_support.checked_sub(LogNumber::ONE) else {
        return LogNumber::ZERO;
    };
    if excess.is_zero() {
        return LogNumber::ZERO;
    }
    let c = LogNumber::from_f64(c).expect("c > 0");
    let half_c = c / LogNumber::from_f64(2.0).expect("two");
    let b = excess * c;
    let root = (half_c * half_c + b).sqrt();
    b / (root + half_c)
}

/// Minimum training-set size for an `alpha`-error Type-2 detector to exist
/// against every pair with `TV(P0, Pb) >= 1 - beta`:
///
/// `N >= ln(2α)/2 + sqrt(ln(2α)²/4 + (β|X| - 1) ln(1/(2α)))`.
///
/// Regimes where the construction behind the bound is empty
/// (`β|X| <= 1`, which also covers a negative discriminant) give zero.
pub fn impossibility_min_n(alpha: f64, beta: f64, log_alphabet: LogNumber) -> Result<LogNumber> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(param("alpha", format!("{alpha} not in (0, 0.5]")));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(param("beta", format!("{beta} not in [0, 1]")));
    }
    Ok(quadratic_min_n(-(2.0 * alpha).ln(), beta, log_alphabet))
}

/// Sample-level (SBD) analogue of [`impossibility_min_n`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbdBound {
    pub min_n: LogNumber,
    /// For an infinite alphabet an `alpha`-error detector needs `alpha >= r`.
    pub infinite_alphabet_feasible: bool,
}

/// `N >= ln(α/r)/2 + sqrt(ln(α/r)²/4 + (β|X| - 1) ln(r/α))` with
/// `r = min{P_JI(0,0), P_JI(1,1)}`.
pub fn sbd_min_n(alpha: f64, beta: f64, r: f64, log_alphabet: LogNumber) -> Result<SbdBound> {
    if !(r > 0.0 && r <= 0.5) {
        return Err(param("r", format!("{r} not in (0, 0.5]")));
    }
    if !(alpha > 0.0) {
        return Err(param("alpha", format!("{alpha} must be positive")));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(param("beta", format!("{beta} not in [0, 1]")));
    }
    Ok(SbdBound {
        min_n: quadratic_min_n((r / alpha).ln(), beta, log_alphabet),
        infinite_alphabet_feasible: alpha >= r,
    })
}

/// `2K exp(-2 N γ² (1-β)² / K²)`: any `alpha` strictly above this admits a
/// Type-2 detector.
pub fn achievability_alpha_bound(n: usize, gamma: f64, beta: f64, k: usize) -> Result<f64> {
    if n == 0 || k == 0 {
        return Err(param("n/k", "sample count and alphabet size must be at least 1"));
    }
    if !(0.0..=1.0).contains(&gamma) || !(0.0..=1.0).contains(&beta) {
        return Err(param(
            "gamma/beta",
            format!("gamma={gamma}, beta={beta} must lie in [0, 1]"),
        ));
    }
    let k = k as f64;
    let sep = gamma * (1.0 - beta);
    Ok(2.0 * k * (-2.0 * n as f64 * sep * sep / (k * k)).exp())
}

/// `max(0, ½ - γ N TV(P0, Pb) / 2)`, the floor on any Type-3 risk.
pub fn type3_risk_floor(gamma: f64, n: usize, tv: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&tv) {
        return Err(param("tv", format!("{tv} not in [0, 1]")));
    }
    Ok((0.5 - gamma * n as f64 * tv / 2.0).max(0.0))
}

/// `½ - ½ TV(P0^N, P1^N)`, the risk of the Neyman-Pearson detector.
pub fn exact_type3_risk(pair: &DistributionPair, n: usize) -> Result<f64> {
    Ok(0.5 - 0.5 * product_tv_exact(&pair.p0, &pair.p1(), n)?)
}

/// Two nested uniform distributions that are nearly indistinguishable:
/// `P0 = U{0..m}` and `Pb = U{1..m}` with `m = floor(γN / 2ε)`, so that
/// `TV(P0, Pb) = 1/(m+1) <= 2ε/(γN)`.
///
/// The returned pair has `beta = 1 - TV`, the tightest family containing it.
pub fn example_ineq_pair(gamma: f64, n: usize, epsilon: f64) -> Result<DistributionPair> {
    if !(epsilon > 0.0) {
        return Err(param("epsilon", format!("{epsilon} must be positive")));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(param("gamma", format!("{gamma} not in (0, 1]")));
    }
    let top = (gamma * n as f64 / (2.0 * epsilon)).floor();
    if top < 1.0 {
        return Err(param(
            "epsilon",
            format!("support {{0..{top}}} has fewer than 2 symbols"),
        ));
    }
    if top > 1e8 {
        return Err(param(
            "epsilon",
            format!("support of {top} symbols is too large to materialize"),
        ));
    }
    let k = top as usize + 1;
    let p0 = Categorical::uniform(k)?;
    let pb = Categorical::uniform_on(k, 1..k)?;
    let tv = crate::dist::tv_distance(&p0, &pb)?;
    debug_assert!(tv <= 2.0 * epsilon / (gamma * n as f64) + 1e-12);
    DistributionPair::new(p0, pb, gamma, (1.0 - tv).clamp(0.0, 1.0))
}

/// One row of the dataset feasibility table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub log10_alphabet: f64,
    /// `max(0, log10 N_min)`; zero when no samples are required.
    pub log10_min_n: f64,
    /// `floor(log10 N_min)`, the exponent `k` in `N >= 10^k`.
    pub exponent: u64,
}

/// Evaluates [`impossibility_min_n`] for every dataset in `catalog`.
pub fn table2_report(alpha: f64, beta: f64, catalog: &[DatasetSpec]) -> Result<Vec<BoundReport>> {
    catalog
        .iter()
        .map(|spec| {
            let log_alphabet = alphabet_log10(spec)?;
            let min_n = impossibility_min_n(alpha, beta, log_alphabet)?;
            Ok(BoundReport {
                name: spec.name.clone(),
                log10_alphabet: log_alphabet.log10(),
                log10_min_n: if min_n.is_zero() { 0.0 } else { min_n.log10().max(0.0) },
                exponent: min_n.exponent(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::tv_distance;
    use proptest::prelude::*;

    fn lx(log10: f64) -> LogNumber {
        LogNumber::from_log10(log10).unwrap()
    }

    /// Direct float evaluation of the quadratic root, for small alphabets.
    fn direct(log_ratio: f64, beta: f64, alphabet: f64) -> f64 {
        let disc = log_ratio * log_ratio / 4.0 + (beta * alphabet - 1.0) * (-log_ratio);
        if disc < 0.0 {
            return 0.0;
        }
        (log_ratio / 2.0 + disc.sqrt()).max(0.0)
    }

    #[test]
    fn half_error_needs_no_samples() {
        for beta in [0.0, 0.001, 0.5, 1.0] {
            assert!(impossibility_min_n(0.5, beta, lx(3697.0)).unwrap().is_zero());
        }
    }

    #[test]
    fn reference_image_datasets() {
        let cifar = impossibility_min_n(0.1, 0.001, lx(3072.0 * 256f64.log10())).unwrap();
        assert_eq!(cifar.exponent(), 3697);
        let mnist = impossibility_min_n(0.1, 0.001, lx(784.0 * 256f64.log10())).unwrap();
        assert_eq!(mnist.exponent(), 942);
    }

    #[test]
    fn alpha_validation() {
        assert!(impossibility_min_n(0.0, 0.1, lx(3.0)).is_err());
        assert!(impossibility_min_n(-0.1, 0.1, lx(3.0)).is_err());
        assert!(impossibility_min_n(0.6, 0.1, lx(3.0)).is_err());
    }

    #[test]
    fn beta_zero_clamps() {
        // Discriminant ln(2α)²/4 - ln(1/2α) is negative for α in (e^-4/2, ½).
        assert!(impossibility_min_n(0.1, 0.0, lx(10.0)).unwrap().is_zero());
        assert!(impossibility_min_n(1e-5, 0.0, lx(10.0)).unwrap().is_zero());
    }

    #[test]
    fn approaches_backdoor_support_as_alpha_vanishes() {
        // N -> β|X| - 1 as α -> 0; with β|X| = 10 the root at α = 1e-300
        // is within 2% of 9.
        let mut prev = 0.0;
        for alpha in [0.4, 0.1, 1e-3, 1e-10, 1e-50, 1e-300] {
            let n = impossibility_min_n(alpha, 0.01, lx(3.0)).unwrap().to_f64();
            assert!(n > prev);
            assert!(n < 9.0);
            prev = n;
        }
        assert!((prev - 9.0).abs() / 9.0 < 0.02);
    }

    #[test]
    fn achievability_examples() {
        assert_eq!(achievability_alpha_bound(10, 0.0, 0.2, 7).unwrap(), 14.0);
        assert_eq!(achievability_alpha_bound(10, 0.7, 1.0, 7).unwrap(), 14.0);
        // 4 e^-50.
        let v = achievability_alpha_bound(100, 1.0, 0.0, 2).unwrap();
        assert!((v - 7.714_999_391_855_671e-22).abs() / v < 1e-12);
        assert!(achievability_alpha_bound(0, 1.0, 0.0, 2).is_err());
    }

    #[test]
    fn risk_floor_examples() {
        assert_eq!(type3_risk_floor(0.7, 9, 0.0).unwrap(), 0.5);
        assert_eq!(type3_risk_floor(0.5, 4, 0.5).unwrap(), 0.0);
        assert_close!(type3_risk_floor(0.1, 2, 1.0).unwrap(), 0.4, 1e-15);
        assert!(type3_risk_floor(0.1, 2, 1.5).is_err());
    }

    #[test]
    fn exact_risk_examples() {
        let u = Categorical::uniform(2).unwrap();
        let d0 = Categorical::point_mass(2, 0).unwrap();
        let d1 = Categorical::point_mass(2, 1).unwrap();
        let same = DistributionPair::new(u.clone(), u.clone(), 0.5, 0.0).unwrap();
        assert_close!(exact_type3_risk(&same, 3).unwrap(), 0.5, 1e-15);
        let disjoint = DistributionPair::new(d0.clone(), d1, 1.0, 0.0).unwrap();
        for n in 1..5 {
            assert_close!(exact_type3_risk(&disjoint, n).unwrap(), 0.0, 1e-15);
        }
        let p = DistributionPair::new(u, d0, 0.5, 0.5).unwrap();
        assert_close!(exact_type3_risk(&p, 2).unwrap(), 0.34375, 1e-15);
    }

    #[test]
    fn sbd_examples() {
        let x = lx(6.0);
        let at_r = sbd_min_n(0.25, 0.001, 0.25, x).unwrap();
        assert!(at_r.min_n.is_zero());
        assert!(at_r.infinite_alphabet_feasible);
        for alpha in [0.01, 0.1, 0.3, 0.5] {
            let a = sbd_min_n(alpha, 0.001, 0.5, x).unwrap().min_n;
            let b = impossibility_min_n(alpha, 0.001, x).unwrap();
            assert_eq!(a, b);
        }
        let s = sbd_min_n(0.1, 0.001, 0.25, x).unwrap();
        assert!(!s.infinite_alphabet_feasible);
        let expected = direct((0.1f64 / 0.25).ln(), 0.001, 1e6);
        assert!((s.min_n.to_f64() - expected).abs() / expected < 1e-9);
        assert!(sbd_min_n(0.1, 0.001, 0.0, x).is_err());
    }

    #[test]
    fn ineq_pair_examples() {
        let p = example_ineq_pair(1.0, 10, 0.25).unwrap();
        assert_eq!(p.alphabet_size(), 21);
        assert_eq!(p.pb.prob(0), 0.0);
        let tv = tv_distance(&p.p0, &p.pb).unwrap();
        assert_close!(tv, 1.0 / 21.0, 1e-14);
        assert!(tv <= 0.05);
        assert!(type3_risk_floor(1.0, 10, tv).unwrap() >= 0.5 - 0.25);

        let p = example_ineq_pair(1.0, 2, 0.5).unwrap();
        assert_eq!(p.alphabet_size(), 3);
        assert_close!(tv_distance(&p.p0, &p.pb).unwrap(), 1.0 / 3.0, 1e-15);
        assert!(example_ineq_pair(1.0, 2, 1.5).is_err());
        assert!(example_ineq_pair(1.0, 2, 0.0).is_err());
    }

    #[test]
    fn table2_rows() {
        let rows = table2_report(0.1, 0.001, &bundled_catalog()).unwrap();
        let exps: Vec<u64> = rows.iter().map(|r| r.exponent).collect();
        assert_eq!(exps, vec![369_904, 181_252, 3697, 942, 116, 9, 5, 1]);
        let half = table2_report(0.5, 0.001, &bundled_catalog()).unwrap();
        assert!(half.iter().all(|r| r.exponent == 0 && r.log10_min_n == 0.0));
    }

    proptest! {
        #[test]
        fn log_path_matches_floats(alpha in 1e-6f64..0.5, beta in 0.0f64..1.0, log_k in 0.0f64..12.0) {
            // Near beta*K = 1 both paths subtract nearly equal numbers and
            // lose the digits this comparison asks for.
            let excess = beta * 10f64.powf(log_k) - 1.0;
            prop_assume!(!(excess > 0.0 && excess < 1e-3));
            let got = impossibility_min_n(alpha, beta, lx(log_k)).unwrap().to_f64();
            let want = direct((2.0 * alpha).ln(), beta, 10f64.powf(log_k));
            if want == 0.0 {
                prop_assert!(got == 0.0 || got < 1e-9);
            } else {
                prop_assert!((got - want).abs() / want < 1e-9, "got {} want {}", got, want);
            }
        }

        #[test]
        fn monotone_in_alpha_and_support(a1 in 1e-6f64..0.5, a2 in 1e-6f64..0.5, l1 in 0.0f64..5000.0, l2 in 0.0f64..5000.0) {
            let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
            let x = lx(l1);
            prop_assert!(impossibility_min_n(lo, 0.01, x).unwrap() >= impossibility_min_n(hi, 0.01, x).unwrap());
            let (small, big) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
            prop_assert!(impossibility_min_n(a1, 0.01, lx(big)).unwrap() >= impossibility_min_n(a1, 0.01, lx(small)).unwrap());
        }
    }
}
