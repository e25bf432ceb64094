//! One-sample Kolmogorov-Smirnov test with the asymptotic p-value.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Outcome of a one-sample KS test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// `D_n = max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n)` over the order
/// statistics of `values`. The input need not be sorted.
pub fn ks_statistic<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> Result<f64> {
    if values.is_empty() {
        return Err(param("values", "KS statistic needs at least one value"));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(param("values", "NaN in sample"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0f64, f64::max);
    Ok(d.clamp(0.0, 1.0))
}

/// Asymptotic Kolmogorov tail `Q(λ) = 2 Σ_{k>=1} (-1)^(k-1) exp(-2 k² λ²)`
/// at `λ = (√n + 0.12 + 0.11/√n) D`.
///
/// The series is summed until a term drops below `1e-10`; if it has not
/// converged after 1000 terms, `λ` is so small that the tail is 1.
pub fn ks_pvalue(statistic: f64, n: usize) -> f64 {
    let sqrt_n = (n.max(1) as f64).sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic;
    let a = -2.0 * lambda * lambda;
    let mut sum = 0.0;
    let mut sign = 2.0;
    for k in 1..=1000u32 {
        let term = sign * (a * f64::from(k * k)).exp();
        sum += term;
        if term.abs() < 1e-10 {
            return sum.clamp(0.0, 1.0);
        }
        sign = -sign;
    }
    1.0
}

/// Runs the test of `values` against the continuous `cdf`.
pub fn ks_test<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> Result<KsResult> {
    let statistic = ks_statistic(values, cdf)?;
    Ok(KsResult {
        statistic,
        p_value: ks_pvalue(statistic, values.len()),
        n: values.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_cdf(x: f64) -> f64 {
        x.clamp(0.0, 1.0)
    }

    #[test]
    fn quantile_sample_has_small_gap() {
        for n in [1usize, 5, 50, 400] {
            let vals: Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
            let d = ks_statistic(&vals, uniform_cdf).unwrap();
            assert!(d <= 1.0 / (n + 1) as f64 + 1e-12, "n={n} d={d}");
        }
    }

    #[test]
    fn single_median_value() {
        assert_close!(ks_statistic(&[0.5], uniform_cdf).unwrap(), 0.5, 1e-15);
    }

    #[test]
    fn far_left_tail_gives_unit_gap() {
        let d = ks_statistic(&[-50.0, -40.0, -30.0], |x: f64| 1.0 / (1.0 + (-x).exp())).unwrap();
        assert_close!(d, 1.0, 1e-12);
    }

    #[test]
    fn unsorted_input_is_fine() {
        let a = ks_statistic(&[0.9, 0.1, 0.4], uniform_cdf).unwrap();
        let b = ks_statistic(&[0.1, 0.4, 0.9], uniform_cdf).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_empty_and_nan() {
        assert!(ks_statistic(&[], uniform_cdf).is_err());
        assert!(ks_statistic(&[f64::NAN], uniform_cdf).is_err());
    }

    #[test]
    fn pvalue_limits() {
        assert_eq!(ks_pvalue(0.0, 10), 1.0);
        assert!(ks_pvalue(1.0, 10_000) < 1e-100);
    }

    #[test]
    fn pvalue_at_unit_lambda() {
        // Alternating series at λ = 1, summed by hand to 1e-10:
        // 2 (e^-2 - e^-8 + e^-18 - ...) = 0.2699996716...
        let n = 100usize;
        let scale = 10.0 + 0.12 + 0.011;
        let p = ks_pvalue(1.0 / scale, n);
        assert_close!(p, 0.269_999_671_677_354_6, 1e-9);
        assert_close!(p, 0.2700, 5e-5);
    }
}
