use super::Verdict;
use crate::dist::{compensated_sum, Categorical};
use crate::error::Result;

/// Exact OOD-risk `½ Pr{f(X0) = 1} + ½ Pr{f(Xb) = 0}` of a labeling `f`
/// with `X0 ~ p0` and `Xb ~ pb`.
pub fn ood_risk_exact<F: Fn(usize) -> Verdict>(f: F, p0: &Categorical, pb: &Categorical) -> Result<f64> {
    p0.check_same_alphabet(pb)?;
    let terms = (0..p0.alphabet_size()).map(|x| match f(x) {
        Verdict::Backdoored => 0.5 * p0.prob(x),
        Verdict::Clean => 0.5 * pb.prob(x),
    });
    Ok(compensated_sum(terms))
}

/// The Bayes labeling for equal priors: 1 where `pb(x) > p0(x)`.
pub fn bayes_labeling(p0: &Categorical, pb: &Categorical) -> Vec<Verdict> {
    p0.probs()
        .iter()
        .zip(pb.probs())
        .map(|(a, b)| Verdict::from_bit(b > a))
        .collect()
}
