//! Generalized risk `Pr{g'(A(D^(J)), D', X^(I)) != t(J, I)}` covering model
//! backdoor detection (MBD), sample backdoor detection (SBD) and OOD
//! detection.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{monte_carlo, RiskEstimate, TrainedParams, Trainer};
use crate::detectors::{bayes_labeling, Verdict};
use crate::dist::{sample, DistributionPair, SymbolDataset};
use crate::error::{param, Error, Result};
use crate::rng::{derive_seed, rng_from_seed, stream, Rng};

/// Which of `(j, i)` the detector must report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetFunction {
    /// `t(j, i) = j`: was the model trained on poisoned data?
    Mbd,
    /// `t(j, i) = i`: is this input backdoored?
    Sbd,
    /// `t(j, i) = i` with a clean model: is this input out of distribution?
    Ood,
}

impl TargetFunction {
    pub fn target(self, j: bool, i: bool) -> bool {
        match self {
            TargetFunction::Mbd => j,
            TargetFunction::Sbd | TargetFunction::Ood => i,
        }
    }

    /// Cells `(j, i)` that carry no meaning for the flavor and must have
    /// zero prior mass.
    fn excluded_cells(self) -> &'static [(usize, usize)] {
        match self {
            TargetFunction::Mbd => &[(0, 1), (1, 1)],
            TargetFunction::Sbd => &[(0, 1)],
            TargetFunction::Ood => &[(1, 0), (1, 1)],
        }
    }
}

/// Joint law `P_JI` of (model poisoned, sample backdoored).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 2]; 2]", into = "[[f64; 2]; 2]")]
pub struct JointPrior {
    cells: [[f64; 2]; 2],
}

impl JointPrior {
    /// `cells[j][i] = P_JI(j, i)`.
    pub fn new(cells: [[f64; 2]; 2]) -> Result<Self> {
        let flat = cells.iter().flatten();
        if flat.clone().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(param("prior", format!("{cells:?} has a negative or non-finite entry")));
        }
        let total: f64 = flat.sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(param("prior", format!("entries sum to {total}, expected 1")));
        }
        Ok(Self { cells })
    }

    /// The default prior of a flavor: equal mass on every admissible cell
    /// for MBD and OOD; for SBD half the mass on the clean cell and a
    /// quarter on each poisoned-model cell.
    pub fn default_for(target: TargetFunction) -> Self {
        let cells = match target {
            TargetFunction::Mbd => [[0.5, 0.0], [0.5, 0.0]],
            TargetFunction::Sbd => [[0.5, 0.0], [0.25, 0.25]],
            TargetFunction::Ood => [[0.5, 0.5], [0.0, 0.0]],
        };
        Self { cells }
    }

    pub fn prob(&self, j: bool, i: bool) -> f64 {
        self.cells[usize::from(j)][usize::from(i)]
    }

    /// `min{P_JI(0,0), P_JI(1,1)}`.
    pub fn sbd_r(&self) -> f64 {
        self.cells[0][0].min(self.cells[1][1])
    }

    pub fn check_flavor(&self, target: TargetFunction) -> Result<()> {
        for &(j, i) in target.excluded_cells() {
            if self.cells[j][i] != 0.0 {
                return Err(Error::Config(format!(
                    "{target:?} prior must put zero mass on (j={j}, i={i}), got {}",
                    self.cells[j][i]
                )));
            }
        }
        Ok(())
    }

    pub fn draw(&self, rng: &mut Rng) -> (bool, bool) {
        let u: f64 = rng.random();
        let order = [(false, false), (false, true), (true, false), (true, true)];
        let mut cum = 0.0;
        let mut last = order[0];
        for (j, i) in order {
            let p = self.prob(j, i);
            if p == 0.0 {
                continue;
            }
            cum += p;
            last = (j, i);
            if u < cum {
                return (j, i);
            }
        }
        last
    }
}

impl TryFrom<[[f64; 2]; 2]> for JointPrior {
    type Error = Error;

    fn try_from(cells: [[f64; 2]; 2]) -> Result<Self> {
        Self::new(cells)
    }
}

impl From<JointPrior> for [[f64; 2]; 2] {
    fn from(p: JointPrior) -> Self {
        p.cells
    }
}

/// A detector that sees trained parameters, clean samples and one probe
/// input `x`.
pub trait SampleDetector: Sync {
    fn detect(&self, model: &TrainedParams, clean: &SymbolDataset, probe: usize, seed: u64) -> Result<Verdict>;
}

impl<F> SampleDetector for F
where
    F: Fn(&TrainedParams, &SymbolDataset, usize, u64) -> Result<Verdict> + Sync,
{
    fn detect(&self, model: &TrainedParams, clean: &SymbolDataset, probe: usize, seed: u64) -> Result<Verdict> {
        self(model, clean, probe, seed)
    }
}

/// The equal-prior Bayes rule on the probe: 1 where `Pb(x) > P0(x)`.
#[derive(Debug, Clone)]
pub struct ProbeLikelihoodRule {
    labels: Vec<Verdict>,
}

impl ProbeLikelihoodRule {
    pub fn new(pair: &DistributionPair) -> Self {
        Self {
            labels: bayes_labeling(&pair.p0, &pair.pb),
        }
    }
}

impl SampleDetector for ProbeLikelihoodRule {
    fn detect(&self, _: &TrainedParams, _: &SymbolDataset, probe: usize, _: u64) -> Result<Verdict> {
        Ok(self.labels[probe])
    }
}

/// Everything that defines a generalized detection problem besides the
/// training algorithm.
#[derive(Debug, Clone)]
pub struct GeneralizedProblem {
    pub pair: DistributionPair,
    pub n: usize,
    pub m: usize,
    pub prior: JointPrior,
    pub target: TargetFunction,
}

/// Monte-Carlo estimate of the generalized risk.
pub fn estimate_generalized_risk<G: SampleDetector, T: Trainer>(
    detector: &G,
    problem: &GeneralizedProblem,
    trainer: &T,
    trials: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    problem.prior.check_flavor(problem.target)?;
    if problem.n == 0 || problem.m == 0 {
        return Err(param("n/m", "sample counts must be at least 1"));
    }
    let pair = &problem.pair;
    let p1 = pair.p1();
    monte_carlo(trials, seed, |s| {
        let (j, i) = problem.prior.draw(&mut rng_from_seed(derive_seed(s, stream::LABEL)));
        let law = if j { &p1 } else { &pair.p0 };
        let data = sample(law, problem.n, derive_seed(s, stream::TRAINING))?;
        let model = trainer.train(&data)?;
        let clean = sample(&pair.p0, problem.m, derive_seed(s, stream::CLEAN_SAMPLES))?;
        let probe_law = if i { &pair.pb } else { &pair.p0 };
        let probe = probe_law.draw(&mut rng_from_seed(derive_seed(s, stream::PROBE)));
        let verdict = detector.detect(&model, &clean, probe, derive_seed(s, stream::DETECTOR))?;
        Ok(verdict != Verdict::from_bit(problem.target.target(j, i)))
    })
}
