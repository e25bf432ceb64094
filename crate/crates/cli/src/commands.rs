use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use backdoor_core::adversary::{
    collision_detector, imposs_floor, imposs_probe, projection, summarize, toy_ensemble, toy_run, ImpossibilityConfig,
    ToyConfig, UNIT_TOLERANCE,
};
use backdoor_core::bounds::{bundled_catalog, parse_catalog, table2_report, BoundReport};
use backdoor_core::detectors::{DetectorKind, NeymanPearson, TypeTvDetector};
use backdoor_core::dist::{product_tv_exact_capped, tv_distance};
use backdoor_core::harness::{estimate_risk, run_experiment, ExperimentConfig, Type2Access, Type3Access};
use backdoor_core::{Categorical, DistributionPair, RiskEstimate};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Format, ProbeArgs, ProbeDetector, RiskArgs, Table2Args, ToyArgs};
use crate::plot;
use crate::record::hash_json;

/// What a subcommand produced: text for stdout, plus the record payload
/// and the hash identifying its configuration.
pub struct Outcome {
    pub stdout: String,
    pub payload: Value,
    pub config_hash: String,
}

impl Outcome {
    fn new(command: &str, config: &impl Serialize, stdout: String, payload: Value) -> Self {
        let config = json!({"command": command, "config": config});
        Self {
            stdout,
            payload,
            config_hash: hash_json(&config),
        }
    }
}

fn json_line(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string(value).expect("json values serialize");
    s.push('\n');
    s
}

pub fn bounds_table2(args: &Table2Args) -> anyhow::Result<Outcome> {
    let catalog = match &args.catalog {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read catalog {}", path.display()))?;
            parse_catalog(&text)?
        }
        None => bundled_catalog(),
    };
    let report = table2_report(args.alpha, args.beta, &catalog)?;
    let stdout = match args.format {
        Format::Csv => to_csv(&report)?,
        Format::Json => json_line(&report),
    };
    let config = json!({
        "alpha": args.alpha,
        "beta": args.beta,
        "catalog": catalog,
    });
    Ok(Outcome::new(
        "bounds table2",
        &config,
        stdout,
        serde_json::to_value(&report)?,
    ))
}

fn to_csv(report: &[BoundReport]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in report {
        w.serialize(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// `P0` uniform on `k` symbols and `Pb` uniform on the first `⌈k/2⌉`.
pub fn benchmark_pair(k: usize) -> anyhow::Result<(Categorical, Categorical)> {
    if k < 2 {
        bail!(backdoor_core::Error::Config(format!(
            "benchmark pair needs k >= 2, got {k}"
        )));
    }
    Ok((Categorical::uniform(k)?, Categorical::uniform_on(k, 0..k.div_ceil(2))?))
}

#[derive(Serialize)]
struct RiskRecord {
    detector: DetectorKind,
    k: usize,
    n: usize,
    gamma: f64,
    beta: f64,
    trials: usize,
    seed: u64,
    risk: RiskEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<f64>,
}

pub fn risk(args: &RiskArgs) -> anyhow::Result<Outcome> {
    let (p0, pb, file_gamma, file_beta) = match &args.pair {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read pair {}", path.display()))?;
            let pair: DistributionPair =
                serde_json::from_str(&text).with_context(|| format!("invalid pair file {}", path.display()))?;
            (pair.p0, pair.pb, Some(pair.gamma), Some(pair.beta))
        }
        None => {
            let (p0, pb) = benchmark_pair(args.k)?;
            (p0, pb, None, None)
        }
    };
    let gamma = args.gamma.or(file_gamma).unwrap_or(0.5);
    let beta = match args.beta.or(file_beta) {
        Some(b) => b,
        None => (1.0 - tv_distance(&p0, &pb)?).max(0.0),
    };
    let pair = DistributionPair::new(p0, pb, gamma, beta)?;
    // Check the enumeration budget before spending time on trials.
    let exact = if args.oracle {
        let tv = product_tv_exact_capped(&pair.p0, &pair.p1(), args.n, args.cap)?;
        Some(0.5 - 0.5 * tv)
    } else {
        None
    };
    let estimate = match args.detector {
        DetectorKind::NeymanPearson => {
            estimate_risk(&Type3Access(NeymanPearson), &pair, args.n, args.trials, args.seed)?
        }
        DetectorKind::TypeTv => {
            let det = TypeTvDetector::new(gamma, beta)?;
            estimate_risk(&Type2Access(det), &pair, args.n, args.trials, args.seed)?
        }
    };
    let record = RiskRecord {
        detector: args.detector,
        k: pair.alphabet_size(),
        n: args.n,
        gamma,
        beta,
        trials: args.trials,
        seed: args.seed,
        risk: estimate,
        exact,
        gap: exact.map(|e| estimate.p_hat - e),
    };
    let config = json!({
        "detector": args.detector,
        "p0": pair.p0,
        "pb": pair.pb,
        "gamma": gamma,
        "beta": beta,
        "n": args.n,
        "trials": args.trials,
        "seed": args.seed,
        "oracle": args.oracle,
    });
    Ok(Outcome::new(
        "risk",
        &config,
        json_line(&record),
        serde_json::to_value(&record)?,
    ))
}

/// Returns `v / ‖v‖` and whether normalization changed it.
pub fn normalize(v: &[f64]) -> anyhow::Result<(Vec<f64>, bool)> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        bail!(backdoor_core::Error::Config(format!("--v {v:?} has no direction")));
    }
    if (norm - 1.0).abs() <= UNIT_TOLERANCE {
        Ok((v.to_vec(), false))
    } else {
        Ok((v.iter().map(|x| x / norm).collect(), true))
    }
}

pub fn toy(args: &ToyArgs) -> anyhow::Result<Outcome> {
    let (v, changed) = normalize(&args.v)?;
    if changed {
        eprintln!("warning: --v normalized to unit length: {v:?}");
    }
    if args.seeds == 0 {
        bail!(backdoor_core::Error::Config("--seeds must be at least 1".into()));
    }
    let config = ToyConfig::new(v, args.sigma, args.gamma, args.n)?;
    let reports = toy_ensemble(&config, args.seed, args.seeds)?;
    let mut stdout: String = reports.iter().map(json_line).collect();
    let mut payload = json!({"config": config, "reports": reports});
    if args.seeds > 1 {
        let summary = summarize(&reports)?;
        stdout.push_str(&json_line(&SummaryLine { summary: &summary }));
        payload["summary"] = serde_json::to_value(&summary)?;
    }
    if args.svg.is_some() || args.csv.is_some() {
        let run = toy_run(&config, args.seed)?;
        if let Some(path) = &args.svg {
            write(path, plot::toy_figure(&run, &config))?;
        }
        if let Some(path) = &args.csv {
            write(path, samples_csv(&run, &config)?)?;
        }
    }
    let hashed = json!({"config": config, "first_seed": args.seed, "seeds": args.seeds});
    Ok(Outcome::new("toy", &hashed, stdout, payload))
}

fn write(path: &Path, content: String) -> anyhow::Result<()> {
    fs::write(path, content).with_context(|| format!("cannot write {}", path.display()))
}

fn samples_csv(run: &backdoor_core::adversary::ToyRun, config: &ToyConfig) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["set".to_string(), "index".into(), "y".into()];
    header.extend((1..=config.dims()).map(|i| format!("z{i}")));
    header.extend(["projection".into(), "backdoored".into()]);
    w.write_record(&header)?;
    for (set, data) in [("clean", &run.clean), ("poisoned", &run.poisoned)] {
        for (i, (s, c)) in data.iter().zip(&run.clean).enumerate() {
            let mut row = vec![set.to_string(), i.to_string(), s.y.to_string()];
            row.extend(s.z.iter().map(|z| z.to_string()));
            row.push(projection(s, config).to_string());
            row.push(u8::from(s.y != c.y).to_string());
            w.write_record(&row)?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[derive(Serialize)]
struct SummaryLine<'a> {
    summary: &'a backdoor_core::adversary::EnsembleSummary,
}

#[derive(Serialize)]
struct ProbeRecord {
    k: usize,
    beta: f64,
    gamma: f64,
    n: usize,
    m: usize,
    detector: &'static str,
    trials: usize,
    seed: u64,
    risk: RiskEstimate,
    floor: f64,
    floor_check: &'static str,
}

pub fn probe(args: &ProbeArgs) -> anyhow::Result<Outcome> {
    let config = ImpossibilityConfig::new(args.k, args.beta, args.gamma, args.n)?;
    let m = config.m();
    if m <= args.n {
        bail!(backdoor_core::Error::Config(format!(
            "the probe needs m = floor(beta * k) > n, got m = {m} and n = {}; increase --k or --beta",
            args.n
        )));
    }
    let estimate = match args.detector {
        ProbeDetector::TypeTv => {
            let det = TypeTvDetector::new(args.gamma, args.beta)?;
            imposs_probe(&det, &config, args.trials, args.seed)?
        }
        ProbeDetector::Collision => imposs_probe(&collision_detector, &config, args.trials, args.seed)?,
    };
    let floor = imposs_floor(args.n, m)?;
    let record = ProbeRecord {
        k: args.k,
        beta: args.beta,
        gamma: args.gamma,
        n: args.n,
        m,
        detector: args.detector.name(),
        trials: args.trials,
        seed: args.seed,
        risk: estimate,
        floor,
        floor_check: if floor <= estimate.p_hat + 3.0 * estimate.ci_width() {
            "pass"
        } else {
            "fail"
        },
    };
    let hashed = json!({
        "k": args.k, "beta": args.beta, "gamma": args.gamma, "n": args.n,
        "detector": args.detector.name(), "trials": args.trials, "seed": args.seed,
    });
    Ok(Outcome::new(
        "probe",
        &hashed,
        json_line(&record),
        serde_json::to_value(&record)?,
    ))
}

pub fn run_config(path: &Path) -> anyhow::Result<Outcome> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    let config: ExperimentConfig =
        serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
    let result = run_experiment(&config)?;
    Ok(Outcome {
        stdout: json_line(&result),
        payload: serde_json::to_value(&result)?,
        config_hash: result.config_hash.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_symbol_benchmark() {
        let (p0, pb) = benchmark_pair(2).unwrap();
        assert_eq!(p0.probs(), &[0.5, 0.5]);
        assert_eq!(pb.probs(), &[1.0, 0.0]);
        let (_, pb) = benchmark_pair(5).unwrap();
        assert_eq!(pb.probs().iter().filter(|&&p| p > 0.0).count(), 3);
        assert!(benchmark_pair(1).is_err());
    }

    #[test]
    fn normalization() {
        let (v, changed) = normalize(&[3.0, 4.0]).unwrap();
        assert!(changed);
        assert_eq!(v, vec![0.6, 0.8]);
        assert!(!normalize(&[1.0, 0.0]).unwrap().1);
        assert!(normalize(&[0.0, 0.0]).is_err());
    }
}
