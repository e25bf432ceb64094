//! Dataset descriptions and their alphabet sizes.

use serde::{Deserialize, Serialize};

use super::LogNumber;
use crate::error::{param, Error, Result};

const BUNDLED: &str = include_str!("../../data/datasets.json");

/// A dataset whose alphabet size enters the bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub name: String,
    #[serde(flatten)]
    pub alphabet: AlphabetSpec,
}

/// How the alphabet size of a dataset is determined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphabetSpec {
    /// `|X| = color_depth^(width * height * channels)`.
    Image {
        width: u64,
        height: u64,
        channels: u64,
        color_depth: u64,
    },
    /// `|X|` is the product of the per-feature cardinalities.
    Categorical(Vec<u64>),
    /// `log10 |X|` given directly.
    Log10(f64),
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        match &self.alphabet {
            AlphabetSpec::Image {
                width,
                height,
                channels,
                color_depth,
            } => {
                if [*width, *height, *channels, *color_depth].contains(&0) {
                    return Err(param("image", format!("{}: all dimensions must be >= 1", self.name)));
                }
            }
            AlphabetSpec::Categorical(cards) => {
                if cards.is_empty() || cards.contains(&0) {
                    return Err(param(
                        "categorical",
                        format!(
                            "{}: cardinalities must be a nonempty list of positive integers",
                            self.name
                        ),
                    ));
                }
            }
            AlphabetSpec::Log10(v) => {
                if !v.is_finite() || *v < 0.0 {
                    return Err(param("log10", format!("{}: {v} is not a finite value >= 0", self.name)));
                }
            }
        }
        Ok(())
    }
}

/// `log10 |X|` for a dataset description.
pub fn alphabet_log10(spec: &DatasetSpec) -> Result<LogNumber> {
    spec.validate()?;
    let log10 = match &spec.alphabet {
        AlphabetSpec::Image {
            width,
            height,
            channels,
            color_depth,
        } => (width * height * channels) as f64 * (*color_depth as f64).log10(),
        AlphabetSpec::Categorical(cards) => cards.iter().map(|&c| (c as f64).log10()).sum(),
        AlphabetSpec::Log10(v) => *v,
    };
    LogNumber::from_log10(log10)
}

/// Parses a JSON list of dataset descriptions.
pub fn parse_catalog(json: &str) -> Result<Vec<DatasetSpec>> {
    let specs: Vec<DatasetSpec> =
        serde_json::from_str(json).map_err(|e| Error::Config(format!("invalid catalog: {e}")))?;
    for s in &specs {
        s.validate()?;
    }
    Ok(specs)
}

/// The eight reference datasets: five image sets and three UCI tables.
///
/// UCI alphabet sizes are given directly as `log10` values since the
/// per-feature cardinalities are not part of the catalog.
pub fn bundled_catalog() -> Vec<DatasetSpec> {
    parse_catalog(BUNDLED).expect("bundled catalog is valid")
}

pub fn bundled_catalog_json() -> &'static str {
    BUNDLED
}
