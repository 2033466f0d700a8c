//! Generators for the benchmark families, emitted as text in the parser's
//! format so they go through the same grounding path as files.
//!
//! Numeric parameters the benchmarks leave open are fields of
//! [`DomainParams`] with frozen defaults:
//!
//! | parameter | default |
//! |---|---|
//! | door opening success | 0.5 |
//! | block-to-block move success (else the block lands on the table) | 0.3 |
//! | blocks: number of possible initial configurations | 3 |
//! | unix file prior: geometric ratio over non-root directories, BFS order | 0.5 |
//! | medpks illness prior: geometric ratio | 0.7 |
//! | localize slip probability, on cells with odd `x + y` | 0.3 |
//! | wumpus: probability that a hazard pair's hazard sits below the diagonal | 0.6 |

mod grid;
mod symbolic;

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Problem;
use crate::parser::{self, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Doors,
    Blocks,
    Unix,
    Medpks,
    Localize,
    Wumpus,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Doors,
        Family::Blocks,
        Family::Unix,
        Family::Medpks,
        Family::Localize,
        Family::Wumpus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Doors => "doors",
            Family::Blocks => "blocks",
            Family::Unix => "unix",
            Family::Medpks => "medpks",
            Family::Localize => "localize",
            Family::Wumpus => "wumpus",
        }
    }

    pub fn sizes(self) -> RangeInclusive<u32> {
        match self {
            Family::Doors | Family::Localize | Family::Wumpus => 3..=9,
            Family::Blocks => 3..=6,
            Family::Unix => 1..=3,
            Family::Medpks => 2..=12,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s.to_ascii_lowercase())
            .ok_or_else(|| DomainError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("unknown domain family `{0}`")]
    UnknownFamily(String),
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
    #[error("{family} supports sizes {min}..={max}, got {size}")]
    UnsupportedSize { family: Family, size: u32, min: u32, max: u32 },
    #[error("generated {0} instance does not parse: {1}")]
    Parse(String, ParseError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainParams {
    pub door_open_prob: f64,
    pub blocks_success: f64,
    pub blocks_configs: usize,
    pub unix_ratio: f64,
    pub medpks_ratio: f64,
    pub localize_slip: f64,
    pub wumpus_bias: f64,
}

impl Default for DomainParams {
    fn default() -> Self {
        DomainParams {
            door_open_prob: 0.5,
            blocks_success: 0.3,
            blocks_configs: 3,
            unix_ratio: 0.5,
            medpks_ratio: 0.7,
            localize_slip: 0.3,
            wumpus_bias: 0.6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub family: Family,
    pub size: u32,
    /// Seed for randomized placements (blocks configurations).
    pub seed: u64,
    pub params: DomainParams,
}

impl DomainSpec {
    pub fn new(family: Family, size: u32) -> Self {
        DomainSpec {
            family,
            size,
            seed: 0,
            params: DomainParams::default(),
        }
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.family, self.size)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub name: String,
    pub domain: String,
    pub problem: String,
}

impl GeneratedInstance {
    pub fn parse(&self) -> Result<Problem, DomainError> {
        parser::parse(&self.domain, &self.problem).map_err(|e| DomainError::Parse(self.name.clone(), e))
    }
}

pub fn generate(spec: &DomainSpec) -> Result<GeneratedInstance, DomainError> {
    let range = spec.family.sizes();
    if !range.contains(&spec.size) {
        return Err(DomainError::UnsupportedSize {
            family: spec.family,
            size: spec.size,
            min: *range.start(),
            max: *range.end(),
        });
    }
    let name = spec.name();
    let n = spec.size;
    let p = &spec.params;
    let (domain, problem) = match spec.family {
        Family::Doors => grid::doors(&name, n, p.door_open_prob),
        Family::Localize => grid::localize(&name, n, p.localize_slip),
        Family::Wumpus => grid::wumpus(&name, n, p.wumpus_bias),
        Family::Blocks => symbolic::blocks(&name, n, p.blocks_success, p.blocks_configs, spec.seed),
        Family::Unix => symbolic::unix(&name, n, p.unix_ratio),
        Family::Medpks => symbolic::medpks(&name, n, p.medpks_ratio),
    };
    Ok(GeneratedInstance { name, domain, problem })
}

/// Generates and parses in one go.
pub fn build(spec: &DomainSpec) -> Result<Problem, DomainError> {
    generate(spec)?.parse()
}

/// Named instances, one per benchmark family.
pub fn list_instances() -> Vec<(&'static str, DomainSpec)> {
    vec![
        ("doors5", DomainSpec::new(Family::Doors, 5)),
        ("blocks4", DomainSpec::new(Family::Blocks, 4)),
        ("localize3", DomainSpec::new(Family::Localize, 3)),
        ("medpks10", DomainSpec::new(Family::Medpks, 10)),
        ("unix1", DomainSpec::new(Family::Unix, 1)),
        ("wumpus5", DomainSpec::new(Family::Wumpus, 5)),
    ]
}

pub fn instance(name: &str) -> Result<DomainSpec, DomainError> {
    list_instances()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| s)
        .ok_or_else(|| DomainError::UnknownInstance(name.to_string()))
}

/// Probabilities proportional to `ratio^i`, written as decimals that sum to
/// exactly 1 when parsed (the last one absorbs the rounding).
pub(crate) fn geometric_prior(n: usize, ratio: f64) -> Vec<f64> {
    let weights: Vec<f64> = (0..n).map(|i| ratio.powi(i as i32)).collect();
    let total: f64 = weights.iter().sum();
    let mut probs: Vec<f64> = weights.iter().map(|w| (w / total * 1e6).round() / 1e6).collect();
    let head: f64 = probs[..n - 1].iter().sum();
    probs[n - 1] = ((1.0 - head) * 1e6).round() / 1e6;
    probs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{validate, Severity};

    #[test]
    fn catalog_covers_every_family() {
        let cat = list_instances();
        assert_eq!(cat.len(), 6);
        for f in Family::ALL {
            assert_eq!(cat.iter().filter(|(_, s)| s.family == f).count(), 1);
        }
        assert_eq!(instance("wumpus5").unwrap(), DomainSpec::new(Family::Wumpus, 5));
        assert!(matches!(instance("wumpus55"), Err(DomainError::UnknownInstance(_))));
    }

    #[test]
    fn size_range_is_enforced() {
        let e = generate(&DomainSpec::new(Family::Blocks, 9)).unwrap_err();
        assert_eq!(e.to_string(), "blocks supports sizes 3..=6, got 9");
        assert!(generate(&DomainSpec::new(Family::Unix, 0)).is_err());
    }

    #[test]
    fn every_size_parses_without_errors() {
        for f in Family::ALL {
            for n in f.sizes() {
                let spec = DomainSpec::new(f, n);
                let p = build(&spec).unwrap_or_else(|e| panic!("{}: {e}", spec.name()));
                let errors: Vec<_> = validate(&p).into_iter().filter(|d| d.severity == Severity::Error).collect();
                assert!(errors.is_empty(), "{}: {errors:?}", spec.name());
            }
        }
    }

    #[test]
    fn geometric_prior_sums_to_one() {
        for n in 2..13 {
            let p = geometric_prior(n, 0.7);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(p.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
