//! Big Five scoring, labelling and trait-group classifiers.

mod bfi;
pub mod eval;
pub mod model;
pub mod stats;
pub mod synth;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

pub use bfi::{label_traits, score_bfi, LikertResponse, NormEntry, NormTable, ScoringKey, ITEM_COUNT};
pub use eval::{evaluate_bank, BankReport, TargetReport};
pub use model::{
    precision, predict, random_baseline, train_model, AdoptionVector, Family, ModelBank, TraitModel,
};
pub use stats::pearson;
pub use synth::{synth_dataset, AdoptionDataset, AdoptionSample, CorrelationSpec};

/// One of the five personality dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dimension {
    Extraversion,
    Agreeableness,
    Conscientiousness,
    Neuroticism,
    Openness,
}

impl Dimension {
    pub const ALL: [Dimension; 5] = [
        Dimension::Extraversion,
        Dimension::Agreeableness,
        Dimension::Conscientiousness,
        Dimension::Neuroticism,
        Dimension::Openness,
    ];

    /// The one-letter code used in data files (`E`, `A`, `C`, `N`, `O`).
    pub fn code(self) -> &'static str {
        match self {
            Dimension::Extraversion => "E",
            Dimension::Agreeableness => "A",
            Dimension::Conscientiousness => "C",
            Dimension::Neuroticism => "N",
            Dimension::Openness => "O",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Extraversion => "extraversion",
            Dimension::Agreeableness => "agreeableness",
            Dimension::Conscientiousness => "conscientiousness",
            Dimension::Neuroticism => "neuroticism",
            Dimension::Openness => "openness",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Dimension::ALL
            .into_iter()
            .find(|d| d.code().eq_ignore_ascii_case(s) || d.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Validation(format!("unknown trait `{s}`")))
    }
}

impl Serialize for Dimension {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for Dimension {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    High,
    Medium,
    Low,
}

impl Level {
    pub fn name(self) -> &'static str {
        match self {
            Level::High => "High",
            Level::Medium => "Medium",
            Level::Low => "Low",
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Level::High, Level::Medium, Level::Low]
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Validation(format!("unknown level `{s}`")))
    }
}

/// The extreme levels a classifier can target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pole {
    High,
    Low,
}

impl Pole {
    pub fn level(self) -> Level {
        match self {
            Pole::High => Level::High,
            Pole::Low => Level::Low,
        }
    }
}

/// A (dimension, pole) pair such as `N-High`; ten of them exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TargetGroup {
    pub dimension: Dimension,
    pub pole: Pole,
}

impl TargetGroup {
    pub fn new(dimension: Dimension, pole: Pole) -> Self {
        TargetGroup { dimension, pole }
    }

    /// All ten groups, dimension-major, High before Low.
    pub fn all() -> Vec<TargetGroup> {
        Dimension::ALL
            .into_iter()
            .flat_map(|d| [TargetGroup::new(d, Pole::High), TargetGroup::new(d, Pole::Low)])
            .collect()
    }

    pub fn contains(self, level: Level) -> bool {
        level == self.pole.level()
    }
}

impl fmt::Display for TargetGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.dimension.code(), self.pole.level().name())
    }
}

impl FromStr for TargetGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (d, l) = s
            .split_once('-')
            .ok_or_else(|| Error::Validation(format!("target group `{s}` is not of the form E-High")))?;
        let pole = match l.parse::<Level>()? {
            Level::High => Pole::High,
            Level::Low => Pole::Low,
            Level::Medium => {
                return Err(Error::Validation(format!("target group `{s}` must be High or Low")))
            }
        };
        Ok(TargetGroup::new(d.parse()?, pole))
    }
}

impl Serialize for TargetGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TargetGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
}

impl FromStr for Gender {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "male" | "m" => Ok(Gender::Male),
            "female" | "f" => Ok(Gender::Female),
            _ => Err(Error::Validation(format!("unknown gender `{s}` (expected male or female)"))),
        }
    }
}

/// Mean item score per dimension, each in `[1, 5]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraitScores(pub BTreeMap<Dimension, f64>);

impl TraitScores {
    pub fn get(&self, dimension: Dimension) -> f64 {
        self.0[&dimension]
    }
}

/// Level per dimension, optionally with the scores it was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraitProfile {
    pub levels: BTreeMap<Dimension, Level>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<TraitScores>,
}

impl TraitProfile {
    /// Every dimension at Medium.
    pub fn neutral() -> Self {
        TraitProfile {
            levels: Dimension::ALL.into_iter().map(|d| (d, Level::Medium)).collect(),
            scores: None,
        }
    }

    /// A neutral profile with the given overrides.
    pub fn with(levels: &[(Dimension, Level)]) -> Self {
        let mut profile = TraitProfile::neutral();
        for &(d, l) in levels {
            profile.levels.insert(d, l);
        }
        profile
    }

    pub fn level(&self, dimension: Dimension) -> Level {
        self.levels.get(&dimension).copied().unwrap_or(Level::Medium)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.levels.len() != Dimension::ALL.len() {
            return Err(Error::Validation(format!(
                "profile must give a level for all five traits, found {}",
                self.levels.len()
            )));
        }
        Ok(())
    }

    /// Parses a profile document. Accepts either the full form
    /// (`{"levels": {"E": "High", ...}}`) or a flat map of levels; traits
    /// that are left out default to Medium.
    pub fn from_json(text: &str) -> Result<Self, Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Doc {
            Full {
                #[serde(default)]
                schema_version: Option<u32>,
                levels: BTreeMap<Dimension, Level>,
                #[serde(default)]
                scores: Option<TraitScores>,
            },
            Flat(BTreeMap<Dimension, Level>),
        }
        let doc: Doc = crate::config::parse_json(text, "profile")?;
        let (levels, scores) = match doc {
            Doc::Full {
                schema_version,
                levels,
                scores,
            } => {
                if let Some(v) = schema_version {
                    crate::config::check_schema_version(v, "profile")?;
                }
                (levels, scores)
            }
            Doc::Flat(levels) => (levels, None),
        };
        let mut profile = TraitProfile::neutral();
        profile.levels.extend(levels);
        profile.scores = scores;
        Ok(profile)
    }
}
