//! From detector features to planned propositions.

mod lexicon;
mod plan;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::concern::PermissionKind;
use crate::Error;

pub use lexicon::{CategoryInfo, FeatureLexicon, LexiconEntry, PropositionSkeleton};
pub use plan::{plan_content, selection_size};

/// Functional class of a detector feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureCategory {
    Permission,
    Intent,
    NetworkAddress,
    ApiCall,
    Component,
    Provider,
    HardwareAccess,
    String,
}

impl FeatureCategory {
    pub const ALL: [FeatureCategory; 8] = [
        FeatureCategory::Permission,
        FeatureCategory::Intent,
        FeatureCategory::NetworkAddress,
        FeatureCategory::ApiCall,
        FeatureCategory::Component,
        FeatureCategory::Provider,
        FeatureCategory::HardwareAccess,
        FeatureCategory::String,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureCategory::Permission => "permission",
            FeatureCategory::Intent => "intent",
            FeatureCategory::NetworkAddress => "network_address",
            FeatureCategory::ApiCall => "api_call",
            FeatureCategory::Component => "component",
            FeatureCategory::Provider => "provider",
            FeatureCategory::HardwareAccess => "hardware_access",
            FeatureCategory::String => "string",
        }
    }
}

impl fmt::Display for FeatureCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let norm = s.to_ascii_lowercase().replace(['-', ' '], "_");
        FeatureCategory::ALL
            .into_iter()
            .find(|c| c.name() == norm || c.name().replace('_', "") == norm)
            .ok_or_else(|| Error::Validation(format!("unknown feature category `{s}`")))
    }
}

/// One malware-indicative feature reported by the detector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MalwareFeature {
    pub token: String,
    pub category: FeatureCategory,
    /// Overrides the lexicon's permission tag when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permission: Option<PermissionKind>,
}

impl MalwareFeature {
    pub fn new(token: impl Into<String>, category: FeatureCategory) -> Self {
        MalwareFeature {
            token: token.into(),
            category,
            permission: None,
        }
    }

    pub fn with_permission(mut self, permission: PermissionKind) -> Self {
        self.permission = Some(permission);
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.token.trim().is_empty() {
            return Err(Error::Validation("feature token must not be empty".into()));
        }
        Ok(())
    }

    /// Parses a feature list: a bare JSON list or `{"features": [...]}`.
    pub fn list_from_json(text: &str) -> Result<Vec<MalwareFeature>, Error> {
        let features: Vec<MalwareFeature> = crate::config::parse_list_or_envelope(text, "feature list", "features")?;
        for f in &features {
            f.validate()?;
        }
        Ok(features)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropositionKind {
    Claim,
    Support,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RhetoricalRelation {
    Justify,
    Contrast,
    Infer,
    Concede,
    Restate,
}

impl RhetoricalRelation {
    pub const ALL: [RhetoricalRelation; 5] = [
        RhetoricalRelation::Justify,
        RhetoricalRelation::Contrast,
        RhetoricalRelation::Infer,
        RhetoricalRelation::Concede,
        RhetoricalRelation::Restate,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelTo {
    pub target: String,
    pub relation: RhetoricalRelation,
}

/// A noun phrase complement such as "at high risk" or "the suspicious
/// permission".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NounPhrase {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preposition: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub determiner: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modifiers: Vec<String>,
    pub head: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Complement {
    Noun(NounPhrase),
    Adjective { adjective: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicate {
    /// Base form of the main verb ("be", "have", "use", ...).
    pub verb: String,
    #[serde(default)]
    pub negated: bool,
    pub complement: Complement,
    /// Degree adverb placed before the first modifier ("very").
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intensifier: Option<String>,
}

/// A unit of content: `subject` + `predicate`, e.g. "sending SMS messages"
/// + "is at high risk".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proposition {
    pub id: String,
    pub subject: String,
    /// Noun naming what kind of thing the subject is ("permission").
    pub subject_type: String,
    pub predicate: Predicate,
    pub polarity: Polarity,
    pub kind: PropositionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_to: Option<RelTo>,
    /// Set on restatements whose wording was already chosen.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub paraphrase: bool,
}

impl Proposition {
    /// Content words of the proposition, lowercased, in order.
    pub fn content_words(&self) -> Vec<String> {
        let mut words: Vec<String> = self.subject.split_whitespace().map(str::to_lowercase).collect();
        words.push(self.predicate.verb.to_lowercase());
        match &self.predicate.complement {
            Complement::Noun(np) => {
                words.extend(np.modifiers.iter().flat_map(|m| m.split_whitespace()).map(str::to_lowercase));
                words.extend(np.head.split_whitespace().map(str::to_lowercase));
            }
            Complement::Adjective { adjective } => words.push(adjective.to_lowercase()),
        }
        words
    }
}

/// Returns the propositions explaining `feature`.
///
/// Tokens missing from the lexicon get a single claim built from the
/// category's fallback subject ("the requested permission FOO is
/// suspicious"), so this never fails.
pub fn explain_feature(feature: &MalwareFeature, lexicon: &FeatureLexicon) -> Vec<Proposition> {
    lexicon.explain(feature)
}
