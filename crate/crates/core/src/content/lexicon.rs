use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    Complement, FeatureCategory, MalwareFeature, NounPhrase, Polarity, Predicate, Proposition, PropositionKind,
    RelTo, RhetoricalRelation,
};
use crate::concern::PermissionKind;
use crate::config::{check_schema_version, parse_json};
use crate::Error;

/// Placeholder for the subject type inside skeleton complements.
const TYPE_SLOT: &str = "{type}";

/// A proposition template in the lexicon file. `target` indexes the
/// skeleton list and defaults to the claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropositionSkeleton {
    pub kind: PropositionKind,
    pub polarity: Polarity,
    pub verb: String,
    #[serde(default)]
    pub negated: bool,
    pub complement: Complement,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<RhetoricalRelation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
}

/// Per-category defaults.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryInfo {
    pub subject_type: String,
    /// Baseline sentence with `{action}` and/or `{token}` slots.
    pub baseline: String,
    /// Baseline action for tokens without one, with a `{token}` slot.
    pub default_action: String,
    /// Subject of the fallback claim, with a `{token}` slot.
    pub fallback_subject: String,
    pub propositions: Vec<PropositionSkeleton>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub token: String,
    pub category: FeatureCategory,
    pub gerund_phrase: String,
    /// Third-person verb phrase used by the baseline ("sends SMS messages").
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permission: Option<PermissionKind>,
    /// Empty means "use the category's propositions".
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub propositions: Vec<PropositionSkeleton>,
}

/// Token → explanation entries, plus per-category defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureLexicon {
    pub schema_version: u32,
    pub categories: BTreeMap<FeatureCategory, CategoryInfo>,
    pub entries: Vec<LexiconEntry>,
}

impl FeatureLexicon {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let lexicon: FeatureLexicon = parse_json(text, "feature lexicon")?;
        check_schema_version(lexicon.schema_version, "feature lexicon")?;
        lexicon.validate()?;
        Ok(lexicon)
    }

    pub fn validate(&self) -> Result<(), Error> {
        for category in FeatureCategory::ALL {
            let info = self
                .categories
                .get(&category)
                .ok_or_else(|| Error::Config(format!("lexicon has no defaults for category {category}")))?;
            check_skeletons(&info.propositions, category.name())?;
            if info.subject_type.trim().is_empty() {
                return Err(Error::Config(format!("category {category} has an empty subject type")));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for entry in &self.entries {
            if entry.token.is_empty() || entry.gerund_phrase.trim().is_empty() {
                return Err(Error::Config(format!(
                    "lexicon entry `{}` needs a token and a gerund phrase",
                    entry.token
                )));
            }
            if !seen.insert((entry.category, entry.token.as_str())) {
                return Err(Error::Config(format!("lexicon lists `{}` twice", entry.token)));
            }
            if !entry.propositions.is_empty() {
                check_skeletons(&entry.propositions, &entry.token)?;
            }
        }
        Ok(())
    }

    pub fn category(&self, category: FeatureCategory) -> &CategoryInfo {
        &self.categories[&category]
    }

    pub fn entries(&self, category: FeatureCategory) -> Vec<&LexiconEntry> {
        self.entries.iter().filter(|e| e.category == category).collect()
    }

    pub fn lookup(&self, feature: &MalwareFeature) -> Option<&LexiconEntry> {
        self.entries
            .iter()
            .find(|e| e.category == feature.category && e.token == feature.token)
    }

    /// The permission a feature's sentences are tagged with, if any.
    pub fn permission_tag(&self, feature: &MalwareFeature) -> Option<PermissionKind> {
        feature.permission.or_else(|| self.lookup(feature).and_then(|e| e.permission))
    }

    pub(super) fn explain(&self, feature: &MalwareFeature) -> Vec<Proposition> {
        let info = self.category(feature.category);
        let Some(entry) = self.lookup(feature) else {
            return vec![Proposition {
                id: format!("{}#0", feature.token),
                subject: info.fallback_subject.replace("{token}", &feature.token),
                subject_type: info.subject_type.clone(),
                predicate: Predicate {
                    verb: "be".into(),
                    negated: false,
                    complement: Complement::Adjective {
                        adjective: "suspicious".into(),
                    },
                    intensifier: None,
                },
                polarity: Polarity::Negative,
                kind: PropositionKind::Claim,
                rel_to: None,
                paraphrase: false,
            }];
        };
        let subject_type = entry.subject_type.clone().unwrap_or_else(|| info.subject_type.clone());
        let skeletons = if entry.propositions.is_empty() {
            &info.propositions
        } else {
            &entry.propositions
        };
        let id = |i: usize| format!("{}#{i}", entry.token);
        let claim = skeletons
            .iter()
            .position(|s| s.kind == PropositionKind::Claim)
            .expect("validated");
        skeletons
            .iter()
            .enumerate()
            .map(|(i, s)| Proposition {
                id: id(i),
                subject: entry.gerund_phrase.clone(),
                subject_type: subject_type.clone(),
                predicate: Predicate {
                    verb: s.verb.clone(),
                    negated: s.negated,
                    complement: fill_type(&s.complement, &subject_type),
                    intensifier: None,
                },
                polarity: s.polarity,
                kind: s.kind,
                rel_to: s.relation.map(|relation| RelTo {
                    target: id(s.target.unwrap_or(claim)),
                    relation,
                }),
                paraphrase: false,
            })
            .collect()
    }

    /// The plain baseline sentence for a feature.
    pub fn baseline_sentence(&self, feature: &MalwareFeature) -> String {
        let info = self.category(feature.category);
        let action = self
            .lookup(feature)
            .and_then(|e| e.action.clone())
            .unwrap_or_else(|| info.default_action.clone());
        info.baseline
            .replace("{action}", &action)
            .replace("{token}", &feature.token)
    }
}

fn fill_type(complement: &Complement, subject_type: &str) -> Complement {
    match complement {
        Complement::Noun(np) => Complement::Noun(NounPhrase {
            head: np.head.replace(TYPE_SLOT, subject_type),
            ..np.clone()
        }),
        Complement::Adjective { adjective } => Complement::Adjective {
            adjective: adjective.clone(),
        },
    }
}

fn check_skeletons(skeletons: &[PropositionSkeleton], owner: &str) -> Result<(), Error> {
    let claims = skeletons.iter().filter(|s| s.kind == PropositionKind::Claim).count();
    if claims != 1 {
        return Err(Error::Config(format!("`{owner}` must have exactly one claim, found {claims}")));
    }
    for (i, s) in skeletons.iter().enumerate() {
        if s.verb.trim().is_empty() {
            return Err(Error::Config(format!("`{owner}` proposition {i} has no verb")));
        }
        match (s.kind, s.relation) {
            (PropositionKind::Support, None) => {
                return Err(Error::Config(format!("`{owner}` support {i} needs a relation")))
            }
            (PropositionKind::Claim, Some(_)) => {
                return Err(Error::Config(format!("`{owner}` claim cannot relate to another proposition")))
            }
            _ => {}
        }
        if let Some(t) = s.target {
            if t >= skeletons.len() || t == i {
                return Err(Error::Config(format!("`{owner}` proposition {i} targets {t}")));
            }
        }
    }
    Ok(())
}
