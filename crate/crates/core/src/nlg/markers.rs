//! Pragmatic markers: hedges, fillers, tags and other stylistic inserts.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::lexical::SynonymLexicon;
use super::params::{set_stage, GenerationParams, Param, ParamGroup};
use super::tree::{attr, is_content_clause, DSyntSNode, Relation, WordClass};
use crate::config::{check_schema_version, parse_json};
use crate::rng::{fires, fork, GenRng};
use crate::Error;

/// Where an inserted marker is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Position {
    Start,
    PreVerb,
    PreObject,
    PreModifier,
    End,
}

impl Position {
    pub fn name(self) -> &'static str {
        match self {
            Position::Start => "start",
            Position::PreVerb => "pre-verb",
            Position::PreObject => "pre-object",
            Position::PreModifier => "pre-modifier",
            Position::End => "end",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerForm {
    pub text: String,
    pub position: Position,
    /// Punctuation written right after the marker ("," or "...").
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub join: String,
}

/// How a marker class changes a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkerKind {
    /// Grafts one of the surface forms onto the tree.
    Insert,
    /// Rewrites the tree; the form documents the result.
    Transform,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PragmaticMarker {
    pub kind: MarkerKind,
    /// Only applies to the first sentence of an utterance.
    #[serde(default)]
    pub utterance_initial: bool,
    pub forms: Vec<MarkerForm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkerBank {
    pub schema_version: u32,
    pub classes: BTreeMap<Param, PragmaticMarker>,
}

/// Marker classes that rewrite the tree rather than insert words.
pub const TRANSFORMS: [Param; 6] = [
    Param::SubjectImplicitness,
    Param::Pronominalization,
    Param::Negation,
    Param::Stuttering,
    Param::TagQuestion,
    Param::Exclamation,
];

/// Application order: rewrites, then insertions, then final punctuation.
pub const ORDER: [Param; 16] = [
    Param::SubjectImplicitness,
    Param::Pronominalization,
    Param::Negation,
    Param::Stuttering,
    Param::Acknowledgments,
    Param::InitialRejection,
    Param::Confirmation,
    Param::CompetenceMitigation,
    Param::FilledPauses,
    Param::SoftenerHedges,
    Param::EmphasizerHedges,
    Param::Expletives,
    Param::NearExpletives,
    Param::InGroupMarker,
    Param::TagQuestion,
    Param::Exclamation,
];

impl MarkerBank {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let bank: MarkerBank = parse_json(text, "marker bank")?;
        check_schema_version(bank.schema_version, "marker bank")?;
        bank.validate()?;
        Ok(bank)
    }

    pub fn validate(&self) -> Result<(), Error> {
        for class in Param::ALL.into_iter().filter(|p| p.group() == ParamGroup::Marker) {
            let marker = self
                .classes
                .get(&class)
                .ok_or_else(|| Error::Config(format!("marker bank has no entry for {class}")))?;
            if marker.forms.is_empty() || marker.forms.iter().any(|f| f.text.trim().is_empty()) {
                return Err(Error::Config(format!("{class} needs at least one non-empty surface form")));
            }
            let expected = if TRANSFORMS.contains(&class) {
                MarkerKind::Transform
            } else {
                MarkerKind::Insert
            };
            if marker.kind != expected {
                return Err(Error::Config(format!("{class} must be of kind {expected:?}")));
            }
        }
        if let Some(p) = self.classes.keys().find(|p| p.group() != ParamGroup::Marker) {
            return Err(Error::Config(format!("{p} is not a marker class")));
        }
        Ok(())
    }

    pub fn class(&self, class: Param) -> &PragmaticMarker {
        &self.classes[&class]
    }

    pub fn has_form(&self, class: Param, text: &str) -> bool {
        self.classes
            .get(&class)
            .is_some_and(|m| m.forms.iter().any(|f| f.text == text))
    }

    /// Lowercased words of every inserted surface form.
    pub fn marker_words(&self) -> Vec<String> {
        let mut words: Vec<String> = self
            .classes
            .values()
            .filter(|m| m.kind == MarkerKind::Insert)
            .flat_map(|m| m.forms.iter())
            .flat_map(|f| f.text.split_whitespace())
            .filter(|w| !w.contains('{'))
            .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric() && c != '\'').to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        words.sort();
        words.dedup();
        words
    }
}

/// A marker applied to a sentence, as recorded in its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerUse {
    pub class: Param,
    pub form: String,
}

/// Markers recorded on a sentence tree by [`insert_markers`].
pub fn markers_used(tree: &DSyntSNode) -> Vec<MarkerUse> {
    tree.attr(attr::MARKERS)
        .map(|s| {
            s.split('|')
                .filter_map(|entry| {
                    let (class, form) = entry.split_once('=')?;
                    Some(MarkerUse {
                        class: class.parse().ok()?,
                        form: form.to_string(),
                    })
                })
                .collect()
        })
        .unwrap_or_default()
}

fn main_clause(tree: &DSyntSNode) -> Option<&DSyntSNode> {
    tree.find(&is_content_clause)
}

fn main_clause_mut(tree: &mut DSyntSNode) -> Option<&mut DSyntSNode> {
    tree.find_mut(&is_content_clause)
}

/// Is the clause's subject still the full content noun phrase?
fn full_subject(clause: &DSyntSNode) -> bool {
    clause
        .subject()
        .is_some_and(|s| s.word_class == WordClass::Noun && s.flag(attr::CONTENT) && s.attr("implicit").is_none())
}

fn pronoun_it() -> DSyntSNode {
    DSyntSNode::new("it", WordClass::Pronoun)
}

fn gradable(node: &DSyntSNode, synonyms: &SynonymLexicon) -> bool {
    node.word_class == WordClass::Adjective
        && (synonyms.set_of(&node.lexeme).is_some() || synonyms.antonym(&node.lexeme).is_some())
}

/// The gradable adjective a pre-modifier marker attaches to: the
/// complement itself or a modifier of the complement noun. Classifier
/// modifiers such as "security" do not take hedges.
fn modifiable<'a>(clause: &'a mut DSyntSNode, synonyms: &SynonymLexicon) -> Option<&'a mut DSyntSNode> {
    clause.children_mut(Relation::II).iter_mut().find_map(|c| {
        if gradable(c, synonyms) {
            Some(c)
        } else if c.word_class == WordClass::Noun {
            c.children_mut(Relation::Attr).iter_mut().find(|a| gradable(a, synonyms))
        } else {
            None
        }
    })
}

fn position_available(tree: &mut DSyntSNode, position: Position, synonyms: &SynonymLexicon) -> bool {
    match position {
        Position::Start | Position::End => true,
        Position::PreVerb => main_clause(tree).is_some(),
        Position::PreObject => main_clause(tree).is_some_and(|c| !c.children(Relation::II).is_empty()),
        Position::PreModifier => main_clause_mut(tree)
            .and_then(|c| modifiable(c, synonyms))
            .is_some_and(|m| !m.children(Relation::Attr).iter().any(|a| a.word_class == WordClass::Marker)),
    }
}

/// Whether `form` can go into `tree`: its position must exist, a
/// pre-modifier slot holds one marker, and a sentence gets at most one
/// "... that" frame.
fn form_available(tree: &mut DSyntSNode, form: &MarkerForm, synonyms: &SynonymLexicon) -> bool {
    if form.text.ends_with(" that") {
        let framed = tree
            .find(&|n| n.attr(attr::COMPLEMENTIZER).is_some() || (n.word_class == WordClass::Marker && n.lexeme.ends_with(" that")))
            .is_some();
        if framed {
            return false;
        }
    }
    position_available(tree, form.position, synonyms)
}

/// The clause a tag question agrees with: the last clause realized after
/// the main one, or the main clause itself.
fn last_clause(tree: &DSyntSNode) -> Option<&DSyntSNode> {
    let trailing = tree
        .children(Relation::Attr)
        .iter()
        .filter(|c| c.word_class == WordClass::Verb && c.attr(attr::POSITION) != Some("start"))
        .last();
    match trailing {
        Some(c) => c.find(&is_content_clause).or(Some(c)),
        None => main_clause(tree),
    }
}

fn tag_for(clause: &DSyntSNode) -> String {
    let negated = clause.attr(attr::POLARITY) == Some("negative");
    let aux = match (clause.attr(attr::MODAL), clause.lexeme.as_str()) {
        (Some(m), _) => m.to_string(),
        (None, "be") => "is".to_string(),
        _ => "does".to_string(),
    };
    if negated {
        format!("{aux} it")
    } else {
        format!("{aux}n't it")
    }
}

fn apply_transform(class: Param, tree: &mut DSyntSNode, synonyms: &SynonymLexicon) -> bool {
    let given = tree.flag(attr::GIVEN);
    match class {
        Param::SubjectImplicitness => {
            if !given {
                return false;
            }
            let Some(clause) = main_clause_mut(tree) else {
                return false;
            };
            if !full_subject(clause) {
                return false;
            }
            let subject_type = clause.attr(attr::SUBJECT_TYPE).unwrap_or("one").to_string();
            let comp = clause.children(Relation::II).first();
            let restructurable = clause.lexeme == "be"
                && clause.attr(attr::POLARITY) != Some("negative")
                && comp.is_some_and(|c| {
                    c.word_class == WordClass::Noun
                        && c.lexeme == subject_type
                        && c.children(Relation::Attr).len() == 1
                        && c.children(Relation::Attr)[0].word_class == WordClass::Adjective
                });
            let (determiner, complement) = if restructurable {
                let mut noun = clause.children_mut(Relation::II).remove(0);
                let adjective = noun.children_mut(Relation::Attr).remove(0);
                ("the", Some(adjective))
            } else {
                ("this", None)
            };
            let subject = DSyntSNode::new(subject_type, WordClass::Noun)
                .with_attr(attr::DETERMINER, determiner)
                .with_attr(attr::CONTENT, "true")
                .with_attr("implicit", "true");
            *clause.subject_mut().expect("checked") = subject;
            if let Some(adjective) = complement {
                clause.children_mut(Relation::II).insert(0, adjective);
            }
            true
        }
        Param::Pronominalization => {
            if !given {
                return false;
            }
            match main_clause_mut(tree) {
                Some(clause) if full_subject(clause) => {
                    *clause.subject_mut().expect("checked") = pronoun_it();
                    true
                }
                _ => false,
            }
        }
        Param::Negation => {
            let Some(clause) = main_clause_mut(tree) else {
                return false;
            };
            if clause.attr(attr::POLARITY) == Some("negative") {
                return false;
            }
            let mut done = false;
            for comp in clause.children_mut(Relation::II).iter_mut() {
                let target = if comp.word_class == WordClass::Adjective {
                    Some(comp)
                } else {
                    comp.children_mut(Relation::Attr)
                        .iter_mut()
                        .find(|a| a.word_class == WordClass::Adjective)
                };
                if let Some(adj) = target {
                    if let Some(opposite) = synonyms.antonym(&adj.lexeme) {
                        adj.set_attr("antonym_of", adj.lexeme.clone());
                        adj.lexeme = opposite.to_string();
                        adj.set_attr(attr::FIXED, "true");
                        done = true;
                        break;
                    }
                }
            }
            if done {
                clause.set_attr(attr::POLARITY, "negative");
            }
            done
        }
        Param::Stuttering => match main_clause_mut(tree).and_then(DSyntSNode::subject_mut) {
            Some(s) if s.word_class == WordClass::Noun => {
                s.set_attr(attr::STUTTER, "true");
                true
            }
            _ => false,
        },
        Param::TagQuestion => {
            let Some(clause) = last_clause(tree) else {
                return false;
            };
            let tag = tag_for(clause);
            tree.set_attr(attr::TAG, tag);
            tree.set_attr(attr::PUNCT, "?");
            true
        }
        Param::Exclamation => {
            if tree.attr(attr::PUNCT) == Some("?") {
                return false;
            }
            tree.set_attr(attr::PUNCT, "!");
            true
        }
        _ => unreachable!("not a transform"),
    }
}

fn insert(tree: &mut DSyntSNode, class: Param, form: &MarkerForm, synonyms: &SynonymLexicon) -> bool {
    let mut text = form.text.clone();
    if text.contains("{subject}") {
        let Some(clause) = main_clause_mut(tree) else {
            return false;
        };
        if !full_subject(clause) {
            return false;
        }
        let subject = std::mem::replace(clause.subject_mut().expect("checked"), pronoun_it());
        text = text.replace("{subject}", &subject.lexeme);
    }
    let node = DSyntSNode::new(text, WordClass::Marker)
        .with_attr(attr::POSITION, form.position.name())
        .with_attr(attr::JOIN, form.join.clone())
        .with_attr(attr::CLASS, class.name());
    let host = match form.position {
        Position::Start | Position::End => Some(tree),
        Position::PreVerb | Position::PreObject => main_clause_mut(tree),
        Position::PreModifier => main_clause_mut(tree).and_then(|c| modifiable(c, synonyms)),
    };
    match host {
        Some(h) => {
            h.push(Relation::Attr, node);
            true
        }
        None => false,
    }
}

/// Applies every marker class whose parameter fires to one sentence tree.
///
/// Each class draws from its own stream forked off `rng` in a fixed order,
/// so raising one class's parameter never changes another's decisions. A
/// class is applied at most once per sentence; classes marked
/// utterance-initial only touch the first sentence of an utterance.
pub fn insert_markers(
    tree: &DSyntSNode,
    params: &GenerationParams,
    bank: &MarkerBank,
    synonyms: &SynonymLexicon,
    rng: &mut GenRng,
) -> DSyntSNode {
    set_stage("insert_markers");
    let mut out = tree.clone();
    let mut used: Vec<String> = Vec::new();
    for class in ORDER {
        let mut class_rng = fork(rng);
        if !fires(params.get(class), &mut class_rng) {
            continue;
        }
        let marker = bank.class(class);
        if marker.utterance_initial && !out.flag(attr::UTTERANCE_INITIAL) {
            continue;
        }
        match marker.kind {
            MarkerKind::Transform => {
                if apply_transform(class, &mut out, synonyms) {
                    used.push(format!("{}={}", class.name(), marker.forms[0].text));
                }
            }
            MarkerKind::Insert => {
                let available: Vec<&MarkerForm> = marker
                    .forms
                    .iter()
                    .filter(|f| form_available(&mut out, f, synonyms))
                    .collect();
                let preferred: Vec<&MarkerForm> = params
                    .marker_forms(class)
                    .iter()
                    .filter_map(|name| available.iter().copied().find(|f| &f.text == name))
                    .collect();
                let pool = if preferred.is_empty() { available } else { preferred };
                if pool.is_empty() {
                    continue;
                }
                let form = pool[class_rng.gen_range(0..pool.len())];
                if insert(&mut out, class, form, synonyms) {
                    used.push(format!("{}={}", class.name(), form.text));
                }
            }
        }
    }
    if !used.is_empty() {
        let mut all: Vec<String> = out
            .attr(attr::MARKERS)
            .map(|s| s.split('|').map(str::to_string).collect())
            .unwrap_or_default();
        all.extend(used);
        out.set_attr(attr::MARKERS, all.join("|"));
    }
    out
}
