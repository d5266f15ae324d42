//! Deep-syntactic dependency trees.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WordClass {
    Verb,
    Noun,
    Adjective,
    Adverb,
    Marker,
    Pronoun,
}

/// Dependency relations: `I` is the subject, `II` the object or
/// complement, `ATTR` any modifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relation {
    I,
    II,
    #[serde(rename = "ATTR")]
    Attr,
}

/// A lexeme with its dependents and realization attributes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DSyntSNode {
    pub lexeme: String,
    #[serde(rename = "class")]
    pub word_class: WordClass,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub relations: BTreeMap<Relation, Vec<DSyntSNode>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attributes: BTreeMap<String, String>,
}

impl DSyntSNode {
    pub fn new(lexeme: impl Into<String>, word_class: WordClass) -> Self {
        DSyntSNode {
            lexeme: lexeme.into(),
            word_class,
            relations: BTreeMap::new(),
            attributes: BTreeMap::new(),
        }
    }

    pub fn with(mut self, relation: Relation, child: DSyntSNode) -> Self {
        self.push(relation, child);
        self
    }

    pub fn with_attr(mut self, key: &str, value: impl Into<String>) -> Self {
        self.set_attr(key, value);
        self
    }

    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attributes.get(key).map(String::as_str)
    }

    /// True when the attribute is present with value `"true"`.
    pub fn flag(&self, key: &str) -> bool {
        self.attr(key) == Some("true")
    }

    pub fn set_attr(&mut self, key: &str, value: impl Into<String>) {
        self.attributes.insert(key.to_string(), value.into());
    }

    pub fn remove_attr(&mut self, key: &str) -> Option<String> {
        self.attributes.remove(key)
    }

    pub fn children(&self, relation: Relation) -> &[DSyntSNode] {
        self.relations.get(&relation).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn children_mut(&mut self, relation: Relation) -> &mut Vec<DSyntSNode> {
        self.relations.entry(relation).or_default()
    }

    pub fn push(&mut self, relation: Relation, child: DSyntSNode) {
        self.children_mut(relation).push(child);
    }

    pub fn subject(&self) -> Option<&DSyntSNode> {
        self.children(Relation::I).first()
    }

    pub fn subject_mut(&mut self) -> Option<&mut DSyntSNode> {
        self.relations.get_mut(&Relation::I).and_then(|v| v.first_mut())
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a DSyntSNode)) {
        f(self);
        for children in self.relations.values() {
            for child in children {
                child.walk(f);
            }
        }
    }

    pub fn walk_mut(&mut self, f: &mut impl FnMut(&mut DSyntSNode)) {
        f(self);
        for children in self.relations.values_mut() {
            for child in children {
                child.walk_mut(f);
            }
        }
    }

    /// First node in pre-order satisfying `pred`.
    pub fn find(&self, pred: &impl Fn(&DSyntSNode) -> bool) -> Option<&DSyntSNode> {
        if pred(self) {
            return Some(self);
        }
        self.relations.values().flatten().find_map(|c| c.find(pred))
    }

    pub fn find_mut(&mut self, pred: &impl Fn(&DSyntSNode) -> bool) -> Option<&mut DSyntSNode> {
        if pred(self) {
            return Some(self);
        }
        self.relations
            .values_mut()
            .flatten()
            .find_map(|c| c.find_mut(pred))
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    /// Checks the structural invariants of a sentence tree.
    pub fn validate_sentence(&self) -> Result<(), Error> {
        if self.word_class != WordClass::Verb {
            return Err(Error::Realization(format!(
                "sentence root `{}` is a {:?}, not a verb",
                self.lexeme, self.word_class
            )));
        }
        self.validate_node()
    }

    fn validate_node(&self) -> Result<(), Error> {
        if self.children(Relation::I).len() > 1 {
            return Err(Error::Realization(format!("`{}` has more than one subject", self.lexeme)));
        }
        if self.lexeme.trim().is_empty() {
            return Err(Error::Realization("empty lexeme".into()));
        }
        for child in self.relations.values().flatten() {
            child.validate_node()?;
        }
        Ok(())
    }
}

/// Attribute keys shared across stages.
pub mod attr {
    /// Marks the verb node that carries a proposition's content.
    pub const CLAUSE: &str = "clause";
    pub const PROP: &str = "prop";
    pub const CONTENT: &str = "content";
    pub const FIXED: &str = "fixed";
    pub const POLARITY: &str = "polarity";
    pub const MODAL: &str = "modal";
    pub const DETERMINER: &str = "determiner";
    pub const PREPOSITION: &str = "preposition";
    pub const POSITION: &str = "position";
    pub const JOIN: &str = "join";
    pub const LINK: &str = "link";
    pub const SEP: &str = "sep";
    pub const CONJ: &str = "conj";
    pub const CUE: &str = "cue";
    pub const COMPLEMENTIZER: &str = "complementizer";
    pub const SUBJECT_TYPE: &str = "subject_type";
    pub const STUTTER: &str = "stutter";
    pub const PUNCT: &str = "punct";
    pub const TAG: &str = "tag";
    pub const GIVEN: &str = "given";
    pub const UTTERANCE_INITIAL: &str = "utterance_initial";
    pub const TRACE: &str = "trace";
    pub const MARKERS: &str = "markers";
    pub const TEMPLATE: &str = "template";
    pub const CLASS: &str = "marker_class";
    pub const SUFFIX: &str = "suffix";
}

/// Is this the verb node of a proposition clause?
pub fn is_content_clause(node: &DSyntSNode) -> bool {
    node.word_class == WordClass::Verb && node.attr(attr::CLAUSE) == Some("content")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DSyntSNode {
        DSyntSNode::new("be", WordClass::Verb)
            .with(Relation::I, DSyntSNode::new("sending SMS messages", WordClass::Noun))
            .with(
                Relation::II,
                DSyntSNode::new("permission", WordClass::Noun)
                    .with_attr(attr::DETERMINER, "the")
                    .with(Relation::Attr, DSyntSNode::new("suspicious", WordClass::Adjective)),
            )
    }

    #[test]
    fn round_trips_through_json() {
        let tree = sample().with_attr(attr::PUNCT, "!");
        let json = serde_json::to_string(&tree).unwrap();
        assert!(json.contains("\"ATTR\""));
        assert_eq!(serde_json::from_str::<DSyntSNode>(&json).unwrap(), tree);
    }

    #[test]
    fn invariants() {
        assert!(sample().validate_sentence().is_ok());
        assert!(DSyntSNode::new("permission", WordClass::Noun).validate_sentence().is_err());
        let two_subjects = sample().with(Relation::I, DSyntSNode::new("it", WordClass::Pronoun));
        assert!(two_subjects.validate_sentence().is_err());
    }

    #[test]
    fn traversal() {
        let tree = sample();
        assert_eq!(tree.node_count(), 4);
        assert_eq!(
            tree.find(&|n| n.word_class == WordClass::Adjective).map(|n| n.lexeme.as_str()),
            Some("suspicious")
        );
    }
}
