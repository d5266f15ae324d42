//! Synonym sets and parameter-driven lexical choice.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::params::{set_stage, GenerationParams, Param};
use super::tree::{attr, DSyntSNode, WordClass};
use crate::config::{check_schema_version, parse_json};
use crate::Error;

/// A set of interchangeable words. The first word is canonical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynonymSet {
    pub words: Vec<String>,
    /// Frequency rank per word; 1 is the most frequent.
    pub frequency: Vec<u32>,
    /// Strength rank per word for verb sets; higher is stronger.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strength: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynonymLexicon {
    pub schema_version: u32,
    pub sets: Vec<SynonymSet>,
    /// Antonym pairs, used in both directions.
    #[serde(default)]
    pub antonyms: Vec<(String, String)>,
    #[serde(skip)]
    index: BTreeMap<String, usize>,
}

impl SynonymLexicon {
    pub fn new(sets: Vec<SynonymSet>, antonyms: Vec<(String, String)>) -> Result<Self, Error> {
        let mut lexicon = SynonymLexicon {
            schema_version: crate::config::SCHEMA_VERSION,
            sets,
            antonyms,
            index: BTreeMap::new(),
        };
        lexicon.build_index()?;
        Ok(lexicon)
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let mut lexicon: SynonymLexicon = parse_json(text, "synonym lexicon")?;
        check_schema_version(lexicon.schema_version, "synonym lexicon")?;
        lexicon.build_index()?;
        Ok(lexicon)
    }

    fn build_index(&mut self) -> Result<(), Error> {
        self.index.clear();
        for (i, set) in self.sets.iter().enumerate() {
            if set.words.len() < 2 {
                return Err(Error::Config(format!("synonym set {i} needs at least two words")));
            }
            if set.frequency.len() != set.words.len() {
                return Err(Error::Config(format!("synonym set `{}` has mismatched frequency ranks", set.words[0])));
            }
            if set.strength.as_ref().is_some_and(|s| s.len() != set.words.len()) {
                return Err(Error::Config(format!("synonym set `{}` has mismatched strength ranks", set.words[0])));
            }
            for w in &set.words {
                if self.index.insert(w.clone(), i).is_some() {
                    return Err(Error::Config(format!("`{w}` appears in two synonym sets")));
                }
            }
        }
        Ok(())
    }

    pub fn set_of(&self, word: &str) -> Option<&SynonymSet> {
        self.index.get(word).map(|&i| &self.sets[i])
    }

    /// The other members of `word`'s set, in set order.
    pub fn alternatives(&self, word: &str) -> Vec<&str> {
        self.set_of(word)
            .map(|s| s.words.iter().map(String::as_str).filter(|w| *w != word).collect())
            .unwrap_or_default()
    }

    /// The canonical member of `word`'s set, or `word` itself.
    pub fn canonical<'a>(&'a self, word: &'a str) -> &'a str {
        self.set_of(word).map_or(word, |s| s.words[0].as_str())
    }

    pub fn antonym(&self, word: &str) -> Option<&str> {
        self.antonyms.iter().find_map(|(a, b)| {
            if a == word {
                Some(b.as_str())
            } else if b == word {
                Some(a.as_str())
            } else {
                None
            }
        })
    }
}

fn normalized(values: impl Iterator<Item = f64> + Clone) -> Vec<f64> {
    let lo = values.clone().fold(f64::INFINITY, f64::min);
    let hi = values.clone().fold(f64::NEG_INFINITY, f64::max);
    values
        .map(|v| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
        .collect()
}

/// Index of the preferred word in a set for the given lexical parameters.
///
/// Each candidate scores `sum((param - 0.5) * feature)` over word length,
/// commonness (inverted frequency rank) and, for verbs, strength, with each
/// feature min-max scaled within the set. Ties keep the earlier word, so
/// neutral parameters select the canonical form.
pub fn choose(set: &SynonymSet, word_length: f64, frequency: f64, strength: f64, is_verb: bool) -> usize {
    let length = normalized(set.words.iter().map(|w| w.chars().count() as f64));
    let common = normalized(set.frequency.iter().map(|&r| -f64::from(r)));
    let strong = match (&set.strength, is_verb) {
        (Some(s), true) => normalized(s.iter().map(|&r| f64::from(r))),
        _ => vec![0.0; set.words.len()],
    };
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for i in 0..set.words.len() {
        let score = (word_length - 0.5) * length[i] + (frequency - 0.5) * common[i] + (strength - 0.5) * strong[i];
        if score > best_score + 1e-12 {
            best = i;
            best_score = score;
        }
    }
    best
}

/// Replaces every content word that has a synonym set with the candidate
/// preferred by WORD LENGTH, LEXICAL FREQUENCY and VERB STRENGTH.
///
/// Nodes marked `fixed` (wording chosen by a restatement) and marker nodes
/// are left alone.
pub fn lexicalize(tree: &DSyntSNode, params: &GenerationParams, synonyms: &SynonymLexicon) -> DSyntSNode {
    set_stage("lexicalize");
    let word_length = params.get(Param::WordLength);
    let frequency = params.get(Param::LexicalFrequency);
    let strength = params.get(Param::VerbStrength);
    let mut out = tree.clone();
    out.walk_mut(&mut |node| {
        if node.flag(attr::FIXED) || matches!(node.word_class, WordClass::Marker | WordClass::Pronoun) {
            return;
        }
        if let Some(set) = synonyms.set_of(&node.lexeme) {
            let i = choose(set, word_length, frequency, strength, node.word_class == WordClass::Verb);
            node.lexeme = set.words[i].clone();
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Config;

    fn with(set: &[(Param, f64)]) -> GenerationParams {
        let mut p = GenerationParams::neutral();
        for &(q, v) in set {
            p.set(q, v);
        }
        p
    }

    fn pick(word: &str, class: WordClass, p: &GenerationParams) -> String {
        let synonyms = Config::shipped().synonyms;
        lexicalize(&DSyntSNode::new(word, class), p, &synonyms).lexeme
    }

    #[test]
    fn neutral_picks_canonical() {
        let synonyms = Config::shipped().synonyms;
        let p = GenerationParams::neutral();
        for set in &synonyms.sets {
            for w in &set.words {
                assert_eq!(pick(w, WordClass::Adjective, &p), set.words[0]);
            }
        }
    }

    #[test]
    fn word_length_extremes() {
        let long = with(&[(Param::WordLength, 1.0)]);
        assert_eq!(pick("risky", WordClass::Adjective, &long), "dangerous");
        let short = with(&[(Param::WordLength, 0.0)]);
        assert_eq!(pick("suspicious", WordClass::Adjective, &short), "shady");
    }

    #[test]
    fn verb_strength_follows_rank_table() {
        let synonyms = Config::shipped().synonyms;
        let strong = with(&[(Param::VerbStrength, 1.0)]);
        let weak = with(&[(Param::VerbStrength, 0.0)]);
        for set in synonyms.sets.iter().filter(|s| s.strength.is_some()) {
            let ranks = set.strength.as_ref().unwrap();
            let max = ranks.iter().max().unwrap();
            let min = ranks.iter().min().unwrap();
            let strongest = &set.words[ranks.iter().position(|r| r == max).unwrap()];
            let weakest = &set.words[ranks.iter().position(|r| r == min).unwrap()];
            assert_eq!(&pick(&set.words[0], WordClass::Verb, &strong), strongest);
            assert_eq!(&pick(&set.words[0], WordClass::Verb, &weak), weakest);
        }
        // Strength only applies to verbs.
        assert_eq!(pick("believe", WordClass::Noun, &strong), "believe");
    }

    #[test]
    fn fixed_nodes_are_kept() {
        let synonyms = Config::shipped().synonyms;
        let node = DSyntSNode::new("shady", WordClass::Adjective).with_attr(attr::FIXED, "true");
        assert_eq!(lexicalize(&node, &GenerationParams::neutral(), &synonyms).lexeme, "shady");
    }

    #[test]
    fn antonyms_are_symmetric() {
        let synonyms = Config::shipped().synonyms;
        for (a, b) in &synonyms.antonyms {
            assert_eq!(synonyms.antonym(a), Some(b.as_str()));
            assert_eq!(synonyms.antonym(b), Some(a.as_str()));
        }
        assert_eq!(synonyms.antonym("suspicious"), Some("trustworthy"));
    }

    #[test]
    fn duplicate_word_rejected() {
        let set = |w: &[&str]| SynonymSet {
            words: w.iter().map(|s| s.to_string()).collect(),
            frequency: vec![1; w.len()],
            strength: None,
        };
        assert!(SynonymLexicon::new(vec![set(&["a", "b"]), set(&["b", "c"])], vec![]).is_err());
    }
}
