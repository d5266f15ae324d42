//! Readability indices and a content-overlap proxy.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::nlg::aggregate::CUE_WORDS;
use crate::nlg::SynonymLexicon;
use crate::{Config, Error};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextStats {
    pub sentences: usize,
    pub words: usize,
    pub syllables: usize,
    /// Letters and digits only.
    pub characters: usize,
    /// Words of three or more syllables.
    pub complex_words: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Readability {
    /// Flesch Reading Ease; higher is easier.
    pub fre: f64,
    /// Flesch-Kincaid Grade Level.
    pub fkgl: f64,
    /// Gunning Fog Score.
    pub gfs: f64,
    pub smog: f64,
    /// Automated Readability Index.
    pub ari: f64,
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Heuristic syllable count.
///
/// Counts maximal runs of vowels (`y` included), drops a silent final "e"
/// unless it follows a consonant plus "l" ("table"), and never returns less
/// than 1. Apostrophes and hyphens are ignored; any other non-letter makes
/// the word count as one syllable.
pub fn count_syllables(word: &str) -> usize {
    let w: String = word
        .chars()
        .filter(|c| !matches!(c, '\'' | '’' | '-'))
        .flat_map(char::to_lowercase)
        .collect();
    if w.is_empty() || !w.chars().all(|c| c.is_ascii_alphabetic()) {
        return 1;
    }
    // "isn't", "couldn't": the contracted "not" adds a syllable after a consonant.
    if let Some(stem) = w.strip_suffix("nt").filter(|_| word.contains("n't") || word.contains("n’t")).filter(|s| !s.is_empty()) {
        let extra = usize::from(!stem.ends_with(is_vowel));
        return count_syllables(stem) + extra;
    }
    let chars: Vec<char> = w.chars().collect();
    let mut groups = 0;
    let mut in_group = false;
    for &c in &chars {
        let v = is_vowel(c);
        if v && !in_group {
            groups += 1;
        }
        in_group = v;
    }
    let n = chars.len();
    if groups > 1 && chars[n - 1] == 'e' && !is_vowel(chars[n - 2]) {
        let consonant_le = n >= 3 && chars[n - 2] == 'l' && !is_vowel(chars[n - 3]);
        if !consonant_le {
            groups -= 1;
        }
    }
    groups.max(1)
}

fn strip(token: &str) -> &str {
    token.trim_matches(|c: char| !c.is_alphanumeric())
}

fn words(text: &str) -> impl Iterator<Item = &str> {
    text.split_whitespace().map(strip).filter(|w| !w.is_empty())
}

/// Number of sentences in `text`.
///
/// A run of `.`, `!` or `?` ends a sentence when it is followed by
/// whitespace or the end of the text. An ellipsis ("...") followed by
/// whitespace only ends one when the next word starts with a capital. Words
/// after the last terminator count as one more sentence.
fn count_sentences(text: &str) -> usize {
    let chars: Vec<char> = text.chars().collect();
    let mut count = 0;
    let mut pending_words = false;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if matches!(c, '.' | '!' | '?') {
            let start = i;
            while i < chars.len() && matches!(chars[i], '.' | '!' | '?') {
                i += 1;
            }
            let run = &chars[start..i];
            let at_end = i == chars.len();
            let ends = if at_end {
                true
            } else if chars[i].is_whitespace() {
                let ellipsis = run.len() >= 3 && run.iter().all(|&c| c == '.');
                if ellipsis {
                    let next = chars[i..].iter().find(|c| !c.is_whitespace());
                    next.map_or(true, |c| c.is_uppercase())
                } else {
                    true
                }
            } else {
                false
            };
            if ends && pending_words {
                count += 1;
                pending_words = false;
            }
            continue;
        }
        if c.is_alphanumeric() {
            pending_words = true;
        }
        i += 1;
    }
    if pending_words {
        count += 1;
    }
    count
}

pub fn text_stats(text: &str) -> TextStats {
    let mut stats = TextStats {
        sentences: count_sentences(text),
        ..TextStats::default()
    };
    for w in words(text) {
        let s = count_syllables(w);
        stats.words += 1;
        stats.syllables += s;
        stats.characters += w.chars().filter(|c| c.is_alphanumeric()).count();
        if s >= 3 {
            stats.complex_words += 1;
        }
    }
    stats
}

/// The five standard readability formulas.
pub fn readability(stats: &TextStats) -> Result<Readability, Error> {
    if stats.sentences == 0 || stats.words == 0 {
        return Err(Error::Undefined("readability"));
    }
    let w = stats.words as f64;
    let s = stats.sentences as f64;
    let y = stats.syllables as f64;
    let c = stats.complex_words as f64;
    let l = stats.characters as f64;
    Ok(Readability {
        fre: 206.835 - 1.015 * (w / s) - 84.6 * (y / w),
        fkgl: 0.39 * (w / s) + 11.8 * (y / w) - 15.59,
        gfs: 0.4 * ((w / s) + 100.0 * (c / w)),
        smog: 1.043 * (c * 30.0 / s).sqrt() + 3.1291,
        ari: 4.71 * (l / w) + 0.5 * (w / s) - 21.43,
    })
}

/// Decides which tokens count as content.
#[derive(Debug, Clone)]
pub struct ContentFilter {
    stopwords: BTreeSet<String>,
    /// Marker, cue and template-frame words.
    stylistic: BTreeSet<String>,
    synonyms: SynonymLexicon,
}

impl ContentFilter {
    pub fn new(config: &Config) -> Self {
        let mut stylistic: BTreeSet<String> = config.markers.marker_words().into_iter().collect();
        stylistic.extend(CUE_WORDS.iter().flat_map(|c| c.split_whitespace()).map(str::to_string));
        for w in config.templates.frame_words() {
            match config.synonyms.set_of(&w) {
                Some(set) => stylistic.extend(set.words.iter().cloned()),
                None => {
                    stylistic.insert(w);
                }
            }
        }
        ContentFilter::from_parts(config.stopwords.iter().cloned(), stylistic, config.synonyms.clone())
    }

    pub fn from_parts(
        stopwords: impl IntoIterator<Item = String>,
        stylistic: impl IntoIterator<Item = String>,
        synonyms: SynonymLexicon,
    ) -> Self {
        let lower = |w: String| w.to_lowercase();
        ContentFilter {
            stopwords: stopwords.into_iter().map(lower).collect(),
            stylistic: stylistic.into_iter().map(lower).collect(),
            synonyms,
        }
    }

    fn keep(&self, w: &str) -> bool {
        !self.stopwords.contains(w) && !self.stylistic.contains(w)
    }

    /// Lowercased content tokens of `text`.
    pub fn tokens(&self, text: &str) -> BTreeSet<String> {
        words(text)
            .map(|w| unstutter(&w.to_lowercase()))
            .filter(|w| self.keep(w))
            .collect()
    }

    fn canonical(&self, w: &str) -> String {
        let base = self.synonyms.canonical(w);
        match self.synonyms.antonym(base) {
            Some(opposite) => {
                let opposite = self.synonyms.canonical(opposite);
                std::cmp::min(base, opposite).to_string()
            }
            None => base.to_string(),
        }
    }

    /// Content lemmas: tokens with synonyms and antonyms collapsed to one
    /// representative and light suffix stripping applied.
    pub fn lemmas(&self, text: &str) -> BTreeSet<String> {
        words(text)
            .map(|w| unstutter(&w.to_lowercase()))
            .filter(|w| self.keep(w))
            .map(|w| {
                let w = self.canonical(&w);
                self.canonical(&stem(&w))
            })
            .filter(|w| self.keep(w))
            .collect()
    }
}

/// "s-sending" → "sending".
fn unstutter(w: &str) -> String {
    let mut parts = w.splitn(2, '-');
    match (parts.next(), parts.next()) {
        (Some(p), Some(rest)) if p.chars().count() == 1 && rest.starts_with(p) => rest.to_string(),
        _ => w.to_string(),
    }
}

fn stem(w: &str) -> String {
    if let Some(base) = w.strip_suffix("ies") {
        if base.len() >= 2 {
            return format!("{base}y");
        }
    }
    if let Some(base) = w.strip_suffix("ing") {
        if base.len() >= 3 {
            return base.to_string();
        }
    }
    if w.len() > 3 && w.ends_with('s') && !w.ends_with("ss") && !w.ends_with("us") && !w.ends_with("is") {
        return w[..w.len() - 1].to_string();
    }
    w.to_string()
}

/// Content lemmas of a text under the configuration's filter.
pub fn content_lemmas(text: &str, filter: &ContentFilter) -> BTreeSet<String> {
    filter.lemmas(text)
}

/// Jaccard overlap of the content-token sets of `a` and `b`; 1.0 when both
/// are empty.
pub fn content_overlap(a: &str, b: &str, filter: &ContentFilter) -> f64 {
    let x = filter.tokens(a);
    let y = filter.tokens(b);
    if x.is_empty() && y.is_empty() {
        return 1.0;
    }
    let shared = x.intersection(&y).count();
    let union = x.union(&y).count();
    shared as f64 / union as f64
}
