//! Surface realization: linearizing a sentence tree into English.

use super::tree::{attr, DSyntSNode, Relation, WordClass};
use crate::Error;

enum Chunk {
    Word(String),
    /// Punctuation glued to the preceding word.
    Punct(String),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Person {
    First,
    Third,
}

fn third_singular(verb: &str) -> String {
    match verb {
        "be" => "is".into(),
        "have" => "has".into(),
        v if v.ends_with(['s', 'x', 'z', 'o']) || v.ends_with("sh") || v.ends_with("ch") => format!("{v}es"),
        v if v.ends_with('y') && !v[..v.len() - 1].ends_with(['a', 'e', 'i', 'o', 'u']) => {
            format!("{}ies", &v[..v.len() - 1])
        }
        v => format!("{v}s"),
    }
}

/// Finite verb group split around the slot where pre-verb adverbs go.
fn verb_group(verb: &str, negated: bool, modal: Option<&str>, person: Person) -> (Vec<String>, Vec<String>) {
    let s = |x: &str| x.to_string();
    match (modal, negated) {
        (Some(m), false) => (vec![s(m)], vec![s(verb)]),
        (Some(m), true) => (vec![], vec![format!("{m}n't"), s(verb)]),
        (None, false) if verb == "be" => (vec![if person == Person::First { s("am") } else { s("is") }], vec![]),
        (None, true) if verb == "be" => (vec![], if person == Person::First { vec![s("am"), s("not")] } else { vec![s("isn't")] }),
        (None, false) => (vec![], vec![if person == Person::First { s(verb) } else { third_singular(verb) }]),
        (None, true) => (vec![], vec![s(if person == Person::First { "don't" } else { "doesn't" }), s(verb)]),
    }
}

fn position(node: &DSyntSNode) -> Option<&str> {
    node.attr(attr::POSITION)
}

fn markers_at<'a>(node: &'a DSyntSNode, at: &'a str) -> impl Iterator<Item = &'a DSyntSNode> + 'a {
    node.children(Relation::Attr)
        .iter()
        .filter(move |c| c.word_class == WordClass::Marker && position(c) == Some(at))
}

fn marker(node: &DSyntSNode, out: &mut Vec<Chunk>) {
    out.push(Chunk::Word(node.lexeme.clone()));
    if let Some(j) = node.attr(attr::JOIN).filter(|j| !j.is_empty()) {
        out.push(Chunk::Punct(j.to_string()));
    }
}

fn head_word(node: &DSyntSNode) -> String {
    if node.flag(attr::STUTTER) {
        if let Some(first) = node.lexeme.chars().next() {
            return format!("{first}-{}", node.lexeme);
        }
    }
    node.lexeme.clone()
}

fn adjective(node: &DSyntSNode, out: &mut Vec<Chunk>) {
    for m in markers_at(node, "pre-modifier") {
        marker(m, out);
    }
    for a in node.children(Relation::Attr).iter().filter(|a| a.word_class == WordClass::Adverb) {
        out.push(Chunk::Word(a.lexeme.clone()));
    }
    out.push(Chunk::Word(head_word(node)));
}

fn noun_phrase(node: &DSyntSNode, out: &mut Vec<Chunk>) {
    for m in markers_at(node, "start") {
        marker(m, out);
    }
    if node.word_class == WordClass::Pronoun {
        out.push(Chunk::Word(head_word(node)));
        return;
    }
    for key in [attr::PREPOSITION, attr::DETERMINER] {
        if let Some(w) = node.attr(key) {
            out.push(Chunk::Word(w.to_string()));
        }
    }
    let adjectives: Vec<&DSyntSNode> = node
        .children(Relation::Attr)
        .iter()
        .filter(|a| a.word_class == WordClass::Adjective)
        .collect();
    if adjectives.is_empty() {
        for m in markers_at(node, "pre-modifier") {
            marker(m, out);
        }
    }
    for (i, a) in adjectives.iter().enumerate() {
        if i == 0 {
            for m in markers_at(node, "pre-modifier") {
                marker(m, out);
            }
        }
        adjective(a, out);
    }
    out.push(Chunk::Word(head_word(node)));
}

fn dependent(node: &DSyntSNode, out: &mut Vec<Chunk>) -> Result<(), Error> {
    match node.word_class {
        WordClass::Verb => clause(node, out),
        WordClass::Adjective => {
            adjective(node, out);
            Ok(())
        }
        WordClass::Marker | WordClass::Adverb => {
            marker(node, out);
            Ok(())
        }
        WordClass::Noun | WordClass::Pronoun => {
            noun_phrase(node, out);
            Ok(())
        }
    }
}

fn clause(node: &DSyntSNode, out: &mut Vec<Chunk>) -> Result<(), Error> {
    if node.word_class != WordClass::Verb {
        return Err(Error::Realization(format!("`{}` is not a verb", node.lexeme)));
    }
    let attrs = node.children(Relation::Attr);
    for m in markers_at(node, "start") {
        marker(m, out);
    }
    for fronted in attrs
        .iter()
        .filter(|a| a.word_class != WordClass::Marker && position(a) == Some("start"))
    {
        dependent(fronted, out)?;
        out.push(Chunk::Punct(fronted.attr(attr::SEP).unwrap_or(",").to_string()));
    }
    if let Some(c) = node.attr(attr::COMPLEMENTIZER) {
        out.push(Chunk::Word(c.to_string()));
    }
    let subject = node.subject();
    if let Some(s) = subject {
        noun_phrase(s, out);
    }
    let person = match subject {
        Some(s) if s.word_class == WordClass::Pronoun && s.lexeme == "I" => Person::First,
        _ => Person::Third,
    };
    let negated = node.attr(attr::POLARITY) == Some("negative");
    let (head, tail) = verb_group(&node.lexeme, negated, node.attr(attr::MODAL), person);
    out.extend(head.into_iter().map(Chunk::Word));
    for m in markers_at(node, "pre-verb") {
        marker(m, out);
    }
    out.extend(tail.into_iter().map(Chunk::Word));
    for m in markers_at(node, "pre-object") {
        marker(m, out);
    }
    for c in node.children(Relation::II) {
        match c.attr(attr::JOIN) {
            Some(j @ ("," | "...")) => out.push(Chunk::Punct(j.to_string())),
            Some(j) if !j.is_empty() => out.push(Chunk::Word(j.to_string())),
            _ => {}
        }
        dependent(c, out)?;
    }
    for a in attrs.iter().filter(|a| position(a) == Some("end")) {
        if a.word_class == WordClass::Marker {
            if !a.flag(attr::CUE) {
                out.push(Chunk::Punct(",".into()));
            }
            out.push(Chunk::Word(a.lexeme.clone()));
            continue;
        }
        if let Some(sep) = a.attr(attr::SEP).filter(|s| !s.is_empty()) {
            out.push(Chunk::Punct(sep.to_string()));
        }
        dependent(a, out)?;
    }
    Ok(())
}

fn capitalize_first(text: &str) -> String {
    let mut done = false;
    text.chars()
        .map(|c| {
            if !done && c.is_alphabetic() {
                done = true;
                c.to_uppercase().next().unwrap_or(c)
            } else {
                c
            }
        })
        .collect()
}

/// Linearizes a sentence tree.
///
/// Subjects precede the verb and complements follow it; modifiers are
/// placed by their `position` attribute. Verbs agree with a third-person
/// singular subject (or "I"), negation uses do-support or "isn't", and a
/// `modal` attribute yields forms like "could be". The first letter is
/// capitalized and the sentence ends with the `punct` attribute (default
/// "."), preceded by the tag question if there is one.
pub fn realize(tree: &DSyntSNode) -> Result<String, Error> {
    tree.validate_sentence()?;
    let mut chunks = Vec::new();
    clause(tree, &mut chunks)?;
    if let Some(tag) = tree.attr(attr::TAG) {
        chunks.push(Chunk::Punct(",".into()));
        chunks.extend(tag.split_whitespace().map(|w| Chunk::Word(w.to_string())));
    }
    let mut text = String::new();
    for chunk in chunks {
        match chunk {
            Chunk::Word(w) => {
                if !text.is_empty() {
                    text.push(' ');
                }
                text.push_str(&w);
            }
            Chunk::Punct(p) => text.push_str(&p),
        }
    }
    while text.ends_with([',', ';']) {
        text.pop();
    }
    if text.trim().is_empty() {
        return Err(Error::Realization("sentence has no words".into()));
    }
    text.push_str(tree.attr(attr::PUNCT).unwrap_or("."));
    Ok(capitalize_first(&text))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::{explain_feature, FeatureCategory, MalwareFeature};
    use crate::nlg::template::proposition_clause;
    use crate::Config;

    fn sms(i: usize) -> DSyntSNode {
        let config = Config::shipped();
        let props = explain_feature(&MalwareFeature::new("SEND_SMS", FeatureCategory::Permission), &config.lexicon);
        proposition_clause(&props[i])
    }

    #[test]
    fn basic_claim() {
        assert_eq!(realize(&sms(0)).unwrap(), "Sending SMS messages is the suspicious permission.");
        assert_eq!(realize(&sms(1)).unwrap(), "Sending SMS messages doesn't have any security promise.");
        assert_eq!(realize(&sms(2)).unwrap(), "Sending SMS messages is at high risk.");
    }

    #[test]
    fn punctuation_and_modality() {
        let loud = sms(0).with_attr(attr::PUNCT, "!");
        assert_eq!(realize(&loud).unwrap(), "Sending SMS messages is the suspicious permission!");
        let soft = sms(0).with_attr(attr::MODAL, "could");
        assert_eq!(realize(&soft).unwrap(), "Sending SMS messages could be the suspicious permission.");
        let soft_neg = sms(0).with_attr(attr::MODAL, "could").with_attr(attr::POLARITY, "negative");
        assert_eq!(realize(&soft_neg).unwrap(), "Sending SMS messages couldn't be the suspicious permission.");
    }

    #[test]
    fn extended_frame() {
        let frame = DSyntSNode::new("believe", WordClass::Verb)
            .with(Relation::I, DSyntSNode::new("I", WordClass::Pronoun))
            .with(Relation::II, sms(0).with_attr(attr::COMPLEMENTIZER, "that"));
        assert_eq!(
            realize(&frame).unwrap(),
            "I believe that sending SMS messages is the suspicious permission."
        );
        let third = DSyntSNode::new("know", WordClass::Verb)
            .with(Relation::I, DSyntSNode::new("everybody", WordClass::Noun))
            .with(Relation::II, DSyntSNode::new("risk", WordClass::Noun));
        assert_eq!(realize(&third).unwrap(), "Everybody knows risk.");
    }

    #[test]
    fn verbless_root_is_an_error() {
        assert!(matches!(
            realize(&DSyntSNode::new("permission", WordClass::Noun)),
            Err(Error::Realization(_))
        ));
    }

    #[test]
    fn agreement() {
        assert_eq!(third_singular("believe"), "believes");
        assert_eq!(third_singular("watch"), "watches");
        assert_eq!(third_singular("carry"), "carries");
        assert_eq!(third_singular("say"), "says");
        assert_eq!(third_singular("have"), "has");
    }

    #[test]
    fn stable() {
        let t = sms(1).with_attr(attr::TAG, "does it").with_attr(attr::PUNCT, "?");
        assert_eq!(realize(&t).unwrap(), realize(&t).unwrap());
        assert_eq!(realize(&t).unwrap(), "Sending SMS messages doesn't have any security promise, does it?");
    }
}
