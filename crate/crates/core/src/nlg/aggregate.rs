//! Clause combining: joining adjacent proposition trees into sentences.

use rand::Rng;

use super::params::{set_stage, GenerationParams, Operation};
use super::tree::{attr, is_content_clause, DSyntSNode, Relation, WordClass};
use crate::content::{Proposition, RhetoricalRelation};
use crate::rng::{fork, GenRng};
use crate::Error;

/// Most clauses a single sentence may hold.
pub const MAX_CLAUSES: usize = 3;

/// Every word aggregation may introduce as a cue.
pub const CUE_WORDS: [&str; 16] = [
    "and", "with", "no", "which", "so", "because", "since", "however", "while", "but", "on the other hand", "also",
    "even if", "although", "though", "it",
];

fn relation_name(r: RhetoricalRelation) -> &'static str {
    match r {
        RhetoricalRelation::Justify => "justify",
        RhetoricalRelation::Contrast => "contrast",
        RhetoricalRelation::Infer => "infer",
        RhetoricalRelation::Concede => "concede",
        RhetoricalRelation::Restate => "restate",
    }
}

/// The relation linking each planned proposition to the one before it.
///
/// A proposition's own relation wins; a claim that follows a support
/// inherits the support's relation; anything else defaults to Infer. The
/// first entry is `None`.
pub fn link_relations(plan: &[Proposition]) -> Vec<Option<RhetoricalRelation>> {
    plan.iter()
        .enumerate()
        .map(|(i, p)| {
            if i == 0 {
                return None;
            }
            let own = p.rel_to.as_ref().map(|r| r.relation);
            let previous = plan[i - 1].rel_to.as_ref().map(|r| r.relation);
            Some(own.or(previous).unwrap_or(RhetoricalRelation::Infer))
        })
        .collect()
}

fn cue(word: &str) -> DSyntSNode {
    DSyntSNode::new(word, WordClass::Marker)
        .with_attr(attr::CUE, "true")
        .with_attr(attr::POSITION, "start")
}

fn is_basic(tree: &DSyntSNode) -> bool {
    is_content_clause(tree)
}

fn pronominalize(tree: &mut DSyntSNode) {
    if let Some(clause) = tree.find_mut(&is_content_clause) {
        if let Some(subject) = clause.subject_mut() {
            if subject.word_class == WordClass::Noun {
                *subject = DSyntSNode::new("it", WordClass::Pronoun);
            }
        }
    }
}

fn has_fronted(tree: &DSyntSNode) -> bool {
    tree.children(Relation::Attr)
        .iter()
        .any(|c| c.word_class == WordClass::Verb && c.attr(attr::POSITION) == Some("start"))
}

fn mergeable(a: &DSyntSNode, b: &DSyntSNode) -> bool {
    let same = |k: &str| a.attr(k) == b.attr(k);
    is_basic(a)
        && is_basic(b)
        && a.lexeme == b.lexeme
        && same(attr::POLARITY)
        && same(attr::MODAL)
        && match (a.subject(), b.subject()) {
            (Some(x), Some(y)) => x.lexeme == y.lexeme && x.word_class == y.word_class,
            _ => false,
        }
}

fn allowed(op: Operation, current: &DSyntSNode, next: &DSyntSNode, clauses: usize) -> bool {
    match op {
        Operation::Merge | Operation::MergeWithComma | Operation::ObjectEllipsis => mergeable(current, next),
        Operation::With => is_basic(next) && next.lexeme == "have",
        Operation::Relative => is_basic(next),
        Operation::So => clauses == 1,
        Operation::Although => !has_fronted(current),
        _ => true,
    }
}

fn choose(
    current: &DSyntSNode,
    next: &DSyntSNode,
    relation: RhetoricalRelation,
    clauses: usize,
    params: &GenerationParams,
    rng: &mut GenRng,
) -> Operation {
    let candidates: Vec<(Operation, f64)> = Operation::allowed(relation)
        .iter()
        .map(|&op| {
            let w = params.operation_weight(relation, op);
            (op, if allowed(op, current, next, clauses) { w } else { 0.0 })
        })
        .collect();
    let total: f64 = candidates.iter().map(|(_, w)| w).sum();
    let u: f64 = rng.gen::<f64>() * total;
    if total <= 0.0 {
        return Operation::Period;
    }
    let mut acc = 0.0;
    for &(op, w) in &candidates {
        acc += w;
        if w > 0.0 && u < acc {
            return op;
        }
    }
    candidates.iter().rev().find(|(_, w)| *w > 0.0).map_or(Operation::Period, |(op, _)| *op)
}

/// Attaches `sub` to the end of `main` with the given separator and cues.
fn attach(main: &mut DSyntSNode, mut sub: DSyntSNode, link: Operation, sep: &str, cues: &[&str]) {
    for (i, c) in cues.iter().enumerate() {
        sub.children_mut(Relation::Attr).insert(i, cue(c));
    }
    sub.set_attr(attr::LINK, link.name());
    sub.set_attr(attr::POSITION, "end");
    sub.set_attr(attr::SEP, sep);
    main.push(Relation::Attr, sub);
}

fn combine(mut current: DSyntSNode, mut next: DSyntSNode, op: Operation) -> DSyntSNode {
    match op {
        Operation::Merge | Operation::MergeWithComma | Operation::ObjectEllipsis => {
            let join = match op {
                Operation::Merge => "and",
                Operation::MergeWithComma => ",",
                _ => "...",
            };
            let mut complements = std::mem::take(next.children_mut(Relation::II));
            if let Some(first) = complements.first_mut() {
                first.set_attr(attr::JOIN, join);
            }
            let merged = match (current.attr("merged"), next.attr(attr::PROP)) {
                (Some(m), Some(p)) => format!("{m},{p}"),
                (None, Some(p)) => p.to_string(),
                (m, None) => m.unwrap_or_default().to_string(),
            };
            current.set_attr("merged", merged);
            current.children_mut(Relation::II).extend(complements);
            current
        }
        Operation::With => {
            let negated = next.attr(attr::POLARITY) == Some("negative");
            let mut object = next.children_mut(Relation::II).remove(0);
            if negated {
                object.set_attr(attr::DETERMINER, "no");
            }
            object.children_mut(Relation::Attr).insert(0, cue("with"));
            object.set_attr(attr::LINK, op.name());
            object.set_attr(attr::POSITION, "end");
            object.set_attr(attr::SEP, ",");
            if let Some(p) = next.attr(attr::PROP) {
                object.set_attr(attr::PROP, p);
            }
            current.push(Relation::Attr, object);
            current
        }
        Operation::Relative => {
            next.relations.remove(&Relation::I);
            attach(&mut current, next, op, ",", &["which"]);
            current
        }
        Operation::So => {
            pronominalize(&mut current);
            attach(&mut next, current, op, ",", &["so"]);
            next
        }
        Operation::Although => {
            pronominalize(&mut current);
            next.children_mut(Relation::Attr).insert(0, cue("although"));
            next.set_attr(attr::LINK, op.name());
            next.set_attr(attr::POSITION, "start");
            next.set_attr(attr::SEP, ",");
            current.children_mut(Relation::Attr).insert(0, next);
            current
        }
        _ => {
            pronominalize(&mut next);
            let (sep, cues): (&str, &[&str]) = match op {
                Operation::Conjunction => (",", &["and"]),
                Operation::Because => ("", &["because"]),
                Operation::Since => (",", &["since"]),
                Operation::However => (";", &["however,"]),
                Operation::While => (",", &["while"]),
                Operation::But | Operation::ButThough => (",", &["but"]),
                Operation::OnTheOtherHand => (";", &["on the other hand,"]),
                Operation::Also => (",", &["and"]),
                Operation::EvenIf => (",", &["even if"]),
                _ => unreachable!("handled above"),
            };
            if op == Operation::Also {
                if let Some(clause) = next.find_mut(&is_content_clause) {
                    clause.push(Relation::Attr, cue("also").with_attr(attr::POSITION, "pre-verb"));
                }
            }
            if op == Operation::ButThough {
                next.push(Relation::Attr, cue("though").with_attr(attr::POSITION, "end"));
            }
            attach(&mut current, next, op, sep, cues);
            current
        }
    }
}

fn close(mut tree: DSyntSNode, trace: &[String]) -> DSyntSNode {
    if !trace.is_empty() {
        tree.set_attr(attr::TRACE, trace.join(";"));
    }
    tree
}

/// Combines adjacent trees according to the relation each holds with its
/// predecessor.
///
/// For every adjacent pair an operation is drawn from the relation's
/// allowed set, weighted by the product of the operation's general
/// parameter and its relation-specific one, after dropping operations whose
/// preconditions fail (MERGE needs the same verb, polarity, modality and
/// subject; WITH needs a "have" clause; relative clauses need a plain
/// clause). If nothing is left, or the sentence already holds
/// [`MAX_CLAUSES`] clauses, the pair is split with PERIOD. Each pair draws
/// from its own forked stream.
pub fn aggregate(
    items: &[(DSyntSNode, Option<RhetoricalRelation>)],
    params: &GenerationParams,
    rng: &mut GenRng,
) -> Result<Vec<DSyntSNode>, Error> {
    set_stage("aggregate");
    let Some((first, _)) = items.first() else {
        return Err(Error::Validation("nothing to aggregate".into()));
    };
    let mut out = Vec::new();
    let mut current = first.clone();
    let mut clauses = 1;
    let mut trace: Vec<String> = Vec::new();
    for (tree, relation) in &items[1..] {
        let relation = relation.unwrap_or(RhetoricalRelation::Infer);
        let mut pair_rng = fork(rng);
        let op = if clauses >= MAX_CLAUSES {
            Operation::Period
        } else {
            choose(&current, tree, relation, clauses, params, &mut pair_rng)
        };
        let step = format!("{}:{}", relation_name(relation), op.name());
        if op == Operation::Period {
            out.push(close(std::mem::replace(&mut current, tree.clone()), &trace));
            trace = vec![step];
            clauses = 1;
        } else {
            current = combine(current, tree.clone(), op);
            trace.push(step);
            clauses += 1;
        }
    }
    out.push(close(current, &trace));
    Ok(out)
}

/// Operations recorded on a sentence tree by [`aggregate`].
pub fn trace_of(tree: &DSyntSNode) -> Vec<String> {
    tree.attr(attr::TRACE)
        .map(|s| s.split(';').map(str::to_string).collect())
        .unwrap_or_default()
}
