//! Syntactic templates: basic and extended frames around a proposition.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::params::{set_stage, GenerationParams, Param};
use super::tree::{attr, is_content_clause, DSyntSNode, Relation, WordClass};
use crate::config::{check_schema_version, parse_json};
use crate::content::{Complement, Proposition, PropositionKind};
use crate::rng::GenRng;
use crate::Error;

/// Lexeme marking where the proposition clause goes in a template tree.
pub const CLAUSE_SLOT: &str = "$CLAUSE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Basic,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    Claim,
    Support,
    Any,
}

impl Pattern {
    fn matches(self, kind: PropositionKind) -> bool {
        matches!(
            (self, kind),
            (Pattern::Any, _) | (Pattern::Claim, PropositionKind::Claim) | (Pattern::Support, PropositionKind::Support)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntacticTemplate {
    pub name: String,
    pub pattern: Pattern,
    pub variant: Variant,
    pub self_references: u32,
    /// Tree skeleton; exactly one node has the lexeme `$CLAUSE`.
    pub tree: DSyntSNode,
}

impl SyntacticTemplate {
    fn validate(&self) -> Result<(), Error> {
        let mut slots = 0;
        let mut first_person = 0;
        self.tree.walk(&mut |n| {
            if n.lexeme == CLAUSE_SLOT {
                slots += 1;
            }
            if n.word_class == WordClass::Pronoun && n.lexeme == "I" {
                first_person += 1;
            }
        });
        if slots != 1 {
            return Err(Error::Config(format!("template `{}` needs exactly one {CLAUSE_SLOT} slot", self.name)));
        }
        if first_person != self.self_references {
            return Err(Error::Config(format!(
                "template `{}` declares {} self-references but has {first_person}",
                self.name, self.self_references
            )));
        }
        let is_bare = self.tree.lexeme == CLAUSE_SLOT && self.tree.relations.is_empty();
        match self.variant {
            Variant::Basic if !is_bare => Err(Error::Config(format!(
                "basic template `{}` must be the bare clause",
                self.name
            ))),
            Variant::Extended if is_bare => Err(Error::Config(format!(
                "extended template `{}` must add a frame around the clause",
                self.name
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateBank {
    pub schema_version: u32,
    pub templates: Vec<SyntacticTemplate>,
}

impl TemplateBank {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let bank: TemplateBank = parse_json(text, "template bank")?;
        check_schema_version(bank.schema_version, "template bank")?;
        for t in &bank.templates {
            t.validate()?;
        }
        Ok(bank)
    }

    /// Every proposition kind must have at least one template of each variant.
    pub fn check_coverage(&self) -> Result<(), Error> {
        for kind in [PropositionKind::Claim, PropositionKind::Support] {
            for variant in [Variant::Basic, Variant::Extended] {
                if !self.templates.iter().any(|t| t.pattern.matches(kind) && t.variant == variant) {
                    return Err(Error::TemplateCoverage(format!("{kind:?} ({variant:?} variant)")));
                }
            }
        }
        Ok(())
    }

    /// Words contributed by template frames rather than by content.
    pub fn frame_words(&self) -> BTreeSet<String> {
        let mut words = BTreeSet::new();
        for t in &self.templates {
            t.tree.walk(&mut |n| {
                if n.lexeme != CLAUSE_SLOT {
                    words.extend(n.lexeme.split_whitespace().map(str::to_lowercase));
                }
                if let Some(c) = n.attr(attr::COMPLEMENTIZER) {
                    words.insert(c.to_lowercase());
                }
            });
        }
        words
    }
}

/// Builds the bare clause tree for a proposition.
pub fn proposition_clause(prop: &Proposition) -> DSyntSNode {
    let mut verb = DSyntSNode::new(&prop.predicate.verb, WordClass::Verb)
        .with_attr(attr::CLAUSE, "content")
        .with_attr(attr::PROP, &prop.id)
        .with_attr(attr::SUBJECT_TYPE, &prop.subject_type)
        .with_attr(
            attr::POLARITY,
            if prop.predicate.negated { "negative" } else { "positive" },
        );
    verb.push(
        Relation::I,
        DSyntSNode::new(&prop.subject, WordClass::Noun).with_attr(attr::CONTENT, "true"),
    );
    let intensifier = prop
        .predicate
        .intensifier
        .as_ref()
        .map(|w| DSyntSNode::new(w, WordClass::Adverb));
    let complement = match &prop.predicate.complement {
        Complement::Noun(np) => {
            let mut head = DSyntSNode::new(&np.head, WordClass::Noun).with_attr(attr::CONTENT, "true");
            if let Some(d) = &np.determiner {
                head.set_attr(attr::DETERMINER, d);
            }
            if let Some(p) = &np.preposition {
                head.set_attr(attr::PREPOSITION, p);
            }
            for (i, m) in np.modifiers.iter().enumerate() {
                let mut adj = DSyntSNode::new(m, WordClass::Adjective).with_attr(attr::CONTENT, "true");
                if i == 0 {
                    if let Some(int) = &intensifier {
                        adj.push(Relation::Attr, int.clone());
                    }
                }
                head.push(Relation::Attr, adj);
            }
            head
        }
        Complement::Adjective { adjective } => {
            let mut adj = DSyntSNode::new(adjective, WordClass::Adjective).with_attr(attr::CONTENT, "true");
            if let Some(int) = intensifier {
                adj.push(Relation::Attr, int);
            }
            adj
        }
    };
    verb.push(Relation::II, complement);
    if prop.paraphrase {
        verb.walk_mut(&mut |n| {
            if n.flag(attr::CONTENT) {
                n.set_attr(attr::FIXED, "true");
            }
        });
    }
    verb
}

fn instantiate(template: &SyntacticTemplate, clause: DSyntSNode) -> DSyntSNode {
    fn fill(node: DSyntSNode, clause: &mut Option<DSyntSNode>) -> DSyntSNode {
        if node.lexeme == CLAUSE_SLOT {
            let mut c = clause.take().expect("one slot");
            for (k, v) in node.attributes {
                c.attributes.insert(k, v);
            }
            return c;
        }
        let DSyntSNode {
            lexeme,
            word_class,
            relations,
            attributes,
        } = node;
        DSyntSNode {
            lexeme,
            word_class,
            relations: relations
                .into_iter()
                .map(|(r, kids)| (r, kids.into_iter().map(|k| fill(k, clause)).collect()))
                .collect(),
            attributes,
        }
    }
    let mut slot = Some(clause);
    let mut tree = fill(template.tree.clone(), &mut slot);
    tree.set_attr(attr::TEMPLATE, &template.name);
    tree
}

/// Wraps a proposition in a template frame.
///
/// An extended template is chosen with probability CLAIM COMPLEXITY. Among
/// templates of that variant, the ones whose self-reference count (scaled to
/// `[0, 1]` by the largest count on offer) lies closest to SELF-REFERENCES
/// are kept and one of them is drawn uniformly. A CLAIM POLARITY below 0.5
/// softens the copula of a claim to "could be".
pub fn select_template(
    prop: &Proposition,
    params: &GenerationParams,
    bank: &TemplateBank,
    rng: &mut GenRng,
) -> Result<DSyntSNode, Error> {
    set_stage("select_template");
    let complexity = params.get(Param::ClaimComplexity);
    let self_refs = params.get(Param::SelfReferences);
    let polarity = params.get(Param::ClaimPolarity);

    let matching: Vec<&SyntacticTemplate> = bank.templates.iter().filter(|t| t.pattern.matches(prop.kind)).collect();
    if matching.is_empty() {
        return Err(Error::TemplateCoverage(prop.id.clone()));
    }
    let want = if rng.gen::<f64>() < complexity {
        Variant::Extended
    } else {
        Variant::Basic
    };
    let mut pool: Vec<&SyntacticTemplate> = matching.iter().copied().filter(|t| t.variant == want).collect();
    if pool.is_empty() {
        pool = matching;
    }
    let max_refs = pool.iter().map(|t| t.self_references).max().unwrap_or(0);
    let distance = |t: &SyntacticTemplate| {
        let scaled = if max_refs == 0 {
            0.0
        } else {
            f64::from(t.self_references) / f64::from(max_refs)
        };
        (scaled - self_refs).abs()
    };
    let best = pool.iter().map(|t| distance(t)).fold(f64::INFINITY, f64::min);
    let tied: Vec<&SyntacticTemplate> = pool.into_iter().filter(|t| distance(t) - best < 1e-12).collect();
    let chosen = tied[rng.gen_range(0..tied.len())];

    let mut clause = proposition_clause(prop);
    if prop.kind == PropositionKind::Claim && polarity < 0.5 && clause.lexeme == "be" {
        clause.set_attr(attr::MODAL, "could");
    }
    let tree = instantiate(chosen, clause);
    debug_assert!(tree.find(&is_content_clause).is_some());
    Ok(tree)
}
