//! Stylistic realization of planned propositions.
//!
//! A [`TraitProfile`](crate::TraitProfile) is first mapped to
//! [`GenerationParams`]. Each proposition is then wrapped in a syntactic
//! template, adjacent clauses are combined, pragmatic markers are grafted
//! on, words are chosen from synonym sets and the tree is linearized.

pub mod aggregate;
pub mod lexical;
pub mod markers;
pub mod params;
pub mod realize;
pub mod template;
pub mod tree;

pub use aggregate::{aggregate, link_relations};
pub use lexical::{lexicalize, SynonymLexicon};
pub use markers::{insert_markers, MarkerBank, MarkerUse};
pub use params::{params_from_profile, GenerationParams, Operation, Param, ParamGroup, TraitParamMap};
pub use realize::realize;
pub use template::{select_template, TemplateBank};
pub use tree::{DSyntSNode, Relation, WordClass};
