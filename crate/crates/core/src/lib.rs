//! Personalised, security-centric descriptions of Android app risk features.
//!
//! The crate is organised as a small pipeline:
//!
//! * [`concern`] ranks the eight tracked permissions by how often a user
//!   denied them in apps of a given category.
//! * [`personality`] scores BFI-44 questionnaires, labels Big Five levels and
//!   trains classifiers that predict trait groups from app adoption.
//! * [`content`] turns detector features (`SEND_SMS`, intents, hosts, ...)
//!   into propositions and plans which of them to say.
//! * [`nlg`] maps a personality profile to stylistic parameters and realizes
//!   propositions through deep-syntactic trees.
//! * [`pipeline`] glues the stages together and provides the plain
//!   template baseline.
//! * [`metrics`] computes readability indices and a content-overlap proxy.
//!
//! ```
//! use perscribe::{Config, MalwareFeature, FeatureCategory, TraitProfile};
//!
//! let config = Config::shipped();
//! let features = vec![MalwareFeature::new("SEND_SMS", FeatureCategory::Permission)];
//! let ranking = config.default_ranking().unwrap();
//! let description = perscribe::generate_description(
//!     &config,
//!     &features,
//!     &TraitProfile::neutral(),
//!     &ranking,
//!     7,
//! )
//! .unwrap();
//! assert!(description.text().contains("SMS"));
//! ```

pub mod concern;
pub mod config;
pub mod content;
mod error;
pub mod metrics;
pub mod nlg;
pub mod personality;
pub mod pipeline;
pub mod rng;

pub use concern::{
    AccessStatus, AppCategory, AppPermissionRecord, AttentionRanking, PermissionKind,
    PermissionSnapshot, RankingSource,
};
pub use config::Config;
pub use content::{FeatureCategory, MalwareFeature, Proposition};
pub use error::Error;
pub use nlg::{GenerationParams, Param};
pub use personality::{Dimension, Gender, Level, TraitProfile};
pub use pipeline::{baseline_description, generate_description, PersonalisedDescription};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/concerns.md")]
    mod concerns {}
    #[doc = include_str!("../../../book/src/personality.md")]
    mod personality {}
    #[doc = include_str!("../../../book/src/content.md")]
    mod content {}
    #[doc = include_str!("../../../book/src/realization.md")]
    mod realization {}
    #[doc = include_str!("../../../book/src/style.md")]
    mod style {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
}
