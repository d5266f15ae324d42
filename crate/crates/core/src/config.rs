//! Loading of the JSON data files that drive generation.
//!
//! Every configuration file carries `"schema_version": 1`. A run
//! configuration names the individual files; any file it omits falls back to
//! the copy compiled into the library, so `Config::shipped()` and an empty run
//! configuration behave identically.

use std::marker::PhantomData;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::de::{DeserializeOwned, DeserializeSeed, Deserializer, IgnoredAny, MapAccess, Visitor};
use serde::{Deserialize, Serialize};

use crate::concern::{self, AttentionRanking, NormStatistics};
use crate::content::FeatureLexicon;
use crate::metrics::ContentFilter;
use crate::nlg::lexical::SynonymLexicon;
use crate::nlg::markers::MarkerBank;
use crate::nlg::params::{ParamCoverage, TraitParamMap};
use crate::nlg::template::TemplateBank;
use crate::personality::{NormTable, ScoringKey};
use crate::Error;

/// The only schema version this build reads.
pub const SCHEMA_VERSION: u32 = 1;

pub(crate) mod shipped {
    pub const RUN: &str = include_str!("../data/perscribe.json");
    pub const LEXICON: &str = include_str!("../data/lexicon.json");
    pub const TEMPLATES: &str = include_str!("../data/templates.json");
    pub const MARKERS: &str = include_str!("../data/markers.json");
    pub const SYNONYMS: &str = include_str!("../data/synonyms.json");
    pub const TRAIT_PARAMS: &str = include_str!("../data/trait_params.json");
    pub const SCORING_KEY: &str = include_str!("../data/bfi_key.json");
    pub const NORMS: &str = include_str!("../data/norms.json");
    pub const DEFAULT_RANKING: &str = include_str!("../data/default_ranking.json");
    pub const STOPWORDS: &str = include_str!("../data/stopwords.json");
    pub const COVERAGE: &str = include_str!("../data/param_coverage.json");
    pub const CORRELATIONS: &str = include_str!("../data/correlations.json");
}

/// Parses JSON, keeping serde's line/column in the error.
pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, Error> {
    serde_json::from_str(text).map_err(|source| Error::Parse {
        what: what.to_string(),
        source,
    })
}

pub fn check_schema_version(version: u32, what: &str) -> Result<(), Error> {
    if version == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{what}: unsupported schema_version {version} (this build reads {SCHEMA_VERSION})"
        )))
    }
}

/// Parses a user document that is either a bare JSON list or an envelope
/// object `{"schema_version": 1, "<field>": [...]}`.
///
/// Errors keep the line and column of the original text in both shapes.
pub fn parse_list_or_envelope<T: DeserializeOwned>(
    text: &str,
    what: &str,
    field: &str,
) -> Result<Vec<T>, Error> {
    let parse_err = |source| Error::Parse {
        what: what.to_string(),
        source,
    };
    match text.trim_start().chars().next() {
        Some('[') => parse_json(text, what),
        Some('{') => {
            let mut de = serde_json::Deserializer::from_str(text);
            let seed = EnvelopeSeed::<T> {
                field,
                _items: PhantomData,
            };
            let (version, items) = seed.deserialize(&mut de).map_err(parse_err)?;
            de.end().map_err(parse_err)?;
            if let Some(version) = version {
                check_schema_version(version, what)?;
            }
            items.ok_or_else(|| Error::Validation(format!("{what}: missing field `{field}`")))
        }
        _ => Err(Error::Validation(format!(
            "{what}: expected a JSON list or an object with `{field}`"
        ))),
    }
}

struct EnvelopeSeed<'f, T> {
    field: &'f str,
    _items: PhantomData<T>,
}

impl<'de, T: DeserializeOwned> DeserializeSeed<'de> for EnvelopeSeed<'_, T> {
    type Value = (Option<u32>, Option<Vec<T>>);

    fn deserialize<D: Deserializer<'de>>(self, deserializer: D) -> Result<Self::Value, D::Error> {
        deserializer.deserialize_map(self)
    }
}

impl<'de, T: DeserializeOwned> Visitor<'de> for EnvelopeSeed<'_, T> {
    type Value = (Option<u32>, Option<Vec<T>>);

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        write!(f, "an object with a `{}` list", self.field)
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
        let mut version = None;
        let mut items = None;
        while let Some(key) = map.next_key::<String>()? {
            if key == self.field {
                items = Some(map.next_value::<Vec<T>>()?);
            } else if key == "schema_version" {
                version = Some(map.next_value::<u32>()?);
            } else {
                map.next_value::<IgnoredAny>()?;
            }
        }
        Ok((version, items))
    }
}

/// Paths named by a run configuration file. Relative paths resolve against
/// the directory holding that file; omitted entries use the shipped data.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lexicon: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub templates: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub markers: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synonyms: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trait_params: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scoring_key: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norms: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_ranking: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stopwords: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Text,
}

/// Every data bank needed by the library, loaded and cross-checked.
#[derive(Debug, Clone)]
pub struct Config {
    pub lexicon: FeatureLexicon,
    pub templates: TemplateBank,
    pub markers: MarkerBank,
    pub synonyms: SynonymLexicon,
    pub trait_params: TraitParamMap,
    pub scoring_key: ScoringKey,
    pub norms: NormTable,
    pub ranking_norms: NormStatistics,
    pub stopwords: Vec<String>,
    pub coverage: ParamCoverage,
    /// Seed from the run configuration, if any.
    pub seed: Option<u64>,
    pub format: Option<OutputFormat>,
}

#[derive(Deserialize)]
struct StopwordFile {
    schema_version: u32,
    words: Vec<String>,
}

impl Config {
    /// The configuration compiled into the library.
    pub fn shipped() -> Config {
        static SHIPPED: OnceLock<Config> = OnceLock::new();
        SHIPPED
            .get_or_init(|| {
                Config::from_run(&parse_json(shipped::RUN, "shipped run config").expect("shipped run config"), None)
                    .expect("shipped configuration is valid")
            })
            .clone()
    }

    /// Loads a run configuration file and everything it references.
    pub fn load(path: &Path) -> Result<Config, Error> {
        let text = read_file(path)?;
        let run: RunConfig = parse_json(&text, &path.display().to_string())?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Config::from_run(&run, Some(&base))
    }

    fn from_run(run: &RunConfig, base: Option<&Path>) -> Result<Config, Error> {
        check_schema_version(run.schema_version, "run config")?;
        let source = |entry: &Option<PathBuf>, fallback: &'static str| -> Result<(String, String), Error> {
            match (entry, base) {
                (Some(rel), Some(base)) => {
                    let full = base.join(rel);
                    Ok((read_file(&full)?, full.display().to_string()))
                }
                (Some(rel), None) => Err(Error::Config(format!(
                    "path `{}` given without a base directory",
                    rel.display()
                ))),
                (None, _) => Ok((fallback.to_string(), "shipped data".to_string())),
            }
        };

        let (text, name) = source(&run.lexicon, shipped::LEXICON)?;
        let lexicon = FeatureLexicon::from_json(&text).map_err(|e| context(e, &name))?;
        let (text, name) = source(&run.templates, shipped::TEMPLATES)?;
        let templates = TemplateBank::from_json(&text).map_err(|e| context(e, &name))?;
        let (text, name) = source(&run.markers, shipped::MARKERS)?;
        let markers = MarkerBank::from_json(&text).map_err(|e| context(e, &name))?;
        let (text, name) = source(&run.synonyms, shipped::SYNONYMS)?;
        let synonyms = SynonymLexicon::from_json(&text).map_err(|e| context(e, &name))?;
        let (text, name) = source(&run.trait_params, shipped::TRAIT_PARAMS)?;
        let trait_params = TraitParamMap::from_json(&text).map_err(|e| context(e, &name))?;
        let (text, name) = source(&run.scoring_key, shipped::SCORING_KEY)?;
        let scoring_key = ScoringKey::from_json(&text).map_err(|e| context(e, &name))?;
        let (text, name) = source(&run.norms, shipped::NORMS)?;
        let norms = NormTable::from_json(&text).map_err(|e| context(e, &name))?;
        let (text, name) = source(&run.default_ranking, shipped::DEFAULT_RANKING)?;
        let ranking_norms = NormStatistics::from_json(&text).map_err(|e| context(e, &name))?;
        let (text, name) = source(&run.stopwords, shipped::STOPWORDS)?;
        let stop: StopwordFile = parse_json(&text, &name)?;
        check_schema_version(stop.schema_version, &name)?;
        let (text, name) = source(&run.coverage, shipped::COVERAGE)?;
        let coverage = ParamCoverage::from_json(&text).map_err(|e| context(e, &name))?;

        let config = Config {
            lexicon,
            templates,
            markers,
            synonyms,
            trait_params,
            scoring_key,
            norms,
            ranking_norms,
            stopwords: stop.words.into_iter().map(|w| w.to_lowercase()).collect(),
            coverage,
            seed: run.seed,
            format: run.format,
        };
        config.validate()?;
        Ok(config)
    }

    /// Cross-file consistency checks.
    pub fn validate(&self) -> Result<(), Error> {
        self.trait_params.validate_forms(&self.markers)?;
        self.templates.check_coverage()?;
        concern::default_ranking(&self.ranking_norms)?;
        Ok(())
    }

    /// The population default permission ranking.
    pub fn default_ranking(&self) -> Result<AttentionRanking, Error> {
        concern::default_ranking(&self.ranking_norms)
    }

    /// Word filter used by the content-overlap metric and content lemmas.
    pub fn content_filter(&self) -> ContentFilter {
        ContentFilter::new(self)
    }
}

fn context(err: Error, name: &str) -> Error {
    match err {
        Error::Config(msg) => Error::Config(format!("{name}: {msg}")),
        Error::Parse { source, .. } => Error::Parse {
            what: name.to_string(),
            source,
        },
        other => other,
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
