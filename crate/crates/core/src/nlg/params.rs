//! The 67 stylistic generation parameters and the trait → parameter map.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::{check_schema_version, parse_json};
use crate::content::RhetoricalRelation;
use crate::personality::{Dimension, Level, TraitProfile};
use crate::Error;

/// Which stage of generation reads a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamGroup {
    Content,
    Template,
    Aggregation,
    Marker,
    Lexical,
}

macro_rules! params {
    ($($group:ident { $($variant:ident => $name:literal),* $(,)? })*) => {
        /// A named stylistic parameter.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Param {
            $($($variant,)*)*
        }

        impl Param {
            pub const ALL: [Param; 0 $($(+ params!(@one $variant))*)*] = [$($(Param::$variant,)*)*];

            /// Canonical upper-case name used in configuration files.
            pub fn name(self) -> &'static str {
                match self {
                    $($(Param::$variant => $name,)*)*
                }
            }

            pub fn group(self) -> ParamGroup {
                match self {
                    $($(Param::$variant => ParamGroup::$group,)*)*
                }
            }
        }
    };
    (@one $variant:ident) => { 1 };
}

params! {
    Content {
        Verbosity => "VERBOSITY",
        Restatements => "RESTATEMENTS",
        Repetitions => "REPETITIONS",
        ContentPolarity => "CONTENT POLARITY",
        RepetitionsPolarity => "REPETITIONS POLARITY",
        Concessions => "CONCESSIONS",
        ConcessionsPolarity => "CONCESSIONS POLARITY",
        Polarisation => "POLARISATION",
        PositiveContentFirst => "POSITIVE CONTENT FIRST",
    }
    Template {
        SelfReferences => "SELF-REFERENCES",
        ClaimComplexity => "CLAIM COMPLEXITY",
        ClaimPolarity => "CLAIM POLARITY",
    }
    Aggregation {
        Period => "PERIOD",
        RelativeClause => "RELATIVE CLAUSE",
        WithCueWord => "WITH CUE WORD",
        Conjunction => "CONJUNCTION",
        Merge => "MERGE",
        AlsoCueWord => "ALSO CUE WORD",
        ContrastCueWord => "CONTRAST - CUE WORD",
        JustifyCueWord => "JUSTIFY - CUE WORD",
        ConcedeCueWord => "CONCEDE - CUE WORD",
        MergeWithComma => "MERGE WITH COMMA",
        ConjWithEllipsis => "CONJ. WITH ELLIPSIS",
        JustifyWith => "JUSTIFY - WITH CUE WORD",
        JustifyRelative => "JUSTIFY - RELATIVE CLAUSE",
        JustifySo => "JUSTIFY - SO CUE WORD",
        JustifyBecause => "JUSTIFY - BECAUSE CUE WORD",
        JustifySince => "JUSTIFY - SINCE CUE WORD",
        JustifyPeriod => "JUSTIFY - PERIOD",
        ContrastMerge => "CONTRAST - MERGE",
        ContrastHowever => "CONTRAST - HOWEVER CUE WORD",
        ContrastWhile => "CONTRAST - WHILE CUE WORD",
        ContrastConjunction => "CONTRAST - CONJUNCTION",
        ContrastBut => "CONTRAST - BUT CUE WORD",
        ContrastOnTheOtherHand => "CONTRAST - ON THE OTHER HAND CUE WORD",
        ContrastPeriod => "CONTRAST - PERIOD",
        InferMerge => "INFER - MERGE",
        InferWith => "INFER - WITH CUE WORD",
        InferRelative => "INFER - RELATIVE CLAUSE",
        InferAlso => "INFER - ALSO CUE WORD",
        InferConjunction => "INFER - CONJUNCTION",
        InferPeriod => "INFER - PERIOD",
        ConcedeEvenIf => "CONCEDE - EVEN IF CUE WORD",
        ConcedeAlthough => "CONCEDE - ALTHOUGH CUE WORD",
        ConcedeButThough => "CONCEDE - BUT/THOUGH CUE WORD",
        RestateConjunction => "RESTATE - CONJUNCTION",
        RestateMergeWithComma => "RESTATE - MERGE WITH COMMA",
        RestateObjectEllipsis => "RESTATE - OBJECT ELLIPSIS",
    }
    Marker {
        SubjectImplicitness => "SUBJECT IMPLICITNESS",
        Negation => "NEGATION",
        SoftenerHedges => "SOFTENER HEDGES",
        EmphasizerHedges => "EMPHASIZER HEDGES",
        Acknowledgments => "ACKNOWLEDGMENTS",
        FilledPauses => "FILLED PAUSES",
        Exclamation => "EXCLAMATION",
        Expletives => "EXPLETIVES",
        NearExpletives => "NEAR-EXPLETIVES",
        CompetenceMitigation => "COMPETENCE MITIGATION",
        TagQuestion => "TAG QUESTION",
        Stuttering => "STUTTERING",
        Confirmation => "CONFIRMATION",
        InitialRejection => "INITIAL REJECTION",
        InGroupMarker => "IN-GROUP MARKER",
        Pronominalization => "PRONOMINALIZATION",
    }
    Lexical {
        LexicalFrequency => "LEXICAL FREQUENCY",
        WordLength => "WORD LENGTH",
        VerbStrength => "VERB STRENGTH",
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown generation parameter `{s}`")))
    }
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Param {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
thread_local! {
    static READS: std::cell::RefCell<Option<std::collections::BTreeMap<Param, std::collections::BTreeSet<&'static str>>>> =
        const { std::cell::RefCell::new(None) };
    static STAGE: std::cell::Cell<&'static str> = const { std::cell::Cell::new("") };
}

/// Test-only record of which operation read which parameter.
#[cfg(test)]
pub(crate) mod audit {
    use super::*;

    pub fn start() {
        READS.with(|r| *r.borrow_mut() = Some(Default::default()));
    }

    pub fn finish() -> BTreeMap<Param, std::collections::BTreeSet<&'static str>> {
        READS.with(|r| r.borrow_mut().take().unwrap_or_default())
    }

    pub fn stage(name: &'static str) {
        STAGE.with(|s| s.set(name));
    }

    pub(super) fn record(p: Param) {
        READS.with(|r| {
            if let Some(map) = r.borrow_mut().as_mut() {
                map.entry(p).or_default().insert(STAGE.with(|s| s.get()));
            }
        });
    }
}

/// Marks the operation that subsequent parameter reads belong to.
#[cfg(test)]
pub(crate) fn set_stage(name: &'static str) {
    audit::stage(name);
}

#[cfg(not(test))]
#[inline(always)]
pub(crate) fn set_stage(_: &'static str) {}

/// A value in `[0, 1]` for each of the 67 parameters, plus the preferred
/// surface forms per marker class.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationParams {
    values: [f64; Param::ALL.len()],
    marker_forms: BTreeMap<Param, Vec<String>>,
}

/// The value every parameter takes unless something says otherwise.
pub const NEUTRAL: f64 = 0.5;

impl GenerationParams {
    pub fn neutral() -> Self {
        GenerationParams {
            values: [NEUTRAL; Param::ALL.len()],
            marker_forms: BTreeMap::new(),
        }
    }

    /// Every parameter at `value`.
    pub fn uniform(value: f64) -> Self {
        let mut p = GenerationParams::neutral();
        p.values = [value.clamp(0.0, 1.0); Param::ALL.len()];
        p
    }

    pub fn get(&self, param: Param) -> f64 {
        #[cfg(test)]
        audit::record(param);
        self.values[param as usize]
    }

    /// Reads without counting as a use (for reports and tests).
    pub fn peek(&self, param: Param) -> f64 {
        self.values[param as usize]
    }

    /// Sets a value, clamped to `[0, 1]`.
    pub fn set(&mut self, param: Param, value: f64) {
        self.values[param as usize] = value.clamp(0.0, 1.0);
    }

    /// Preferred surface forms for a marker class, best first.
    pub fn marker_forms(&self, class: Param) -> &[String] {
        self.marker_forms.get(&class).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn set_marker_forms(&mut self, class: Param, forms: Vec<String>) {
        self.marker_forms.insert(class, forms);
    }

    pub fn iter(&self) -> impl Iterator<Item = (Param, f64)> + '_ {
        Param::ALL.into_iter().map(|p| (p, self.values[p as usize]))
    }

    /// Weight of an aggregation operation for a relation: the product of the
    /// operation's general parameter and the relation-specific one.
    pub fn operation_weight(&self, relation: RhetoricalRelation, op: Operation) -> f64 {
        match (op.class_param(), op.relation_param(relation)) {
            (Some(class), Some(cell)) => self.get(class) * self.get(cell),
            _ => 0.0,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ParamsDoc {
    values: BTreeMap<Param, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    marker_forms: BTreeMap<Param, Vec<String>>,
}

impl Serialize for GenerationParams {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ParamsDoc {
            values: self.iter().collect(),
            marker_forms: self.marker_forms.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GenerationParams {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = ParamsDoc::deserialize(d)?;
        let mut p = GenerationParams::neutral();
        for (k, v) in doc.values {
            if !(0.0..=1.0).contains(&v) {
                return Err(serde::de::Error::custom(format!("{k} = {v} is outside [0, 1]")));
            }
            p.set(k, v);
        }
        p.marker_forms = doc.marker_forms;
        Ok(p)
    }
}

/// Clause-combining operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    Period,
    Merge,
    With,
    Relative,
    Conjunction,
    So,
    Because,
    Since,
    However,
    While,
    But,
    OnTheOtherHand,
    Also,
    EvenIf,
    Although,
    ButThough,
    MergeWithComma,
    ObjectEllipsis,
}

impl Operation {
    pub fn name(self) -> &'static str {
        match self {
            Operation::Period => "period",
            Operation::Merge => "merge",
            Operation::With => "with",
            Operation::Relative => "relative_clause",
            Operation::Conjunction => "conjunction",
            Operation::So => "so",
            Operation::Because => "because",
            Operation::Since => "since",
            Operation::However => "however",
            Operation::While => "while",
            Operation::But => "but",
            Operation::OnTheOtherHand => "on_the_other_hand",
            Operation::Also => "also",
            Operation::EvenIf => "even_if",
            Operation::Although => "although",
            Operation::ButThough => "but_though",
            Operation::MergeWithComma => "merge_with_comma",
            Operation::ObjectEllipsis => "object_ellipsis",
        }
    }

    /// The operations allowed for a relation, in table order.
    pub fn allowed(relation: RhetoricalRelation) -> &'static [Operation] {
        use Operation::*;
        match relation {
            RhetoricalRelation::Justify => &[With, Relative, So, Because, Since, Period],
            RhetoricalRelation::Contrast => &[Merge, However, While, Conjunction, But, OnTheOtherHand, Period],
            RhetoricalRelation::Infer => &[Merge, With, Relative, Also, Conjunction, Period],
            RhetoricalRelation::Concede => &[EvenIf, Although, ButThough],
            RhetoricalRelation::Restate => &[Conjunction, MergeWithComma, ObjectEllipsis],
        }
    }

    /// The general aggregation parameter an operation belongs to.
    pub fn class_param(self) -> Option<Param> {
        use Operation::*;
        Some(match self {
            Period => Param::Period,
            Merge => Param::Merge,
            With => Param::WithCueWord,
            Relative => Param::RelativeClause,
            Conjunction => Param::Conjunction,
            So | Because | Since => Param::JustifyCueWord,
            However | While | But | OnTheOtherHand => Param::ContrastCueWord,
            Also => Param::AlsoCueWord,
            EvenIf | Although | ButThough => Param::ConcedeCueWord,
            MergeWithComma => Param::MergeWithComma,
            ObjectEllipsis => Param::ConjWithEllipsis,
        })
    }

    /// The relation-specific cell parameter, if the pair is allowed.
    pub fn relation_param(self, relation: RhetoricalRelation) -> Option<Param> {
        use Operation::*;
        use RhetoricalRelation as R;
        Some(match (relation, self) {
            (R::Justify, With) => Param::JustifyWith,
            (R::Justify, Relative) => Param::JustifyRelative,
            (R::Justify, So) => Param::JustifySo,
            (R::Justify, Because) => Param::JustifyBecause,
            (R::Justify, Since) => Param::JustifySince,
            (R::Justify, Period) => Param::JustifyPeriod,
            (R::Contrast, Merge) => Param::ContrastMerge,
            (R::Contrast, However) => Param::ContrastHowever,
            (R::Contrast, While) => Param::ContrastWhile,
            (R::Contrast, Conjunction) => Param::ContrastConjunction,
            (R::Contrast, But) => Param::ContrastBut,
            (R::Contrast, OnTheOtherHand) => Param::ContrastOnTheOtherHand,
            (R::Contrast, Period) => Param::ContrastPeriod,
            (R::Infer, Merge) => Param::InferMerge,
            (R::Infer, With) => Param::InferWith,
            (R::Infer, Relative) => Param::InferRelative,
            (R::Infer, Also) => Param::InferAlso,
            (R::Infer, Conjunction) => Param::InferConjunction,
            (R::Infer, Period) => Param::InferPeriod,
            (R::Concede, EvenIf) => Param::ConcedeEvenIf,
            (R::Concede, Although) => Param::ConcedeAlthough,
            (R::Concede, ButThough) => Param::ConcedeButThough,
            (R::Restate, Conjunction) => Param::RestateConjunction,
            (R::Restate, MergeWithComma) => Param::RestateMergeWithComma,
            (R::Restate, ObjectEllipsis) => Param::RestateObjectEllipsis,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combiner {
    #[default]
    Mean,
    Max,
}

/// Contributions of one (trait, level) pair.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TraitParamEntry {
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Preferred surface forms per marker class.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub marker_forms: BTreeMap<String, Vec<String>>,
}

/// Per (trait, level) parameter contributions, keyed like `"E-High"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraitParamMap {
    pub schema_version: u32,
    #[serde(default)]
    pub combiner: Combiner,
    pub entries: BTreeMap<String, TraitParamEntry>,
}

fn parse_key(key: &str) -> Result<(Dimension, Level), Error> {
    let (d, l) = key
        .split_once('-')
        .ok_or_else(|| Error::Config(format!("trait map key `{key}` is not of the form E-High")))?;
    let d: Dimension = d.parse().map_err(|_| Error::Config(format!("unknown trait in key `{key}`")))?;
    let l: Level = l.parse().map_err(|_| Error::Config(format!("unknown level in key `{key}`")))?;
    Ok((d, l))
}

impl TraitParamMap {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let map: TraitParamMap = parse_json(text, "trait parameter map")?;
        check_schema_version(map.schema_version, "trait parameter map")?;
        map.validate()?;
        Ok(map)
    }

    /// Checks keys, parameter names and value ranges.
    pub fn validate(&self) -> Result<(), Error> {
        for (key, entry) in &self.entries {
            parse_key(key)?;
            for (name, value) in &entry.params {
                name.parse::<Param>()
                    .map_err(|_| Error::Config(format!("{key}: unknown generation parameter `{name}`")))?;
                if !(0.0..=1.0).contains(value) {
                    return Err(Error::Config(format!("{key}: {name} = {value} is outside [0, 1]")));
                }
            }
            for class in entry.marker_forms.keys() {
                let p: Param = class
                    .parse()
                    .map_err(|_| Error::Config(format!("{key}: unknown marker class `{class}`")))?;
                if p.group() != ParamGroup::Marker {
                    return Err(Error::Config(format!("{key}: `{class}` is not a marker class")));
                }
            }
        }
        Ok(())
    }

    /// Checks that every preferred form exists in the marker bank.
    pub fn validate_forms(&self, bank: &super::markers::MarkerBank) -> Result<(), Error> {
        for (key, entry) in &self.entries {
            for (class, forms) in &entry.marker_forms {
                let p: Param = class.parse()?;
                for form in forms {
                    if !bank.has_form(p, form) {
                        return Err(Error::Config(format!(
                            "{key}: marker form `{form}` is not in the bank for {class}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Combines the contributions of the profile's five (trait, level) pairs.
///
/// Each parameter takes the mean (or max) of the values given for it by the
/// matching entries; parameters nobody mentions stay at 0.5. Preferred
/// marker forms are concatenated in trait order without duplicates.
pub fn params_from_profile(profile: &TraitProfile, map: &TraitParamMap) -> Result<GenerationParams, Error> {
    map.validate()?;
    let mut contributions: BTreeMap<Param, Vec<f64>> = BTreeMap::new();
    let mut forms: BTreeMap<Param, Vec<String>> = BTreeMap::new();
    for dimension in Dimension::ALL {
        let level = profile.level(dimension);
        let key = format!("{}-{}", dimension.code(), level.name());
        let Some(entry) = map.entries.get(&key) else {
            continue;
        };
        for (name, &value) in &entry.params {
            contributions.entry(name.parse()?).or_default().push(value);
        }
        for (class, list) in &entry.marker_forms {
            let slot = forms.entry(class.parse()?).or_default();
            for form in list {
                if !slot.contains(form) {
                    slot.push(form.clone());
                }
            }
        }
    }
    let mut params = GenerationParams::neutral();
    for (param, values) in contributions {
        let combined = match map.combiner {
            Combiner::Mean => values.iter().sum::<f64>() / values.len() as f64,
            Combiner::Max => values.iter().copied().fold(f64::MIN, f64::max),
        };
        params.set(param, combined);
    }
    for (class, list) in forms {
        params.set_marker_forms(class, list);
    }
    Ok(params)
}

/// Which operation reads each parameter, shipped with the configuration so
/// the mapping can be audited.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamCoverage {
    pub schema_version: u32,
    pub readers: BTreeMap<Param, String>,
}

/// Operations allowed to appear in a coverage map.
pub const READER_OPERATIONS: [&str; 5] = ["plan_content", "select_template", "aggregate", "insert_markers", "lexicalize"];

impl ParamCoverage {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let coverage: ParamCoverage = parse_json(text, "parameter coverage map")?;
        check_schema_version(coverage.schema_version, "parameter coverage map")?;
        for p in Param::ALL {
            match coverage.readers.get(&p) {
                None => return Err(Error::Config(format!("coverage map has no reader for {p}"))),
                Some(op) if !READER_OPERATIONS.contains(&op.as_str()) => {
                    return Err(Error::Config(format!("coverage map names unknown operation `{op}` for {p}")))
                }
                _ => {}
            }
        }
        Ok(coverage)
    }
}
