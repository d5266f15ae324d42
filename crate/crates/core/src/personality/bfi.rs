use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Dimension, Gender, Level, TraitProfile, TraitScores};
use crate::config::{check_schema_version, parse_json};
use crate::Error;

/// Number of items in the BFI-44 inventory.
pub const ITEM_COUNT: usize = 44;

/// Answers to the 44 items, each on a 1..=5 Likert scale.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct LikertResponse(Vec<u8>);

impl LikertResponse {
    pub fn new(answers: Vec<u8>) -> Result<Self, Error> {
        if answers.len() != ITEM_COUNT {
            return Err(Error::Validation(format!(
                "expected {ITEM_COUNT} answers, found {}",
                answers.len()
            )));
        }
        if let Some((i, a)) = answers.iter().enumerate().find(|(_, a)| !(1..=5).contains(*a)) {
            return Err(Error::Validation(format!(
                "answer to item {} is {a}; answers must be between 1 and 5",
                i + 1
            )));
        }
        Ok(LikertResponse(answers))
    }

    /// Answer to 1-based item `item`.
    pub fn answer(&self, item: usize) -> u8 {
        self.0[item - 1]
    }

    pub fn answers(&self) -> &[u8] {
        &self.0
    }

    /// Parses a responses file: `{"gender": "female", "answers": [...]}` or a
    /// bare list of answers.
    pub fn from_json(text: &str) -> Result<(LikertResponse, Option<Gender>), Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Doc {
            Bare(Vec<i64>),
            Full {
                #[serde(default)]
                schema_version: Option<u32>,
                #[serde(default)]
                gender: Option<Gender>,
                answers: Vec<i64>,
            },
        }
        let doc: Doc = parse_json(text, "responses")?;
        let (answers, gender) = match doc {
            Doc::Bare(a) => (a, None),
            Doc::Full {
                schema_version,
                gender,
                answers,
            } => {
                if let Some(v) = schema_version {
                    check_schema_version(v, "responses")?;
                }
                (answers, gender)
            }
        };
        let answers = answers
            .into_iter()
            .enumerate()
            .map(|(i, a)| {
                u8::try_from(a).map_err(|_| {
                    Error::Validation(format!(
                        "answer to item {} is {a}; answers must be between 1 and 5",
                        i + 1
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok((LikertResponse::new(answers)?, gender))
    }
}

impl TryFrom<Vec<u8>> for LikertResponse {
    type Error = Error;

    fn try_from(v: Vec<u8>) -> Result<Self, Error> {
        LikertResponse::new(v)
    }
}

impl From<LikertResponse> for Vec<u8> {
    fn from(r: LikertResponse) -> Vec<u8> {
        r.0
    }
}

/// Which items belong to which dimension, and which are reverse-keyed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoringKey {
    items: BTreeMap<Dimension, Vec<usize>>,
    reversed: BTreeSet<usize>,
}

impl ScoringKey {
    /// Validates that the item lists partition `1..=44` and that every
    /// reversed item is keyed to some dimension.
    pub fn new(items: BTreeMap<Dimension, Vec<usize>>, reversed: BTreeSet<usize>) -> Result<Self, Error> {
        if items.len() != Dimension::ALL.len() {
            return Err(Error::Config("scoring key must list items for all five traits".into()));
        }
        let mut seen = BTreeSet::new();
        for (dimension, list) in &items {
            if list.is_empty() {
                return Err(Error::Config(format!("scoring key has no items for {dimension}")));
            }
            for &item in list {
                if !(1..=ITEM_COUNT).contains(&item) {
                    return Err(Error::Config(format!("scoring key item {item} is out of range")));
                }
                if !seen.insert(item) {
                    return Err(Error::Config(format!("scoring key lists item {item} twice")));
                }
            }
        }
        if seen.len() != ITEM_COUNT {
            return Err(Error::Config(format!(
                "scoring key covers {} of {ITEM_COUNT} items",
                seen.len()
            )));
        }
        if let Some(r) = reversed.iter().find(|r| !seen.contains(r)) {
            return Err(Error::Config(format!("reversed item {r} is not keyed")));
        }
        Ok(ScoringKey { items, reversed })
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        #[derive(Deserialize)]
        struct Doc {
            schema_version: u32,
            items: BTreeMap<Dimension, Vec<usize>>,
            #[serde(default)]
            reversed: BTreeSet<usize>,
        }
        let doc: Doc = parse_json(text, "scoring key")?;
        check_schema_version(doc.schema_version, "scoring key")?;
        ScoringKey::new(doc.items, doc.reversed)
    }

    pub fn items(&self, dimension: Dimension) -> &[usize] {
        &self.items[&dimension]
    }

    pub fn is_reversed(&self, item: usize) -> bool {
        self.reversed.contains(&item)
    }
}

/// Scores a questionnaire: reversed items map `x` to `6 - x`, and each
/// dimension's score is the mean of its items.
pub fn score_bfi(response: &LikertResponse, key: &ScoringKey) -> TraitScores {
    let scores = Dimension::ALL
        .into_iter()
        .map(|dimension| {
            let items = key.items(dimension);
            let total: u32 = items
                .iter()
                .map(|&item| {
                    let a = u32::from(response.answer(item));
                    if key.is_reversed(item) {
                        6 - a
                    } else {
                        a
                    }
                })
                .sum();
            (dimension, f64::from(total) / items.len() as f64)
        })
        .collect();
    TraitScores(scores)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEntry {
    pub mean: f64,
    pub sd: f64,
}

/// Population means and standard deviations per gender and dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormTable {
    /// Half-width of the Medium band in standard deviations.
    #[serde(default = "default_band")]
    pub band: f64,
    pub norms: BTreeMap<Gender, BTreeMap<Dimension, NormEntry>>,
}

fn default_band() -> f64 {
    0.5
}

impl NormTable {
    pub fn new(band: f64, norms: BTreeMap<Gender, BTreeMap<Dimension, NormEntry>>) -> Result<Self, Error> {
        if !(band.is_finite() && band >= 0.0) {
            return Err(Error::Config(format!("norm band must be a non-negative number, found {band}")));
        }
        for (gender, table) in &norms {
            for (dimension, entry) in table {
                if !(entry.sd > 0.0 && entry.sd.is_finite() && entry.mean.is_finite()) {
                    return Err(Error::Config(format!(
                        "norm for {gender:?}/{dimension} must have a finite mean and positive sd"
                    )));
                }
            }
        }
        Ok(NormTable { band, norms })
    }

    /// Norms centred on 3.0 with unit sd for both genders.
    pub fn centred() -> Self {
        let table: BTreeMap<_, _> = Dimension::ALL
            .into_iter()
            .map(|d| (d, NormEntry { mean: 3.0, sd: 1.0 }))
            .collect();
        NormTable {
            band: default_band(),
            norms: [(Gender::Male, table.clone()), (Gender::Female, table)].into(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        #[derive(Deserialize)]
        struct Doc {
            schema_version: u32,
            #[serde(default = "default_band")]
            band: f64,
            norms: BTreeMap<Gender, BTreeMap<Dimension, NormEntry>>,
        }
        let doc: Doc = parse_json(text, "norm table")?;
        check_schema_version(doc.schema_version, "norm table")?;
        NormTable::new(doc.band, doc.norms)
    }

    pub fn entry(&self, gender: Gender, dimension: Dimension) -> Result<NormEntry, Error> {
        self.norms
            .get(&gender)
            .and_then(|t| t.get(&dimension))
            .copied()
            .ok_or_else(|| Error::Config(format!("norm table has no entry for {gender:?}/{dimension}")))
    }
}

/// Labels each dimension High, Medium or Low against the gender's norms.
///
/// High means strictly above `mean + band * sd`, Low strictly below
/// `mean - band * sd`; the closed interval between is Medium.
pub fn label_traits(scores: &TraitScores, gender: Gender, norms: &NormTable) -> Result<TraitProfile, Error> {
    let mut levels = BTreeMap::new();
    for dimension in Dimension::ALL {
        let norm = norms.entry(gender, dimension)?;
        let score = scores.get(dimension);
        let level = if score > norm.mean + norms.band * norm.sd {
            Level::High
        } else if score < norm.mean - norms.band * norm.sd {
            Level::Low
        } else {
            Level::Medium
        };
        levels.insert(dimension, level);
    }
    Ok(TraitProfile {
        levels,
        scores: Some(scores.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Config;
    use proptest::prelude::*;

    fn shipped_key() -> ScoringKey {
        Config::shipped().scoring_key
    }

    #[test]
    fn all_threes_is_fixed_point() {
        let r = LikertResponse::new(vec![3; 44]).unwrap();
        let s = score_bfi(&r, &shipped_key());
        assert!(s.0.values().all(|&v| v == 3.0));
    }

    #[test]
    fn all_fives_matches_item_tally() {
        // Per trait: (items, reversed items) in the standard key.
        let expected = [
            (Dimension::Extraversion, 8.0, 3.0),
            (Dimension::Agreeableness, 9.0, 4.0),
            (Dimension::Conscientiousness, 9.0, 4.0),
            (Dimension::Neuroticism, 8.0, 3.0),
            (Dimension::Openness, 10.0, 2.0),
        ];
        let r = LikertResponse::new(vec![5; 44]).unwrap();
        let s = score_bfi(&r, &shipped_key());
        for (d, n, rev) in expected {
            let oracle = ((n - rev) * 5.0 + rev * 1.0) / n;
            assert_eq!(s.get(d), oracle, "{d}");
        }
    }

    #[test]
    fn single_item_shift() {
        let key = shipped_key();
        // Item 1 is a forward E item, item 6 a reversed one.
        let mut answers = vec![3u8; 44];
        answers[0] = 5;
        let s = score_bfi(&LikertResponse::new(answers).unwrap(), &key);
        assert_eq!(s.get(Dimension::Extraversion), 3.0 + 2.0 / 8.0);
        assert_eq!(s.get(Dimension::Openness), 3.0);
        let mut answers = vec![3u8; 44];
        answers[5] = 5;
        let s = score_bfi(&LikertResponse::new(answers).unwrap(), &key);
        assert_eq!(s.get(Dimension::Extraversion), 3.0 - 2.0 / 8.0);
    }

    #[test]
    fn response_validation() {
        let err = LikertResponse::new(vec![3; 43]).unwrap_err();
        assert!(err.to_string().contains("expected 44 answers"));
        let mut v = vec![3; 44];
        v[10] = 6;
        assert!(LikertResponse::new(v).is_err());
        let (r, g) = LikertResponse::from_json(&format!("{{\"gender\": \"male\", \"answers\": {:?}}}", vec![2; 44]))
            .unwrap();
        assert_eq!(r.answer(44), 2);
        assert_eq!(g, Some(Gender::Male));
        assert!(LikertResponse::from_json("[-1]").is_err());
    }

    #[test]
    fn key_validation() {
        let mut items = BTreeMap::new();
        for d in Dimension::ALL {
            items.insert(d, vec![]);
        }
        for i in 1..=44 {
            items.get_mut(&Dimension::ALL[i % 5]).unwrap().push(i);
        }
        assert!(ScoringKey::new(items.clone(), BTreeSet::new()).is_ok());
        let mut dup = items.clone();
        dup.get_mut(&Dimension::Openness).unwrap().push(1);
        assert!(ScoringKey::new(dup, BTreeSet::new()).is_err());
        let mut short = items;
        short.get_mut(&Dimension::Openness).unwrap().pop();
        assert!(ScoringKey::new(short, BTreeSet::new()).is_err());
    }

    #[test]
    fn labels_at_boundaries() {
        let norms = NormTable::centred();
        let scores = |v: f64| TraitScores(Dimension::ALL.into_iter().map(|d| (d, v)).collect());
        let p = label_traits(&scores(3.0), Gender::Female, &norms).unwrap();
        assert!(p.levels.values().all(|&l| l == Level::Medium));
        let p = label_traits(&scores(4.0), Gender::Female, &norms).unwrap();
        assert!(p.levels.values().all(|&l| l == Level::High));
        // The band edges themselves are Medium.
        let p = label_traits(&scores(3.5), Gender::Male, &norms).unwrap();
        assert!(p.levels.values().all(|&l| l == Level::Medium));
        let p = label_traits(&scores(2.4), Gender::Male, &norms).unwrap();
        assert!(p.levels.values().all(|&l| l == Level::Low));
    }

    #[test]
    fn missing_norm_is_config_error() {
        let mut norms = NormTable::centred();
        norms.norms.remove(&Gender::Male);
        let scores = TraitScores(Dimension::ALL.into_iter().map(|d| (d, 3.0)).collect());
        assert!(matches!(label_traits(&scores, Gender::Male, &norms), Err(Error::Config(_))));
    }

    fn arb_key() -> impl Strategy<Value = ScoringKey> {
        (
            proptest::collection::vec(0usize..5, 44),
            proptest::collection::vec(any::<bool>(), 44),
        )
            .prop_map(|(assign, rev)| {
                let mut items: BTreeMap<Dimension, Vec<usize>> = BTreeMap::new();
                // Guarantee every dimension gets at least one item.
                for (i, d) in Dimension::ALL.into_iter().enumerate() {
                    items.entry(d).or_default().push(i + 1);
                }
                for item in 6..=44 {
                    items.entry(Dimension::ALL[assign[item - 1]]).or_default().push(item);
                }
                let reversed = (1..=44).filter(|i| rev[i - 1]).collect();
                ScoringKey::new(items, reversed).unwrap()
            })
    }

    proptest! {
        #[test]
        fn labels_match_threshold_oracle(
            values in proptest::collection::vec(1.0f64..5.0, 5),
            means in proptest::collection::vec(2.0f64..4.0, 5),
            sds in proptest::collection::vec(0.1f64..1.5, 5),
            band in 0.0f64..1.5,
        ) {
            let table: BTreeMap<_, _> = Dimension::ALL.into_iter().enumerate()
                .map(|(i, d)| (d, NormEntry { mean: means[i], sd: sds[i] })).collect();
            let norms = NormTable::new(band, [(Gender::Female, table)].into()).unwrap();
            let scores = TraitScores(Dimension::ALL.into_iter().zip(values.iter().copied()).collect());
            let profile = label_traits(&scores, Gender::Female, &norms).unwrap();
            for (i, d) in Dimension::ALL.into_iter().enumerate() {
                let z = values[i] - means[i];
                let expected = if z > band * sds[i] { Level::High }
                    else if z < -band * sds[i] { Level::Low } else { Level::Medium };
                // Recomputed on the centred scale; agree except within rounding of the edge.
                let edge = (z.abs() - band * sds[i]).abs() < 1e-12;
                if !edge {
                    prop_assert_eq!(profile.level(d), expected);
                }
            }
        }

        #[test]
        fn item_order_within_trait_is_irrelevant(key in arb_key(), answers in proptest::collection::vec(1u8..=5, 44)) {
            let r = LikertResponse::new(answers).unwrap();
            let mut items = key.items.clone();
            for list in items.values_mut() {
                list.reverse();
            }
            let shuffled = ScoringKey::new(items, key.reversed.clone()).unwrap();
            prop_assert_eq!(score_bfi(&r, &key), score_bfi(&r, &shuffled));
        }

        #[test]
        fn no_reversal_is_plain_mean(key in arb_key(), answers in proptest::collection::vec(1u8..=5, 44)) {
            let plain = ScoringKey::new(key.items.clone(), BTreeSet::new()).unwrap();
            let r = LikertResponse::new(answers.clone()).unwrap();
            let s = score_bfi(&r, &plain);
            for d in Dimension::ALL {
                let items = plain.items(d);
                let mean = items.iter().map(|&i| f64::from(answers[i - 1])).sum::<f64>() / items.len() as f64;
                prop_assert_eq!(s.get(d), mean);
            }
        }

        #[test]
        fn scores_stay_in_range(key in arb_key(), answers in proptest::collection::vec(1u8..=5, 44)) {
            let s = score_bfi(&LikertResponse::new(answers).unwrap(), &key);
            prop_assert!(s.0.values().all(|v| (1.0..=5.0).contains(v)));
        }
    }

}
