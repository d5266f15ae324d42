//! End-to-end generation and the plain template baseline.

use serde::{Deserialize, Serialize};

use crate::concern::{reorder_sentences, AttentionRanking, PermissionKind};
use crate::content::FeatureLexicon;
use crate::content::{explain_feature, plan_content, MalwareFeature};
use crate::nlg::aggregate::{link_relations, trace_of};
use crate::nlg::markers::markers_used;
use crate::nlg::tree::attr;
use crate::nlg::{
    aggregate, insert_markers, lexicalize, params_from_profile, realize, select_template, GenerationParams, MarkerUse,
};
use crate::personality::TraitProfile;
use crate::rng::{fork, seeded};
use crate::{Config, Error};

/// One realized sentence and where it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescribedSentence {
    pub text: String,
    /// Token of the feature the sentence explains.
    pub feature: String,
    pub permission: Option<PermissionKind>,
    pub markers: Vec<MarkerUse>,
    /// Aggregation steps, e.g. `justify:with`.
    pub operations: Vec<String>,
    /// Names of the syntactic templates used, one per clause.
    pub templates: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonalisedDescription {
    pub seed: u64,
    pub profile: TraitProfile,
    pub ranking: AttentionRanking,
    pub sentences: Vec<DescribedSentence>,
}

impl PersonalisedDescription {
    /// The sentences joined by single spaces.
    pub fn text(&self) -> String {
        self.sentences
            .iter()
            .map(|s| s.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Text of the sentences explaining `token`, in output order.
    pub fn text_for(&self, token: &str) -> String {
        self.sentences
            .iter()
            .filter(|s| s.feature == token)
            .map(|s| s.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("description serializes")
    }
}

/// One fixed-template sentence per feature, in input order.
pub fn baseline_description(
    features: &[MalwareFeature],
    lexicon: &FeatureLexicon,
) -> Vec<(String, Option<PermissionKind>)> {
    features
        .iter()
        .map(|f| (lexicon.baseline_sentence(f), lexicon.permission_tag(f)))
        .collect()
}

fn describe_feature(
    config: &Config,
    feature: &MalwareFeature,
    params: &GenerationParams,
    seed: u64,
) -> Result<Vec<DescribedSentence>, Error> {
    feature.validate()?;
    let mut rng = seeded(seed);
    let props = explain_feature(feature, &config.lexicon);
    let plan = plan_content(&props, params, &config.synonyms, &mut fork(&mut rng))?;

    let mut template_rng = fork(&mut rng);
    let trees = plan
        .iter()
        .map(|p| select_template(p, params, &config.templates, &mut template_rng))
        .collect::<Result<Vec<_>, _>>()?;
    let items: Vec<_> = trees.into_iter().zip(link_relations(&plan)).collect();
    let sentences = aggregate(&items, params, &mut fork(&mut rng))?;

    let mut marker_rng = fork(&mut rng);
    let permission = config.lexicon.permission_tag(feature);
    sentences
        .into_iter()
        .enumerate()
        .map(|(i, mut tree)| {
            if i == 0 {
                tree.set_attr(attr::UTTERANCE_INITIAL, "true");
            } else {
                tree.set_attr(attr::GIVEN, "true");
            }
            let marked = insert_markers(&tree, params, &config.markers, &config.synonyms, &mut fork(&mut marker_rng));
            let final_tree = lexicalize(&marked, params, &config.synonyms);
            let mut templates = Vec::new();
            final_tree.walk(&mut |n| {
                if let Some(t) = n.attr(attr::TEMPLATE) {
                    templates.push(t.to_string());
                }
            });
            Ok(DescribedSentence {
                text: realize(&final_tree)?,
                feature: feature.token.clone(),
                permission,
                markers: markers_used(&final_tree),
                operations: trace_of(&final_tree),
                templates,
            })
        })
        .collect()
}

/// Generates a personalised description of `features`.
///
/// Each feature is explained, planned, templated, aggregated, marked,
/// lexicalized and realized on its own stream seeded with `seed ^ index`.
/// Sentences are then lifted into ranking order, so the output depends only
/// on the arguments and the configuration.
pub fn generate_description(
    config: &Config,
    features: &[MalwareFeature],
    profile: &TraitProfile,
    ranking: &AttentionRanking,
    seed: u64,
) -> Result<PersonalisedDescription, Error> {
    let params = params_from_profile(profile, &config.trait_params)?;
    let mut tagged = Vec::new();
    for (i, feature) in features.iter().enumerate() {
        let sentences =
            describe_feature(config, feature, &params, seed ^ i as u64).map_err(|e| e.in_feature(&feature.token))?;
        tagged.extend(sentences.into_iter().map(|s| {
            let tag = s.permission;
            (s, tag)
        }));
    }
    let sentences = reorder_sentences(tagged, ranking).into_iter().map(|(s, _)| s).collect();
    Ok(PersonalisedDescription {
        seed,
        profile: profile.clone(),
        ranking: ranking.clone(),
        sentences,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::FeatureCategory;
    use crate::personality::{Dimension, Level};

    fn sms() -> MalwareFeature {
        MalwareFeature::new("SEND_SMS", FeatureCategory::Permission)
    }

    #[test]
    fn baseline_send_sms() {
        let config = Config::shipped();
        let out = baseline_description(&[sms()], &config.lexicon);
        assert_eq!(out[0].0, "App sends SMS messages.");
    }

    #[test]
    fn repeatable() {
        let config = Config::shipped();
        let ranking = config.default_ranking().unwrap();
        let a = generate_description(&config, &[sms()], &TraitProfile::neutral(), &ranking, 11).unwrap();
        let b = generate_description(&config, &[sms()], &TraitProfile::neutral(), &ranking, 11).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let back: PersonalisedDescription = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn extravert_agreeable_style() {
        let config = Config::shipped();
        let ranking = config.default_ranking().unwrap();
        let profile = TraitProfile::with(&[
            (Dimension::Extraversion, Level::High),
            (Dimension::Agreeableness, Level::High),
        ]);
        let d = generate_description(&config, &[sms()], &profile, &ranking, 3).unwrap();
        let text = d.text();
        assert!(text.contains('!'), "{text}");
        assert!(text.contains("like") || text.contains("I mean"), "{text}");
    }

    #[test]
    fn every_feature_has_provenance() {
        let config = Config::shipped();
        let ranking = config.default_ranking().unwrap();
        let features = vec![
            sms(),
            MalwareFeature::new("CAMERA", FeatureCategory::Permission),
            MalwareFeature::new("NOT_A_TOKEN", FeatureCategory::Intent),
        ];
        let d = generate_description(&config, &features, &TraitProfile::neutral(), &ranking, 5).unwrap();
        for f in &features {
            assert!(d.sentences.iter().any(|s| s.feature == f.token), "{}", f.token);
        }
    }

    #[test]
    fn every_parameter_is_read_by_its_declared_operation() {
        use crate::nlg::params::audit;
        use crate::nlg::Param;
        let config = Config::shipped();
        let mut settings = vec![GenerationParams::uniform(1.0), GenerationParams::neutral(), GenerationParams::uniform(0.0)];
        let mut concede = GenerationParams::uniform(1.0);
        concede.set(Param::Period, 0.0);
        settings.push(concede);
        let mut verbose = GenerationParams::neutral();
        verbose.set(Param::Verbosity, 1.0);
        settings.push(verbose.clone());
        verbose.set(Param::Concessions, 1.0);
        settings.push(verbose);
        audit::start();
        for params in &settings {
            for entry in &config.lexicon.entries {
                let feature = MalwareFeature::new(entry.token.clone(), entry.category);
                for seed in 0..4 {
                    describe_feature(&config, &feature, params, seed).unwrap();
                }
            }
        }
        let reads = audit::finish();
        for p in Param::ALL {
            let stages = reads.get(&p).unwrap_or_else(|| panic!("{p} is never read"));
            let expected = &config.coverage.readers[&p];
            assert!(
                stages.len() == 1 && stages.contains(expected.as_str()),
                "{p}: read by {stages:?}, declared {expected}"
            );
        }
    }
}
