use std::collections::BTreeMap;

use perscribe::concern::RankingSource;
use perscribe::{
    baseline_description, generate_description, AttentionRanking, Config, Dimension, FeatureCategory, Level,
    MalwareFeature, PermissionKind, TraitProfile,
};

fn ranking(order: &[PermissionKind]) -> AttentionRanking {
    let levels: BTreeMap<PermissionKind, f64> = PermissionKind::ALL
        .into_iter()
        .map(|p| {
            let level = order.iter().position(|q| *q == p).map_or(0.0, |i| 0.9 - 0.1 * i as f64);
            (p, level)
        })
        .collect();
    AttentionRanking::from_levels(&levels, RankingSource::Learned).unwrap()
}

#[test]
fn ranked_permissions_come_first() {
    let config = Config::shipped();
    let features = vec![
        MalwareFeature::new("SEND_SMS", FeatureCategory::Permission),
        MalwareFeature::new("CAMERA", FeatureCategory::Permission).with_permission(PermissionKind::Camera),
        MalwareFeature::new("ACCESS_FINE_LOCATION", FeatureCategory::Permission)
            .with_permission(PermissionKind::Location),
    ];
    let location_first = ranking(&[PermissionKind::Location, PermissionKind::Camera]);
    let d = generate_description(&config, &features, &TraitProfile::neutral(), &location_first, 4).unwrap();
    let order: Vec<&str> = d.sentences.iter().map(|s| s.feature.as_str()).collect();
    let first = |t: &str| order.iter().position(|x| *x == t).unwrap();
    let last = |t: &str| order.iter().rposition(|x| *x == t).unwrap();
    assert!(last("ACCESS_FINE_LOCATION") < first("CAMERA"), "{order:?}");
    assert!(last("CAMERA") < first("SEND_SMS"), "{order:?}");

    let camera_first = ranking(&[PermissionKind::Camera, PermissionKind::Location]);
    let d = generate_description(&config, &features, &TraitProfile::neutral(), &camera_first, 4).unwrap();
    assert_eq!(d.sentences[0].feature, "CAMERA");
}

#[test]
fn baseline_follows_category_templates() {
    let config = Config::shipped();
    let raw: serde_json::Value = serde_json::from_str(include_str!("../data/lexicon.json")).unwrap();
    let features: Vec<MalwareFeature> = config
        .lexicon
        .entries
        .iter()
        .map(|e| MalwareFeature::new(e.token.clone(), e.category))
        .collect();
    let out = baseline_description(&features, &config.lexicon);
    assert_eq!(out.len(), features.len());
    for ((text, _), feature) in out.iter().zip(&features) {
        let category = serde_json::to_value(feature.category).unwrap();
        let info = &raw["categories"][category.as_str().unwrap()];
        let entry = raw["entries"]
            .as_array()
            .unwrap()
            .iter()
            .find(|e| e["token"] == feature.token.as_str() && e["category"] == category)
            .unwrap();
        let action = entry["action"].as_str().or(info["default_action"].as_str()).unwrap();
        let expected = info["baseline"]
            .as_str()
            .unwrap()
            .replace("{action}", action)
            .replace("{token}", &feature.token);
        assert_eq!(text, &expected);
    }
    let two = baseline_description(&features[..2], &config.lexicon);
    assert_eq!(two[0].0, out[0].0);
    assert_eq!(two[1].0, out[1].0);
}

#[test]
fn same_seed_same_json() {
    let config = Config::shipped();
    let features = [MalwareFeature::new("SEND_SMS", FeatureCategory::Permission)];
    let r = config.default_ranking().unwrap();
    let p = TraitProfile::with(&[(Dimension::Neuroticism, Level::High)]);
    let a = generate_description(&config, &features, &p, &r, 99).unwrap();
    let b = generate_description(&config, &features, &p, &r, 99).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn bad_feature_reports_its_token() {
    let config = Config::shipped();
    let features = [MalwareFeature::new("", FeatureCategory::Permission)];
    let r = config.default_ranking().unwrap();
    let err = generate_description(&config, &features, &TraitProfile::neutral(), &r, 1).unwrap_err();
    assert!(matches!(err, perscribe::Error::Feature { .. }), "{err}");
}
