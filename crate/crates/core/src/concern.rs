//! Permission concerns learned from a user's settings history.
//!
//! A user who flips an app's access to `Deny` is signalling concern about that
//! permission. The share of denied apps among the apps requesting a permission
//! is its *attention level*; ranking the eight permissions by attention level
//! (within the category of the app about to be installed) decides which parts
//! of a description get lifted to the top.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::{check_schema_version, parse_json, parse_list_or_envelope};
use crate::Error;

/// The eight runtime permissions tracked for concern learning.
///
/// Declaration order is the canonical order used to break ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PermissionKind {
    Location,
    Contacts,
    Calendars,
    Reminders,
    Photos,
    Bluetooth,
    Microphone,
    Camera,
}

impl PermissionKind {
    pub const ALL: [PermissionKind; 8] = [
        PermissionKind::Location,
        PermissionKind::Contacts,
        PermissionKind::Calendars,
        PermissionKind::Reminders,
        PermissionKind::Photos,
        PermissionKind::Bluetooth,
        PermissionKind::Microphone,
        PermissionKind::Camera,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PermissionKind::Location => "location",
            PermissionKind::Contacts => "contacts",
            PermissionKind::Calendars => "calendars",
            PermissionKind::Reminders => "reminders",
            PermissionKind::Photos => "photos",
            PermissionKind::Bluetooth => "bluetooth",
            PermissionKind::Microphone => "microphone",
            PermissionKind::Camera => "camera",
        }
    }

    /// Position in the canonical order.
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for PermissionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PermissionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        PermissionKind::ALL
            .into_iter()
            .find(|p| p.name() == lower)
            .ok_or_else(|| Error::Validation(format!("unknown permission `{s}`")))
    }
}

impl Serialize for PermissionKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for PermissionKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// App store categories. `Other` absorbs anything unclassified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AppCategory {
    Audio,
    Game,
    Image,
    Maps,
    News,
    Productivity,
    Social,
    Video,
    Other,
}

impl AppCategory {
    pub const ALL: [AppCategory; 9] = [
        AppCategory::Audio,
        AppCategory::Game,
        AppCategory::Image,
        AppCategory::Maps,
        AppCategory::News,
        AppCategory::Productivity,
        AppCategory::Social,
        AppCategory::Video,
        AppCategory::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AppCategory::Audio => "audio",
            AppCategory::Game => "game",
            AppCategory::Image => "image",
            AppCategory::Maps => "maps",
            AppCategory::News => "news",
            AppCategory::Productivity => "productivity",
            AppCategory::Social => "social",
            AppCategory::Video => "video",
            AppCategory::Other => "other",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Lenient lookup: unknown names map to [`AppCategory::Other`].
    pub fn from_name_lossy(s: &str) -> AppCategory {
        let lower = s.trim().to_ascii_lowercase();
        let lower = match lower.as_str() {
            "map" => "maps",
            "games" => "game",
            other => other,
        };
        AppCategory::ALL
            .into_iter()
            .find(|c| c.name() == lower)
            .unwrap_or(AppCategory::Other)
    }
}

impl fmt::Display for AppCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for AppCategory {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for AppCategory {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(AppCategory::from_name_lossy(&s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessStatus {
    Allow,
    Deny,
}

/// One installed app and the access status of each permission it requests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppPermissionRecord {
    pub app_id: String,
    pub category: AppCategory,
    #[serde(default)]
    pub statuses: BTreeMap<PermissionKind, AccessStatus>,
}

impl AppPermissionRecord {
    pub fn new(app_id: impl Into<String>, category: AppCategory) -> Self {
        AppPermissionRecord {
            app_id: app_id.into(),
            category,
            statuses: BTreeMap::new(),
        }
    }

    pub fn with(mut self, permission: PermissionKind, status: AccessStatus) -> Self {
        self.statuses.insert(permission, status);
        self
    }

    pub fn requests(&self, permission: PermissionKind) -> bool {
        self.statuses.contains_key(&permission)
    }

    pub fn denies(&self, permission: PermissionKind) -> bool {
        self.statuses.get(&permission) == Some(&AccessStatus::Deny)
    }
}

/// A user's permission settings across all installed apps.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PermissionSnapshot {
    records: Vec<AppPermissionRecord>,
}

impl PermissionSnapshot {
    /// Builds a snapshot, rejecting empty or duplicate app ids.
    pub fn new(records: Vec<AppPermissionRecord>) -> Result<Self, Error> {
        let mut seen = HashSet::new();
        for record in &records {
            if record.app_id.is_empty() {
                return Err(Error::Validation("app_id must not be empty".into()));
            }
            if !seen.insert(record.app_id.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate app_id `{}` in snapshot",
                    record.app_id
                )));
            }
        }
        Ok(PermissionSnapshot { records })
    }

    pub fn records(&self) -> &[AppPermissionRecord] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Parses the snapshot file format: either a bare JSON list of records or
    /// an envelope `{"schema_version": 1, "records": [...]}`.
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let records: Vec<AppPermissionRecord> = parse_list_or_envelope(text, "snapshot", "records")?;
        PermissionSnapshot::new(records)
    }
}

/// Where a ranking came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankingSource {
    /// Learned from apps in the target category.
    Learned,
    /// No installed apps at all; the population default was returned.
    Default,
    /// No apps in the target category; learned from all apps instead.
    FallbackAllApps,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub permission: PermissionKind,
    pub level: f64,
}

/// All eight permissions ordered by attention level, highest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttentionRanking {
    entries: Vec<RankEntry>,
    source: RankingSource,
}

impl AttentionRanking {
    /// Sorts the given levels into a ranking (descending level, then canonical
    /// order). Every permission must appear exactly once and levels must lie
    /// in `[0, 1]`.
    pub fn from_levels(
        levels: &BTreeMap<PermissionKind, f64>,
        source: RankingSource,
    ) -> Result<Self, Error> {
        for p in PermissionKind::ALL {
            match levels.get(&p) {
                None => {
                    return Err(Error::Config(format!("missing level for permission `{p}`")))
                }
                Some(l) if !(0.0..=1.0).contains(l) => {
                    return Err(Error::Config(format!(
                        "level {l} for permission `{p}` is outside [0, 1]"
                    )))
                }
                Some(_) => {}
            }
        }
        let mut entries: Vec<RankEntry> = PermissionKind::ALL
            .into_iter()
            .map(|permission| RankEntry {
                permission,
                level: levels[&permission],
            })
            .collect();
        // Stable sort over canonical order keeps ties canonical.
        entries.sort_by(|a, b| b.level.total_cmp(&a.level));
        Ok(AttentionRanking { entries, source })
    }

    pub fn entries(&self) -> &[RankEntry] {
        &self.entries
    }

    pub fn source(&self) -> RankingSource {
        self.source
    }

    pub fn permissions(&self) -> impl Iterator<Item = PermissionKind> + '_ {
        self.entries.iter().map(|e| e.permission)
    }

    /// Zero-based rank of `permission`.
    pub fn rank_of(&self, permission: PermissionKind) -> usize {
        self.entries
            .iter()
            .position(|e| e.permission == permission)
            .expect("ranking holds every permission")
    }

    pub fn level_of(&self, permission: PermissionKind) -> f64 {
        self.entries[self.rank_of(permission)].level
    }

    fn with_source(mut self, source: RankingSource) -> Self {
        self.source = source;
        self
    }

    /// Checks the invariants of a ranking read from outside the library.
    pub fn validate(&self) -> Result<(), Error> {
        let levels: BTreeMap<_, _> = self.entries.iter().map(|e| (e.permission, e.level)).collect();
        if self.entries.len() != 8 || levels.len() != 8 {
            return Err(Error::Validation(
                "ranking must hold each of the eight permissions exactly once".into(),
            ));
        }
        let rebuilt = AttentionRanking::from_levels(&levels, self.source)?;
        if rebuilt.entries != self.entries {
            return Err(Error::Validation(
                "ranking entries are not in descending level / canonical order".into(),
            ));
        }
        Ok(())
    }
}

/// Population statistics the default ranking is built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStatistics {
    pub schema_version: u32,
    pub levels: BTreeMap<String, f64>,
}

impl NormStatistics {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let stats: NormStatistics = parse_json(text, "default ranking")?;
        check_schema_version(stats.schema_version, "default ranking")?;
        Ok(stats)
    }
}

/// Fraction of the apps requesting `permission` whose access was set to Deny.
///
/// Apps that do not request the permission are ignored; with no requesters the
/// level is 0.
pub fn attention_level(apps: &[&AppPermissionRecord], permission: PermissionKind) -> f64 {
    let (requesting, denied) = apps.iter().fold((0usize, 0usize), |(r, d), app| {
        if app.requests(permission) {
            (r + 1, d + usize::from(app.denies(permission)))
        } else {
            (r, d)
        }
    });
    if requesting == 0 {
        0.0
    } else {
        denied as f64 / requesting as f64
    }
}

/// Builds the population default ranking from configuration.
pub fn default_ranking(config: &NormStatistics) -> Result<AttentionRanking, Error> {
    let mut levels = BTreeMap::new();
    for (name, level) in &config.levels {
        let permission: PermissionKind = name
            .parse()
            .map_err(|_| Error::Config(format!("unknown permission `{name}` in default ranking")))?;
        levels.insert(permission, *level);
    }
    AttentionRanking::from_levels(&levels, RankingSource::Default)
}

/// Ranks permissions for an app about to be installed in category `category`.
///
/// * no installed apps: the default ranking is returned as-is;
/// * no installed apps in `category`: all installed apps are used;
/// * otherwise only the apps in `category` are used.
pub fn rank_permissions(
    category: AppCategory,
    snapshot: &PermissionSnapshot,
    default: &AttentionRanking,
) -> AttentionRanking {
    if snapshot.is_empty() {
        return default.clone().with_source(RankingSource::Default);
    }
    let mut apps: Vec<&AppPermissionRecord> = snapshot
        .records()
        .iter()
        .filter(|r| r.category == category)
        .collect();
    let mut source = RankingSource::Learned;
    if apps.is_empty() {
        apps = snapshot.records().iter().collect();
        source = RankingSource::FallbackAllApps;
    }
    let levels: BTreeMap<_, _> = PermissionKind::ALL
        .into_iter()
        .map(|p| (p, attention_level(&apps, p)))
        .collect();
    AttentionRanking::from_levels(&levels, source).expect("attention levels lie in [0, 1]")
}

/// Lifts permission-tagged items to the top in ranking order.
///
/// Untagged items follow in their original order; the sort is stable so items
/// sharing a permission keep their relative order.
pub fn reorder_sentences<T>(
    items: Vec<(T, Option<PermissionKind>)>,
    ranking: &AttentionRanking,
) -> Vec<(T, Option<PermissionKind>)> {
    let mut keyed: Vec<_> = items
        .into_iter()
        .map(|(item, tag)| {
            let key = tag.map_or(usize::MAX, |p| ranking.rank_of(p));
            (key, item, tag)
        })
        .collect();
    keyed.sort_by_key(|(key, _, _)| *key);
    keyed.into_iter().map(|(_, item, tag)| (item, tag)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use AccessStatus::{Allow, Deny};
    use PermissionKind::*;

    fn shipped_default() -> AttentionRanking {
        Config::shipped().default_ranking().unwrap()
    }

    #[test]
    fn five_of_eight_denied() {
        let apps: Vec<_> = (0..8)
            .map(|i| {
                AppPermissionRecord::new(format!("app{i}"), AppCategory::Maps)
                    .with(Location, if i < 5 { Deny } else { Allow })
            })
            .collect();
        let refs: Vec<_> = apps.iter().collect();
        assert_eq!(attention_level(&refs, Location), 0.625);
    }

    #[test]
    fn all_allowed_is_zero() {
        let apps: Vec<_> = (0..4)
            .map(|i| AppPermissionRecord::new(format!("a{i}"), AppCategory::Game).with(Camera, Allow))
            .collect();
        let refs: Vec<_> = apps.iter().collect();
        assert_eq!(attention_level(&refs, Camera), 0.0);
        assert_eq!(attention_level(&[], Camera), 0.0);
    }

    #[test]
    fn non_requesters_do_not_dilute() {
        let a = AppPermissionRecord::new("a", AppCategory::Game).with(Camera, Deny);
        let b = AppPermissionRecord::new("b", AppCategory::Game).with(Location, Allow);
        assert_eq!(attention_level(&[&a, &b], Camera), 1.0);
    }

    #[test]
    fn empty_snapshot_returns_default() {
        let default = shipped_default();
        let ranking = rank_permissions(AppCategory::Social, &PermissionSnapshot::default(), &default);
        assert_eq!(ranking.source(), RankingSource::Default);
        assert_eq!(ranking.entries(), default.entries());
    }

    #[test]
    fn single_denial_leads_then_canonical() {
        let snap = PermissionSnapshot::new(vec![
            AppPermissionRecord::new("m1", AppCategory::Maps).with(Location, Deny).with(Camera, Allow),
            AppPermissionRecord::new("m2", AppCategory::Maps).with(Location, Allow),
            AppPermissionRecord::new("s1", AppCategory::Social).with(Camera, Deny),
        ])
        .unwrap();
        let ranking = rank_permissions(AppCategory::Maps, &snap, &shipped_default());
        assert_eq!(ranking.source(), RankingSource::Learned);
        assert_eq!(ranking.entries()[0], RankEntry { permission: Location, level: 0.5 });
        let rest: Vec<_> = ranking.permissions().skip(1).collect();
        assert_eq!(rest, vec![Contacts, Calendars, Reminders, Photos, Bluetooth, Microphone, Camera]);
        assert!(ranking.entries()[1..].iter().all(|e| e.level == 0.0));
    }

    #[test]
    fn missing_category_falls_back_to_all_apps() {
        let snap = PermissionSnapshot::new(vec![
            AppPermissionRecord::new("s1", AppCategory::Social).with(Camera, Deny),
        ])
        .unwrap();
        let ranking = rank_permissions(AppCategory::News, &snap, &shipped_default());
        assert_eq!(ranking.source(), RankingSource::FallbackAllApps);
        assert_eq!(ranking.entries()[0].permission, Camera);
    }

    #[test]
    fn shipped_default_endpoints() {
        let ranking = shipped_default();
        let order: Vec<_> = ranking.permissions().collect();
        assert_eq!(order[0], Location);
        let mut tail = order[5..].to_vec();
        tail.sort();
        assert_eq!(tail, vec![Calendars, Reminders, Bluetooth]);
    }

    #[test]
    fn equal_levels_use_canonical_order() {
        let stats = NormStatistics {
            schema_version: 1,
            levels: PermissionKind::ALL.iter().map(|p| (p.name().to_string(), 0.3)).collect(),
        };
        let ranking = default_ranking(&stats).unwrap();
        assert_eq!(ranking.permissions().collect::<Vec<_>>(), PermissionKind::ALL.to_vec());
    }

    #[test]
    fn default_config_missing_permission_is_config_error() {
        let mut stats = NormStatistics {
            schema_version: 1,
            levels: PermissionKind::ALL.iter().map(|p| (p.name().to_string(), 0.3)).collect(),
        };
        stats.levels.remove("camera");
        assert!(matches!(default_ranking(&stats), Err(Error::Config(_))));
    }

    #[test]
    fn reorder_swaps_by_rank() {
        let ranking = shipped_default();
        let out = reorder_sentences(vec![("s1", Some(Camera)), ("s2", Some(Location))], &ranking);
        assert_eq!(out.iter().map(|(s, _)| *s).collect::<Vec<_>>(), vec!["s2", "s1"]);
    }

    #[test]
    fn reorder_untagged_is_identity() {
        let ranking = shipped_default();
        let items = vec![("a", None), ("b", None), ("c", None)];
        assert_eq!(reorder_sentences(items.clone(), &ranking), items);
    }

    #[test]
    fn reorder_untagged_after_tagged() {
        let ranking = shipped_default();
        let out = reorder_sentences(vec![("u", None), ("t", Some(Bluetooth))], &ranking);
        assert_eq!(out[0].0, "t");
    }

    #[test]
    fn snapshot_json_variants() {
        let list = r#"[{"app_id":"a","category":"Social","statuses":{"location":"deny"}},
                       {"app_id":"b","category":"weather","statuses":{}}]"#;
        let snap = PermissionSnapshot::from_json(list).unwrap();
        assert_eq!(snap.records()[1].category, AppCategory::Other);
        assert!(snap.records()[0].denies(Location));

        let env = r#"{"schema_version":1,"records":[]}"#;
        assert!(PermissionSnapshot::from_json(env).unwrap().is_empty());

        let bad_perm = r#"[{"app_id":"a","category":"social","statuses":{"sms":"deny"}}]"#;
        let err = PermissionSnapshot::from_json(bad_perm).unwrap_err().to_string();
        assert!(err.contains("unknown permission"), "{err}");
        assert!(err.contains("line 1"), "{err}");

        let dup = r#"[{"app_id":"a","category":"social"},{"app_id":"a","category":"game"}]"#;
        assert!(PermissionSnapshot::from_json(dup).is_err());

        let wrong_version = r#"{"schema_version":9,"records":[]}"#;
        assert!(PermissionSnapshot::from_json(wrong_version).is_err());
    }

    #[test]
    fn ranking_validate_rejects_bad_order() {
        let mut ranking = shipped_default();
        assert!(ranking.validate().is_ok());
        ranking.entries.swap(0, 1);
        assert!(ranking.validate().is_err());
    }
}
