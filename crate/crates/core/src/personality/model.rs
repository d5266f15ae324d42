//! Classifiers that predict a trait group from app-adoption counts.
//!
//! Two families are available: Gaussian naive Bayes over per-category counts
//! and a depth-limited Gini decision tree. Both are deterministic given the
//! training data.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Dimension, Level, Pole, TargetGroup, TraitProfile};
use crate::concern::AppCategory;
use crate::config::{check_schema_version, parse_json};
use crate::rng::seeded;
use crate::Error;

/// Number of installed (non pre-installed) apps per category.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdoptionVector {
    pub counts: BTreeMap<AppCategory, u32>,
}

impl AdoptionVector {
    pub fn from_counts(counts: [u32; 9]) -> Self {
        AdoptionVector {
            counts: AppCategory::ALL.into_iter().zip(counts).collect(),
        }
    }

    pub fn count(&self, category: AppCategory) -> u32 {
        self.counts.get(&category).copied().unwrap_or(0)
    }

    /// Counts in `AppCategory::ALL` order.
    pub fn features(&self) -> [f64; 9] {
        AppCategory::ALL.map(|c| f64::from(self.count(c)))
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Doc {
            Full {
                #[serde(default)]
                schema_version: Option<u32>,
                counts: BTreeMap<AppCategory, u32>,
            },
            Flat(BTreeMap<AppCategory, u32>),
        }
        let doc: Doc = parse_json(text, "adoption vector")?;
        let counts = match doc {
            Doc::Full {
                schema_version,
                counts,
            } => {
                if let Some(v) = schema_version {
                    check_schema_version(v, "adoption vector")?;
                }
                counts
            }
            Doc::Flat(counts) => counts,
        };
        Ok(AdoptionVector { counts })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    NaiveBayes,
    DecisionTree,
}

impl Family {
    pub const ALL: [Family; 2] = [Family::NaiveBayes, Family::DecisionTree];
}

/// Added to every per-class feature variance so that constant features do
/// not produce zero variances.
pub const VAR_FLOOR: f64 = 1e-2;
/// Maximum depth of a decision tree (the root is depth 0).
pub const MAX_DEPTH: usize = 4;
/// Smallest number of samples allowed in a tree leaf.
pub const MIN_LEAF: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub prior: f64,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

impl ClassStats {
    fn log_joint(&self, x: &[f64]) -> f64 {
        let mut total = self.prior.ln();
        for ((&xi, &m), &v) in x.iter().zip(&self.means).zip(&self.variances) {
            total += -0.5 * (2.0 * std::f64::consts::PI * v).ln() - (xi - m).powi(2) / (2.0 * v);
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        positives: usize,
        total: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        /// Samples with `x[feature] <= threshold`.
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Fitted {
    NaiveBayes { negative: ClassStats, positive: ClassStats },
    DecisionTree { root: TreeNode },
}

/// A fitted binary classifier for one target group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraitModel {
    pub target: TargetGroup,
    #[serde(flatten)]
    pub fitted: Fitted,
    pub feature_order: Vec<AppCategory>,
}

impl TraitModel {
    pub fn family(&self) -> Family {
        match self.fitted {
            Fitted::NaiveBayes { .. } => Family::NaiveBayes,
            Fitted::DecisionTree { .. } => Family::DecisionTree,
        }
    }
}

/// Fits a model of `family` for `target`.
///
/// Fails with [`Error::DegenerateData`] unless both classes are present.
pub fn train_model(
    data: &[(AdoptionVector, bool)],
    target: TargetGroup,
    family: Family,
) -> Result<TraitModel, Error> {
    let positives = data.iter().filter(|(_, y)| *y).count();
    if data.is_empty() || positives == 0 || positives == data.len() {
        return Err(Error::DegenerateData(format!(
            "{target}: need both classes, found {positives} positive of {}",
            data.len()
        )));
    }
    let rows: Vec<([f64; 9], bool)> = data.iter().map(|(x, y)| (x.features(), *y)).collect();
    let fitted = match family {
        Family::NaiveBayes => Fitted::NaiveBayes {
            negative: class_stats(&rows, false),
            positive: class_stats(&rows, true),
        },
        Family::DecisionTree => {
            let idx: Vec<usize> = (0..rows.len()).collect();
            Fitted::DecisionTree {
                root: grow(&rows, idx, 0),
            }
        }
    };
    Ok(TraitModel {
        target,
        fitted,
        feature_order: AppCategory::ALL.to_vec(),
    })
}

fn class_stats(rows: &[([f64; 9], bool)], class: bool) -> ClassStats {
    let members: Vec<&[f64; 9]> = rows.iter().filter(|(_, y)| *y == class).map(|(x, _)| x).collect();
    let n = members.len() as f64;
    let means: Vec<f64> = (0..9).map(|j| members.iter().map(|x| x[j]).sum::<f64>() / n).collect();
    let variances = (0..9)
        .map(|j| members.iter().map(|x| (x[j] - means[j]).powi(2)).sum::<f64>() / n + VAR_FLOOR)
        .collect();
    ClassStats {
        prior: n / rows.len() as f64,
        means,
        variances,
    }
}

fn gini(positives: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = positives as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

fn grow(rows: &[([f64; 9], bool)], idx: Vec<usize>, depth: usize) -> TreeNode {
    let total = idx.len();
    let positives = idx.iter().filter(|&&i| rows[i].1).count();
    let leaf = TreeNode::Leaf { positives, total };
    if depth >= MAX_DEPTH || positives == 0 || positives == total || total < 2 * MIN_LEAF {
        return leaf;
    }
    let parent = gini(positives, total) * total as f64;
    let mut best: Option<(f64, usize, f64)> = None;
    for feature in 0..9 {
        let mut sorted: Vec<(f64, bool)> = idx.iter().map(|&i| (rows[i].0[feature], rows[i].1)).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut left_pos = 0;
        for k in 0..sorted.len() - 1 {
            left_pos += usize::from(sorted[k].1);
            if sorted[k].0 == sorted[k + 1].0 {
                continue;
            }
            let left_n = k + 1;
            let right_n = total - left_n;
            if left_n < MIN_LEAF || right_n < MIN_LEAF {
                continue;
            }
            let impurity =
                gini(left_pos, left_n) * left_n as f64 + gini(positives - left_pos, right_n) * right_n as f64;
            if best.map_or(true, |(b, _, _)| impurity < b - 1e-12) {
                best = Some((impurity, feature, (sorted[k].0 + sorted[k + 1].0) / 2.0));
            }
        }
    }
    match best {
        Some((impurity, feature, threshold)) if impurity < parent - 1e-12 => {
            let (left, right): (Vec<usize>, Vec<usize>) =
                idx.into_iter().partition(|&i| rows[i].0[feature] <= threshold);
            TreeNode::Split {
                feature,
                threshold,
                left: Box::new(grow(rows, left, depth + 1)),
                right: Box::new(grow(rows, right, depth + 1)),
            }
        }
        _ => leaf,
    }
}

/// Predicts membership of `x` in the model's target group.
///
/// The score is the log-posterior ratio for naive Bayes (positive means
/// member) and the leaf's positive fraction minus one half for trees, so in
/// both cases the label is `score > 0`.
pub fn predict(model: &TraitModel, x: &AdoptionVector) -> (bool, f64) {
    let features: Vec<f64> = model.feature_order.iter().map(|&c| f64::from(x.count(c))).collect();
    let score = match &model.fitted {
        Fitted::NaiveBayes { negative, positive } => positive.log_joint(&features) - negative.log_joint(&features),
        Fitted::DecisionTree { root } => {
            let mut node = root;
            loop {
                match node {
                    TreeNode::Leaf { positives, total } => break *positives as f64 / *total as f64 - 0.5,
                    TreeNode::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    } => node = if features[*feature] <= *threshold { left } else { right },
                }
            }
        }
    };
    (score > 0.0, score)
}

/// True positives over predicted positives.
///
/// Returns `Ok(None)` when nothing was predicted positive: precision is
/// undefined there, not zero.
pub fn precision(preds: &[bool], labels: &[bool]) -> Result<Option<f64>, Error> {
    if preds.len() != labels.len() {
        return Err(Error::Validation(format!(
            "{} predictions for {} labels",
            preds.len(),
            labels.len()
        )));
    }
    let predicted = preds.iter().filter(|&&p| p).count();
    if predicted == 0 {
        return Ok(None);
    }
    let hits = preds.iter().zip(labels).filter(|(&p, &l)| p && l).count();
    Ok(Some(hits as f64 / predicted as f64))
}

/// Mean precision of assigning every user one of the three levels uniformly
/// at random, where only the target level counts as a positive prediction.
///
/// Trials in which no user was assigned the target level are skipped; if all
/// of them are, the result is `None`.
pub fn random_baseline(labels: &[bool], trials: usize, seed: u64) -> Option<f64> {
    let mut rng = seeded(seed);
    let mut sum = 0.0;
    let mut defined = 0usize;
    for _ in 0..trials {
        let preds: Vec<bool> = labels.iter().map(|_| rng.gen_range(0..3) == 0).collect();
        if let Ok(Some(p)) = precision(&preds, labels) {
            sum += p;
            defined += 1;
        }
    }
    (defined > 0).then(|| sum / defined as f64)
}

/// Ten fitted models, one per target group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBank {
    pub schema_version: u32,
    pub models: Vec<TraitModel>,
}

impl ModelBank {
    pub fn new(models: Vec<TraitModel>) -> Result<Self, Error> {
        let bank = ModelBank {
            schema_version: crate::config::SCHEMA_VERSION,
            models,
        };
        bank.validate()?;
        Ok(bank)
    }

    pub fn validate(&self) -> Result<(), Error> {
        check_schema_version(self.schema_version, "model bank")?;
        for group in TargetGroup::all() {
            let n = self.models.iter().filter(|m| m.target == group).count();
            if n != 1 {
                return Err(Error::Validation(format!(
                    "model bank must hold exactly one model for {group}, found {n}"
                )));
            }
        }
        if let Some(m) = self.models.iter().find(|m| m.feature_order.len() != AppCategory::ALL.len()) {
            return Err(Error::Validation(format!(
                "model for {} has {} features, expected {}",
                m.target,
                m.feature_order.len(),
                AppCategory::ALL.len()
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let bank: ModelBank = parse_json(text, "model bank")?;
        bank.validate()?;
        Ok(bank)
    }

    pub fn model(&self, target: TargetGroup) -> &TraitModel {
        self.models
            .iter()
            .find(|m| m.target == target)
            .expect("validated bank holds every target")
    }

    /// Per-group predictions for `x`.
    pub fn predict_groups(&self, x: &AdoptionVector) -> BTreeMap<TargetGroup, bool> {
        TargetGroup::all()
            .into_iter()
            .map(|g| (g, predict(self.model(g), x).0))
            .collect()
    }

    /// Turns the ten group predictions into a profile: a dimension is High
    /// when only its High model fires, Low when only its Low model fires,
    /// and Medium otherwise.
    pub fn predict_profile(&self, x: &AdoptionVector) -> TraitProfile {
        let groups = self.predict_groups(x);
        let levels = Dimension::ALL
            .into_iter()
            .map(|d| {
                let high = groups[&TargetGroup::new(d, Pole::High)];
                let low = groups[&TargetGroup::new(d, Pole::Low)];
                let level = match (high, low) {
                    (true, false) => Level::High,
                    (false, true) => Level::Low,
                    _ => Level::Medium,
                };
                (d, level)
            })
            .collect();
        TraitProfile { levels, scores: None }
    }
}
