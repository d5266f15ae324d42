//! Synthetic app-adoption data with planted trait/category correlations.
//!
//! Each sample draws a level for every dimension independently (High and Low
//! with the configured probabilities, Medium otherwise). For every category
//! the standardized count is a weighted sum of standardized group-membership
//! indicators plus Gaussian noise sized to give the sum unit variance, so a
//! weight `w` on a single group yields a latent correlation of `w` with that
//! group's membership. Counts are `round(max(0, mean + sd * z))`; clipping
//! at zero attenuates correlations for categories with small means.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::model::AdoptionVector;
use super::{Dimension, Level, Pole, TargetGroup};
use crate::concern::AppCategory;
use crate::config::{check_schema_version, parse_json, parse_list_or_envelope, SCHEMA_VERSION};
use crate::rng::seeded;
use crate::Error;

/// Largest share of a category's variance the planted signal may take.
pub const MAX_SIGNAL_VARIANCE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountDistribution {
    pub mean: f64,
    pub sd: f64,
}

/// Base count distribution per category plus planted correlations per target
/// group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSpec {
    pub schema_version: u32,
    pub p_high: f64,
    pub p_low: f64,
    pub base: BTreeMap<AppCategory, CountDistribution>,
    #[serde(default)]
    pub weights: BTreeMap<TargetGroup, BTreeMap<AppCategory, f64>>,
}

impl CorrelationSpec {
    /// The default spec: a handful of moderate trait/category links.
    pub fn shipped() -> Self {
        CorrelationSpec::from_json(crate::config::shipped::CORRELATIONS).expect("shipped correlation spec is valid")
    }

    /// The shipped base distributions with no planted correlations.
    pub fn null() -> Self {
        CorrelationSpec {
            weights: BTreeMap::new(),
            ..CorrelationSpec::shipped()
        }
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let spec: CorrelationSpec = parse_json(text, "correlation spec")?;
        check_schema_version(spec.schema_version, "correlation spec")?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        if !ok(self.p_high) || !ok(self.p_low) || self.p_high + self.p_low > 1.0 {
            return Err(Error::Config("p_high and p_low must be probabilities summing to at most 1".into()));
        }
        if self.p_high == 0.0 || self.p_low == 0.0 || self.p_high + self.p_low == 1.0 {
            return Err(Error::Config("every level must have positive probability".into()));
        }
        for category in AppCategory::ALL {
            let d = self
                .base
                .get(&category)
                .ok_or_else(|| Error::Config(format!("no base distribution for {category}")))?;
            if !(d.mean.is_finite() && d.sd.is_finite() && d.sd >= 0.0) {
                return Err(Error::Config(format!("bad base distribution for {category}")));
            }
        }
        for (group, row) in &self.weights {
            for (category, w) in row {
                if !(-1.0..=1.0).contains(w) {
                    return Err(Error::Config(format!("weight {group}/{category} must be in [-1, 1]")));
                }
            }
        }
        Ok(())
    }

    fn weight(&self, group: TargetGroup, category: AppCategory) -> f64 {
        self.weights
            .get(&group)
            .and_then(|r| r.get(&category))
            .copied()
            .unwrap_or(0.0)
    }

    fn p(&self, pole: Pole) -> f64 {
        match pole {
            Pole::High => self.p_high,
            Pole::Low => self.p_low,
        }
    }

    /// Correlation between the High and Low indicators of one dimension.
    fn pole_correlation(&self) -> f64 {
        let (h, l) = (self.p_high, self.p_low);
        -h * l / (h * (1.0 - h) * l * (1.0 - l)).sqrt()
    }

    /// Weights for `category`, rescaled so the signal variance stays within
    /// [`MAX_SIGNAL_VARIANCE`], and the matching noise standard deviation.
    fn scaled_weights(&self, category: AppCategory) -> (Vec<(TargetGroup, f64)>, f64) {
        let rho = self.pole_correlation();
        let mut variance = 0.0;
        for d in Dimension::ALL {
            let wh = self.weight(TargetGroup::new(d, Pole::High), category);
            let wl = self.weight(TargetGroup::new(d, Pole::Low), category);
            variance += wh * wh + wl * wl + 2.0 * wh * wl * rho;
        }
        let scale = if variance > MAX_SIGNAL_VARIANCE {
            (MAX_SIGNAL_VARIANCE / variance).sqrt()
        } else {
            1.0
        };
        let weights = TargetGroup::all()
            .into_iter()
            .map(|g| (g, self.weight(g, category) * scale))
            .collect();
        let noise = (1.0 - variance * scale * scale).max(0.0).sqrt();
        (weights, noise)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdoptionSample {
    pub adoption: AdoptionVector,
    pub levels: BTreeMap<Dimension, Level>,
}

/// Samples with ground-truth levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdoptionDataset {
    pub schema_version: u32,
    pub samples: Vec<AdoptionSample>,
}

impl AdoptionDataset {
    /// Accepts the envelope form or a bare list of samples.
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let samples = parse_list_or_envelope(text, "dataset", "samples")?;
        Ok(AdoptionDataset {
            schema_version: SCHEMA_VERSION,
            samples,
        })
    }

    /// Binary labels for one target group.
    pub fn labeled(&self, target: TargetGroup) -> Vec<(AdoptionVector, bool)> {
        self.samples
            .iter()
            .map(|s| {
                let level = s.levels.get(&target.dimension).copied().unwrap_or(Level::Medium);
                (s.adoption.clone(), target.contains(level))
            })
            .collect()
    }
}

/// Generates `n` samples following `spec`.
pub fn synth_dataset(spec: &CorrelationSpec, n: usize, seed: u64) -> Result<AdoptionDataset, Error> {
    spec.validate()?;
    if n < 20 {
        return Err(Error::Validation(format!("dataset size must be at least 20, got {n}")));
    }
    let mut rng = seeded(seed);
    let per_category: Vec<_> = AppCategory::ALL.into_iter().map(|c| spec.scaled_weights(c)).collect();
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        let mut levels = BTreeMap::new();
        for d in Dimension::ALL {
            let u: f64 = rng.gen();
            let level = if u < spec.p_high {
                Level::High
            } else if u < spec.p_high + spec.p_low {
                Level::Low
            } else {
                Level::Medium
            };
            levels.insert(d, level);
        }
        let standardized = |g: TargetGroup| {
            let p = spec.p(g.pole);
            let m = if levels[&g.dimension] == g.pole.level() { 1.0 } else { 0.0 };
            (m - p) / (p * (1.0 - p)).sqrt()
        };
        let mut counts = BTreeMap::new();
        for (i, category) in AppCategory::ALL.into_iter().enumerate() {
            let (weights, noise) = &per_category[i];
            let signal: f64 = weights.iter().map(|&(g, w)| w * standardized(g)).sum();
            let eps: f64 = rng.sample(StandardNormal);
            let z = signal + noise * eps;
            let base = spec.base[&category];
            let count = (base.mean + base.sd * z).max(0.0).round() as u32;
            counts.insert(category, count);
        }
        samples.push(AdoptionSample {
            adoption: AdoptionVector { counts },
            levels,
        });
    }
    Ok(AdoptionDataset {
        schema_version: SCHEMA_VERSION,
        samples,
    })
}
