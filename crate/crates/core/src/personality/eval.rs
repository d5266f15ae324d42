//! Train/validate/test harness for the ten-model bank.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::model::{precision, predict, random_baseline, train_model, Family, ModelBank, TraitModel};
use super::synth::AdoptionDataset;
use super::TargetGroup;
use crate::rng::seeded;
use crate::Error;

/// Trials used for each random baseline.
pub const BASELINE_TRIALS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetReport {
    pub target: TargetGroup,
    pub family: Family,
    /// Test-set precision; absent when the model predicted no positives.
    pub precision: Option<f64>,
    pub random_baseline: Option<f64>,
    pub positives_in_test: usize,
}

impl TargetReport {
    /// Precision minus baseline, counting an undefined precision as no gain.
    pub fn uplift(&self) -> f64 {
        match (self.precision, self.random_baseline) {
            (Some(p), Some(b)) => p - b,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankReport {
    pub schema_version: u32,
    pub seed: u64,
    pub train: usize,
    pub validation: usize,
    pub test: usize,
    pub targets: Vec<TargetReport>,
    /// Mean over the ten targets; undefined precisions count as the baseline.
    pub mean_precision: f64,
    pub mean_baseline: f64,
}

impl BankReport {
    pub fn mean_uplift(&self) -> f64 {
        self.mean_precision - self.mean_baseline
    }
}

/// Splits the samples 60/20/20 with a seeded shuffle, picks the family with
/// the better validation precision for each target, and reports test
/// precision against the random baseline.
///
/// The returned bank holds the chosen family refitted on train plus
/// validation data.
pub fn evaluate_bank(data: &AdoptionDataset, seed: u64) -> Result<(BankReport, ModelBank), Error> {
    let n = data.samples.len();
    if n < 20 {
        return Err(Error::Validation(format!("need at least 20 samples, got {n}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeded(seed));
    let n_train = n * 6 / 10;
    let n_val = n * 2 / 10;
    let (train_idx, rest) = order.split_at(n_train);
    let (val_idx, test_idx) = rest.split_at(n_val);

    let mut targets = Vec::new();
    let mut models: Vec<TraitModel> = Vec::new();
    for (k, target) in TargetGroup::all().into_iter().enumerate() {
        let labeled = data.labeled(target);
        let pick = |idx: &[usize]| idx.iter().map(|&i| labeled[i].clone()).collect::<Vec<_>>();
        let (train, val, test) = (pick(train_idx), pick(val_idx), pick(test_idx));

        let mut best: Option<(f64, TraitModel)> = None;
        for family in Family::ALL {
            let model = train_model(&train, target, family)?;
            let preds: Vec<bool> = val.iter().map(|(x, _)| predict(&model, x).0).collect();
            let labels: Vec<bool> = val.iter().map(|(_, y)| *y).collect();
            let p = precision(&preds, &labels)?.unwrap_or(-1.0);
            if best.as_ref().map_or(true, |(b, _)| p > *b) {
                best = Some((p, model));
            }
        }
        let (_, model) = best.expect("at least one family");
        let preds: Vec<bool> = test.iter().map(|(x, _)| predict(&model, x).0).collect();
        let labels: Vec<bool> = test.iter().map(|(_, y)| *y).collect();
        targets.push(TargetReport {
            target,
            family: model.family(),
            precision: precision(&preds, &labels)?,
            random_baseline: random_baseline(&labels, BASELINE_TRIALS, seed ^ (k as u64 + 1)),
            positives_in_test: labels.iter().filter(|&&y| y).count(),
        });

        let mut refit = train.clone();
        refit.extend(val);
        models.push(train_model(&refit, target, model.family())?);
    }

    let mean_baseline = targets.iter().map(|t| t.random_baseline.unwrap_or(0.0)).sum::<f64>() / targets.len() as f64;
    let mean_precision = targets
        .iter()
        .map(|t| t.precision.or(t.random_baseline).unwrap_or(0.0))
        .sum::<f64>()
        / targets.len() as f64;
    let report = BankReport {
        schema_version: crate::config::SCHEMA_VERSION,
        seed,
        train: train_idx.len(),
        validation: val_idx.len(),
        test: test_idx.len(),
        targets,
        mean_precision,
        mean_baseline,
    };
    Ok((report, ModelBank::new(models)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::personality::synth::{synth_dataset, CorrelationSpec};

    #[test]
    fn harness_reports_every_target() {
        let data = synth_dataset(&CorrelationSpec::shipped(), 300, 8).unwrap();
        let (report, bank) = evaluate_bank(&data, 8).unwrap();
        assert_eq!(report.targets.len(), 10);
        assert_eq!(report.train + report.validation + report.test, 300);
        bank.validate().unwrap();
        assert_eq!(evaluate_bank(&data, 8).unwrap().0, report);
    }
}
