use std::collections::HashSet;
use std::time::Instant;

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{FoldPlan, LabeledSegment};
use crate::error::{Error, Result};
use crate::model::{ModelConfig, Task};

use super::{mean_std, train_fold, FoldOutcome, Metrics, Prediction, TrainConfig};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub metrics: Metrics,
    pub wall_seconds: f64,
    pub epoch_losses: Vec<f64>,
    pub predictions: Vec<Prediction>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CvReport {
    pub task: Task,
    pub folds: Vec<FoldReport>,
    pub mean: Metrics,
    /// Sample standard deviation over folds.
    pub std: Metrics,
    pub total_seconds: f64,
}

impl CvReport {
    /// Aggregates per-fold metrics; a metric is reported only when every
    /// fold has it.
    pub fn aggregate(task: Task, folds: Vec<FoldReport>, total_seconds: f64) -> Self {
        let mut mean = [None; 7];
        let mut std = [None; 7];
        for i in 0..7 {
            let vals: Option<Vec<f64>> = folds.iter().map(|f| f.metrics.values()[i]).collect();
            if let Some(vals) = vals.filter(|v| !v.is_empty()) {
                let (m, s) = mean_std(&vals);
                mean[i] = Some(m);
                std[i] = Some(s);
            }
        }
        Self {
            task,
            folds,
            mean: Metrics::from_values(mean),
            std: Metrics::from_values(std),
            total_seconds,
        }
    }

    pub fn fold_seconds(&self) -> Vec<f64> {
        self.folds.iter().map(|f| f.wall_seconds).collect()
    }
}

/// Trains one model per fold of `plan`, each on the segments of every other
/// fold and seeded with `seed + fold`. `on_fold` sees each finished fold, for
/// example to write a checkpoint.
pub fn cross_validate<F>(
    segments: &[LabeledSegment],
    plan: &FoldPlan,
    model_config: &ModelConfig,
    config: &TrainConfig,
    on_fold: F,
) -> Result<CvReport>
where
    F: Fn(usize, &FoldOutcome) -> Result<()> + Sync,
{
    config.validate()?;
    let planned: HashSet<&str> = plan.folds.iter().flatten().map(String::as_str).collect();
    if let Some(s) = segments
        .iter()
        .find(|s| !planned.contains(s.song_id.as_str()))
    {
        return Err(Error::Dataset(format!(
            "song `{}` is not in the fold plan",
            s.song_id
        )));
    }
    let started = Instant::now();
    let run = |fold: usize| -> Result<FoldReport> {
        let test_ids: HashSet<&str> = plan.folds[fold].iter().map(String::as_str).collect();
        let (test, train): (Vec<LabeledSegment>, Vec<LabeledSegment>) = segments
            .iter()
            .cloned()
            .partition(|s| test_ids.contains(s.song_id.as_str()));
        let cfg = TrainConfig {
            seed: config.seed.wrapping_add(fold as u64),
            ..config.clone()
        };
        info!(
            "fold {fold}: {} train / {} test segments",
            train.len(),
            test.len()
        );
        let outcome = train_fold(&train, &test, model_config, &cfg)?;
        on_fold(fold, &outcome)?;
        Ok(FoldReport {
            fold,
            n_train: train.len(),
            n_test: test.len(),
            metrics: outcome.metrics,
            wall_seconds: outcome.wall_seconds,
            epoch_losses: outcome.epoch_losses,
            predictions: outcome.predictions,
        })
    };
    let folds: Vec<FoldReport> = if config.parallel_folds {
        (0..plan.k())
            .into_par_iter()
            .map(run)
            .collect::<Result<_>>()?
    } else {
        (0..plan.k()).map(run).collect::<Result<_>>()?
    };
    Ok(CvReport::aggregate(
        model_config.task,
        folds,
        started.elapsed().as_secs_f64(),
    ))
}
