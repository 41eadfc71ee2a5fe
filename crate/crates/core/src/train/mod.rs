//! Losses, metrics, optimiser, schedule and the fold / cross-validation loops.

mod cv;
mod fold;
mod loss;
mod metrics;
mod optim;
mod schedule;

pub use cv::{cross_validate, CvReport, FoldReport};
pub use fold::{predict, train_fold, FoldOutcome, Metrics, Prediction};
pub use loss::{ce_loss, ce_loss_with_grad, mse_loss, mse_loss_with_grad};
pub use metrics::{accuracy, format_mean_std, mean_std, r2_score, rmse};
pub use optim::Adam;
pub use schedule::lr_at_epoch;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub lr0: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub milestones: Vec<usize>,
    pub decay_factor: f64,
    pub seed: u64,
    pub folds: usize,
    /// Train cross-validation folds concurrently.
    pub parallel_folds: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr0: 1e-5,
            weight_decay: 1e-5,
            epochs: 200,
            batch_size: 32,
            milestones: vec![20, 45, 80, 110, 140, 170],
            decay_factor: 0.5,
            seed: 0,
            folds: 5,
            parallel_folds: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.lr0 > 0.0 && self.lr0.is_finite()) {
            return bad(format!("lr0 must be positive, got {}", self.lr0));
        }
        if !(self.weight_decay >= 0.0) {
            return bad(format!(
                "weight_decay must be non-negative, got {}",
                self.weight_decay
            ));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return bad("epochs and batch_size must be at least 1".into());
        }
        if !(self.decay_factor > 0.0 && self.decay_factor < 1.0) {
            return bad(format!(
                "decay_factor must lie in (0, 1), got {}",
                self.decay_factor
            ));
        }
        if self.milestones.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!(
                "milestones must be strictly increasing: {:?}",
                self.milestones
            ));
        }
        if self.milestones.last().is_some_and(|&m| m >= self.epochs) {
            return bad(format!(
                "milestones {:?} must be below epochs = {}",
                self.milestones, self.epochs
            ));
        }
        if self.folds < 2 {
            return bad(format!("folds must be at least 2, got {}", self.folds));
        }
        Ok(())
    }

    /// Milestones that fall before `epochs`, for shortened runs.
    pub fn with_epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self.milestones.retain(|&m| m < epochs);
        self
    }
}
