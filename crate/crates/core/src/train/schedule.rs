use super::TrainConfig;

/// `lr0 · decay_factor^k` where `k` counts milestones `≤ epoch`.
pub fn lr_at_epoch(epoch: usize, config: &TrainConfig) -> f64 {
    let passed = config.milestones.iter().filter(|&&m| m <= epoch).count();
    config.lr0 * config.decay_factor.powi(passed as i32)
}
