//! Corpus ingestion, window cutting, segment stacking and fold planning.

mod build;
mod cutting;
mod folds;
mod labels;
mod pmemo;
mod stack;
pub mod synth;

pub use build::{build_segments, window_frames, ChorusFeatures, LabeledSegment};
pub use cutting::{cut_full, cut_simple, simple_rng, Window};
pub use folds::{kfold_split, FoldPlan};
pub use labels::{to_class_labels, ClassScheme};
pub use pmemo::{load_pmemo, scale_annotation, ChorusRecord, CsvColumns, LoadReport};
pub use stack::{destack, segment_stack};
pub use synth::synth_generate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Segment lengths (seconds) explored in the experiments.
pub const SEG_LENS: [usize; 6] = [5, 10, 15, 20, 25, 30];
/// Channel counts explored in the stacking sweep.
pub const SEG_NUMS: [usize; 9] = [1, 2, 4, 6, 8, 10, 12, 14, 16];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutMode {
    /// One random window per chorus.
    Simple,
    /// Consecutive windows with the half-length tail rule.
    Full,
}

impl CutMode {
    pub fn name(self) -> &'static str {
        match self {
            CutMode::Simple => "simple",
            CutMode::Full => "full",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub mode: CutMode,
    /// Window length in seconds.
    pub seg_len: f64,
    pub seg_num: usize,
    pub seed: u64,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        Self {
            mode: CutMode::Simple,
            seg_len: 20.0,
            seg_num: 6,
            seed: 0,
        }
    }
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.seg_len > 0.0) {
            return Err(Error::Config(format!(
                "seg_len must be positive, got {}",
                self.seg_len
            )));
        }
        if self.seg_num == 0 {
            return Err(Error::Config("seg_num must be at least 1".into()));
        }
        Ok(())
    }
}
