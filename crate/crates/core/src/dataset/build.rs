use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frontend::{frame_count, MelSpectrogram, HOP_SECONDS, SAMPLE_RATE};
use crate::tensor::Tensor;

use super::{
    cut_full, cut_simple, segment_stack, simple_rng, ChorusRecord, CutMode, DatasetSpec, Window,
};

/// Whole-chorus features, as stored in the feature cache.
#[derive(Clone, Debug)]
pub struct ChorusFeatures {
    pub mel: MelSpectrogram,
    pub duration_s: f64,
}

/// One stacked network input with its chorus's scaled labels.
#[derive(Clone, Debug)]
pub struct LabeledSegment {
    /// `(seg_num, T', 128)`.
    pub input: Tensor<f32>,
    pub valence: f64,
    pub arousal: f64,
    pub song_id: String,
}

/// Frame count of a window of `seconds` of audio.
pub fn window_frames(seconds: f64) -> usize {
    frame_count((seconds * SAMPLE_RATE as f64).round() as usize)
}

fn window_mel(features: &ChorusFeatures, w: &Window) -> MelSpectrogram {
    let start = (w.start_s / HOP_SECONDS).round() as usize;
    features.mel.window(start, window_frames(w.len_s))
}

/// Cuts every chorus per `spec` and stacks each window. Output order follows
/// `records`, then window order within a chorus.
pub fn build_segments(
    records: &[ChorusRecord],
    features: &[ChorusFeatures],
    spec: &DatasetSpec,
) -> Result<Vec<LabeledSegment>> {
    spec.validate()?;
    if records.len() != features.len() {
        return Err(Error::Dataset(format!(
            "{} records but {} feature sets",
            records.len(),
            features.len()
        )));
    }
    let per_chorus: Vec<Vec<LabeledSegment>> = records
        .par_iter()
        .zip(features.par_iter())
        .map(|(rec, feat)| {
            let windows = match spec.mode {
                CutMode::Simple => {
                    vec![cut_simple(
                        feat.duration_s,
                        spec.seg_len,
                        &mut simple_rng(spec.seed, &rec.song_id),
                    )]
                }
                CutMode::Full => cut_full(feat.duration_s, spec.seg_len),
            };
            windows
                .iter()
                .map(|w| {
                    Ok(LabeledSegment {
                        input: segment_stack(&window_mel(feat, w), spec.seg_num)?,
                        valence: rec.valence(),
                        arousal: rec.arousal(),
                        song_id: rec.song_id.clone(),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_chorus.into_iter().flatten().collect())
}
