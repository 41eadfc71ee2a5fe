use std::collections::HashSet;
use std::time::Instant;

use log::{debug, info, warn};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{to_class_labels, ClassScheme, LabeledSegment};
use crate::error::{Error, Result};
use crate::model::{Adff, ModelConfig, Task};
use crate::nn::{HasParams, Mode};
use crate::tensor::Tensor;

use super::{
    accuracy, ce_loss_with_grad, lr_at_epoch, mse_loss_with_grad, r2_score, rmse, Adam, TrainConfig,
};

/// Test-set metrics on the `[-1, 1]` label scale. Only the fields relevant to
/// the task are set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rmse_v: Option<f64>,
    pub r2_v: Option<f64>,
    pub rmse_a: Option<f64>,
    pub r2_a: Option<f64>,
    pub acc_v: Option<f64>,
    pub acc_a: Option<f64>,
    pub acc_four: Option<f64>,
}

impl Metrics {
    pub const NAMES: [&'static str; 7] = [
        "rmse_v", "r2_v", "rmse_a", "r2_a", "acc_v", "acc_a", "acc_four",
    ];

    pub fn values(&self) -> [Option<f64>; 7] {
        [
            self.rmse_v,
            self.r2_v,
            self.rmse_a,
            self.r2_a,
            self.acc_v,
            self.acc_a,
            self.acc_four,
        ]
    }

    pub fn from_values(v: [Option<f64>; 7]) -> Self {
        Self {
            rmse_v: v[0],
            r2_v: v[1],
            rmse_a: v[2],
            r2_a: v[3],
            acc_v: v[4],
            acc_a: v[5],
            acc_four: v[6],
        }
    }

    /// Pools every prediction of a fold before computing each metric.
    pub fn compute(task: Task, preds: &[Prediction]) -> Result<Self> {
        let mut m = Metrics::default();
        if preds.is_empty() {
            return Ok(m);
        }
        let column = |f: fn(&Prediction) -> f64| preds.iter().map(f).collect::<Vec<_>>();
        let (tv, ta) = (column(|p| p.valence), column(|p| p.arousal));
        let classes = |scheme| {
            let pred: Vec<usize> = preds.iter().map(Prediction::argmax).collect();
            let target: Vec<usize> = preds
                .iter()
                .map(|p| to_class_labels(p.valence, p.arousal, scheme))
                .collect();
            accuracy(&pred, &target)
        };
        match task {
            Task::Valence | Task::Multi | Task::Arousal => {
                let out = |i: usize| preds.iter().map(|p| p.output[i]).collect::<Vec<_>>();
                let (pv, pa) = match task {
                    Task::Valence => (Some(out(0)), None),
                    Task::Arousal => (None, Some(out(0))),
                    _ => (Some(out(0)), Some(out(1))),
                };
                if let Some(pv) = pv {
                    m.rmse_v = Some(rmse(&pv, &tv)?);
                    m.r2_v = r2_if_defined(&pv, &tv, "valence")?;
                }
                if let Some(pa) = pa {
                    m.rmse_a = Some(rmse(&pa, &ta)?);
                    m.r2_a = r2_if_defined(&pa, &ta, "arousal")?;
                }
            }
            Task::TwoV => m.acc_v = Some(classes(ClassScheme::TwoV)?),
            Task::TwoA => m.acc_a = Some(classes(ClassScheme::TwoA)?),
            Task::Four => m.acc_four = Some(classes(ClassScheme::Four)?),
        }
        Ok(m)
    }
}

/// R² of a test fold, or `None` when the fold is a single segment or its
/// targets are constant.
fn r2_if_defined(pred: &[f64], target: &[f64], what: &str) -> Result<Option<f64>> {
    if pred.len() < 2 {
        warn!("{what} R² left empty: the test fold holds a single segment");
        return Ok(None);
    }
    match r2_score(pred, target) {
        Ok(r2) => Ok(Some(r2)),
        Err(Error::R2Undefined) => {
            warn!("{what} R² left empty: test targets are constant");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Network output for one test segment alongside its targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub song_id: String,
    pub valence: f64,
    pub arousal: f64,
    /// Regression values or class logits.
    pub output: Vec<f64>,
}

impl Prediction {
    fn argmax(&self) -> usize {
        self.output
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &x)| {
                if x > best.1 {
                    (i, x)
                } else {
                    best
                }
            })
            .0
    }
}

pub struct FoldOutcome {
    pub model: Adff<f32>,
    pub metrics: Metrics,
    pub predictions: Vec<Prediction>,
    /// Mean training batch loss per epoch.
    pub epoch_losses: Vec<f64>,
    pub wall_seconds: f64,
}

fn scheme(task: Task) -> Option<ClassScheme> {
    match task {
        Task::TwoV => Some(ClassScheme::TwoV),
        Task::TwoA => Some(ClassScheme::TwoA),
        Task::Four => Some(ClassScheme::Four),
        _ => None,
    }
}

fn stack_batch(segs: &[&LabeledSegment]) -> Result<Tensor<f32>> {
    let shape = segs[0].input.shape();
    let mut data = Vec::with_capacity(segs.len() * segs[0].input.len());
    for s in segs {
        if s.input.shape() != shape {
            return Err(Error::Shape(format!(
                "segment `{}` has shape {:?}, batch expects {shape:?}",
                s.song_id,
                s.input.shape()
            )));
        }
        data.extend_from_slice(s.input.data());
    }
    let mut full = vec![segs.len()];
    full.extend_from_slice(shape);
    Tensor::from_vec(&full, data)
}

fn batch_loss(
    task: Task,
    output: &Tensor<f32>,
    segs: &[&LabeledSegment],
) -> Result<(f64, Tensor<f32>)> {
    match (task, scheme(task)) {
        (_, Some(s)) => {
            let classes: Vec<usize> = segs
                .iter()
                .map(|x| to_class_labels(x.valence, x.arousal, s))
                .collect();
            ce_loss_with_grad(output, &classes)
        }
        (Task::Valence, None) => {
            let t = segs.iter().map(|x| x.valence as f32).collect();
            mse_loss_with_grad(output, &Tensor::from_vec(&[segs.len(), 1], t)?)
        }
        (Task::Arousal, None) => {
            let t = segs.iter().map(|x| x.arousal as f32).collect();
            mse_loss_with_grad(output, &Tensor::from_vec(&[segs.len(), 1], t)?)
        }
        (_, None) => {
            let t = segs
                .iter()
                .flat_map(|x| [x.valence as f32, x.arousal as f32])
                .collect();
            mse_loss_with_grad(output, &Tensor::from_vec(&[segs.len(), 2], t)?)
        }
    }
}

/// Eval-mode outputs for `segments`, computed `batch_size` at a time.
pub fn predict(
    model: &mut Adff<f32>,
    segments: &[LabeledSegment],
    batch_size: usize,
) -> Result<Vec<Prediction>> {
    let mut out = Vec::with_capacity(segments.len());
    let refs: Vec<&LabeledSegment> = segments.iter().collect();
    for chunk in refs.chunks(batch_size.max(1)) {
        let y = model.forward(&stack_batch(chunk)?, Mode::Eval)?;
        let arity = y.shape()[1];
        for (s, row) in chunk.iter().zip(y.data().chunks(arity)) {
            out.push(Prediction {
                song_id: s.song_id.clone(),
                valence: s.valence,
                arousal: s.arousal,
                output: row.iter().map(|&v| v as f64).collect(),
            });
        }
    }
    Ok(out)
}

/// Trains a fresh model on `train` and evaluates it on `test`.
pub fn train_fold(
    train: &[LabeledSegment],
    test: &[LabeledSegment],
    model_config: &ModelConfig,
    config: &TrainConfig,
) -> Result<FoldOutcome> {
    config.validate()?;
    model_config.validate()?;
    if train.is_empty() {
        return Err(Error::Dataset("empty training set".into()));
    }
    let train_songs: HashSet<&str> = train.iter().map(|s| s.song_id.as_str()).collect();
    if let Some(s) = test
        .iter()
        .find(|s| train_songs.contains(s.song_id.as_str()))
    {
        return Err(Error::Dataset(format!(
            "song `{}` is in both train and test sets",
            s.song_id
        )));
    }
    let started = Instant::now();
    let task = model_config.task;
    let mut model = Adff::<f32>::new(model_config.clone(), config.seed)?;
    let mut adam = Adam::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let lr = lr_at_epoch(epoch, config);
        order.shuffle(&mut rng);
        let (mut sum, mut batches) = (0.0, 0usize);
        for (b, idx) in order.chunks(config.batch_size).enumerate() {
            let segs: Vec<&LabeledSegment> = idx.iter().map(|&i| &train[i]).collect();
            let y = model.forward(&stack_batch(&segs)?, Mode::Train)?;
            let (loss, grad) = batch_loss(task, &y, &segs)?;
            if !loss.is_finite() {
                return Err(Error::Diverged {
                    epoch,
                    batch: b,
                    loss,
                });
            }
            model.zero_grad();
            model.backward(&grad);
            adam.step(&mut model, lr, config.weight_decay)?;
            sum += loss;
            batches += 1;
        }
        let mean = sum / batches as f64;
        debug!("epoch {epoch}: lr {lr:.3e} loss {mean:.6}");
        epoch_losses.push(mean);
    }
    let predictions = predict(&mut model, test, config.batch_size)?;
    let metrics = Metrics::compute(task, &predictions)?;
    let wall_seconds = started.elapsed().as_secs_f64();
    info!(
        "trained {} segments for {} epochs in {wall_seconds:.1}s, final loss {:.5}",
        train.len(),
        config.epochs,
        epoch_losses.last().copied().unwrap_or(f64::NAN)
    );
    Ok(FoldOutcome {
        model,
        metrics,
        predictions,
        epoch_losses,
        wall_seconds,
    })
}
