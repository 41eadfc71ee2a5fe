//! Acceptance suite. Runs every criterion in order, prints one PASS/FAIL
//! line each and exits non-zero if any failed. Pass a substring to run a
//! subset, e.g. `cargo test --test acceptance -- overfit`.

mod common;

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use adff::dataset::{
    build_segments, cut_full, kfold_split, segment_stack, synth_generate, window_frames,
    ChorusFeatures, ChorusRecord, CutMode, DatasetSpec, LabeledSegment,
};
use adff::experiment::{cmd_ablate, cmd_cv, cmd_extract, RunConfig};
use adff::frontend::{
    extract, filterbank, frame_power, hann_window, load_audio, mel_project, stft_power, AudioClip,
    Matrix, N_BINS, N_FFT, N_MELS, SAMPLE_RATE,
};
use adff::model::{checkpoint, level_shapes, Adff, ModelConfig, Task};
use adff::nn::se::{se_excite, se_scale, se_squeeze};
use adff::nn::{HasParams, Linear, Mode};
use adff::train::{
    accuracy, cross_validate, lr_at_epoch, r2_score, rmse, train_fold, Adam, TrainConfig,
};
use adff::{Error, Tensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn within(elapsed: Duration, limit_s: f64, what: &str) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!(
            "{what} took {:.1}s, limit {limit_s}s",
            elapsed.as_secs_f64()
        )
    })
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn gradient_suite() -> Outcome {
    let start = Instant::now();
    let mut worst = (0.0, "");
    for (name, report) in common::gradient_suite() {
        ensure(report.checked > 0, || format!("{name}: nothing checked"))?;
        ensure(report.worst_rel < common::GRAD_TOLERANCE, || {
            format!(
                "{name}: relative error {:.3e} at {} (analytic {:.6e}, numeric {:.6e})",
                report.worst_rel, report.worst_name, report.worst_analytic, report.worst_numeric
            )
        })?;
        if report.worst_rel > worst.0 {
            worst = (report.worst_rel, name);
        }
    }
    within(start.elapsed(), 120.0, "gradient suite")?;
    Ok(format!(
        "worst relative error {:.2e} ({}), {:.1}s",
        worst.0,
        worst.1,
        start.elapsed().as_secs_f64()
    ))
}

fn se_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (c, h, w) = (8, 5, 6);
    let feature: Vec<f64> = (0..c * h * w).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let z = se_squeeze(&feature, c, h, w);
    for ch in 0..c {
        let mut sum = 0.0;
        for i in 0..h * w {
            sum += feature[ch * h * w + i];
        }
        let brute = sum / (h * w) as f64;
        ensure((z[ch] - brute).abs() <= 1e-6, || {
            format!("squeeze channel {ch}: {} vs {brute}", z[ch])
        })?;
    }
    let scaled = se_scale(&feature, &vec![1.0; c], h, w).map_err(err)?;
    ensure(
        scaled
            .iter()
            .zip(&feature)
            .all(|(a, b)| a.to_bits() == b.to_bits()),
        || "scaling by ones changed the input".into(),
    )?;
    let b = 4;
    let a = se_excite(&z, &vec![0.0; b * c], &vec![0.0; c * b], b);
    ensure(a.iter().all(|&v| v == 0.5), || {
        format!("zero-weight excitation gave {a:?}")
    })?;
    Ok("squeeze, identity scale and zero-weight excitation exact".into())
}

fn shape_suite() -> Outcome {
    let tasks = [
        (Task::Valence, 1),
        (Task::Multi, 2),
        (Task::TwoV, 2),
        (Task::Four, 4),
    ];
    let mut checked = 0;
    for seg_len in [5.0, 20.0] {
        let n = (seg_len * SAMPLE_RATE as f64) as usize;
        let samples: Vec<f32> = (0..n).map(|i| (i as f32 * 0.01).sin() * 0.1).collect();
        let mel = extract(&AudioClip::new(samples, SAMPLE_RATE).map_err(err)?).map_err(err)?;
        let expected_t = 1 + (seg_len * 44100.0 / 441.0).floor() as usize;
        ensure(mel.frames == expected_t, || {
            format!("{seg_len}s gave {} frames, want {expected_t}", mel.frames)
        })?;
        ensure(window_frames(seg_len) == expected_t, || {
            "window_frames disagrees with extraction".into()
        })?;
        for seg_num in [1, 2, 4, 6] {
            let stacked = segment_stack(&mel, seg_num).map_err(err)?;
            let t_prime = expected_t / seg_num;
            ensure(stacked.shape() == [seg_num, t_prime, N_MELS], || {
                format!(
                    "stack({seg_len}, {seg_num}) has shape {:?}",
                    stacked.shape()
                )
            })?;
            for (i, &(task, arity)) in tasks.iter().enumerate() {
                let config = ModelConfig {
                    seg_num,
                    width: 1.0 / 64.0,
                    se_reduction: 2,
                    lstm_hidden: 3,
                    head_dims: vec![6, 5],
                    task,
                    ..ModelConfig::default()
                };
                let mut model = Adff::<f32>::new(config.clone(), i as u64).map_err(err)?;
                let mut shape = vec![1];
                shape.extend_from_slice(stacked.shape());
                let input = stacked.clone().reshape(&shape).map_err(err)?;
                let trace = model.forward_trace(&input, Mode::Eval).map_err(err)?;
                let want = level_shapes(&config.level_channels(), t_prime, N_MELS);
                for (level, (s, &(c, h, w))) in trace.spatial.iter().zip(&want).enumerate() {
                    ensure(s.shape() == [1, c, h, w], || {
                        format!(
                            "level {} of ({seg_len}, {seg_num}) is {:?}, want {:?}",
                            level + 1,
                            s.shape(),
                            (c, h, w)
                        )
                    })?;
                }
                ensure(
                    trace.fused.shape() == [1, 5 * 2 * config.lstm_hidden],
                    || format!("fused vector has shape {:?}", trace.fused.shape()),
                )?;
                ensure(trace.output.shape() == [1, arity], || {
                    format!("{} head has shape {:?}", task.name(), trace.output.shape())
                })?;
                checked += 1;
            }
        }
    }
    let full = ModelConfig::default().level_channels();
    let last = *level_shapes(&full, 333, 128).last().unwrap();
    ensure(last == (512, 10, 4), || {
        format!("(6,333,128) reaches {last:?} at level 5")
    })?;
    Ok(format!("{checked} (seg_len, seg_num, task) forward passes"))
}

fn cutting_oracle() -> Outcome {
    let cases: [(f64, &[(f64, f64)]); 5] = [
        (15.0, &[(0.0, 20.0)]),
        (40.0, &[(0.0, 20.0), (20.0, 40.0)]),
        (47.0, &[(0.0, 20.0), (20.0, 40.0)]),
        (50.0, &[(0.0, 20.0), (20.0, 40.0), (30.0, 50.0)]),
        (52.0, &[(0.0, 20.0), (20.0, 40.0), (32.0, 52.0)]),
    ];
    for (duration, want) in cases {
        let got = cut_full(duration, 20.0);
        let bounds: Vec<(f64, f64)> = got.iter().map(|w| (w.start_s, w.end_s())).collect();
        ensure(bounds.len() == want.len(), || {
            format!("{duration}s: {bounds:?}")
        })?;
        for (g, w) in bounds.iter().zip(want) {
            ensure((g.0 - w.0).abs() < 1e-9 && (g.1 - w.1).abs() < 1e-9, || {
                format!("{duration}s: {bounds:?}")
            })?;
        }
        let padded = got.iter().any(|w| w.padded());
        ensure(padded == (duration < 20.0), || {
            format!("{duration}s: padding flag {padded}")
        })?;
        if duration < 20.0 {
            ensure((got[0].audio_s - duration).abs() < 1e-9, || {
                "short chorus audio span".into()
            })?;
        }
    }
    Ok("15/40/47/50/52 s give 1/2/2/3/3 windows".into())
}

fn metric_oracles() -> Outcome {
    let t = [0.3, -0.2, 0.9, -0.7];
    ensure(r2_score(&t, &t).map_err(err)? == 1.0, || {
        "perfect fit".into()
    })?;
    let mean = t.iter().sum::<f64>() / 4.0;
    let r2_mean = r2_score(&[mean; 4], &t).map_err(err)?;
    ensure(r2_mean.abs() < 1e-12, || {
        format!("mean predictor gave {r2_mean}")
    })?;
    let r2 = r2_score(&[0.5, -0.5], &[1.0, -1.0]).map_err(err)?;
    ensure((r2 - 0.75).abs() < 1e-12, || {
        format!("two-point case gave {r2}")
    })?;
    ensure(
        matches!(r2_score(&[0.1, 0.2], &[0.4, 0.4]), Err(Error::R2Undefined)),
        || "constant target did not fail".into(),
    )?;
    ensure(rmse(&t, &t).map_err(err)? == 0.0, || {
        "rmse of a perfect fit".into()
    })?;
    let r = rmse(&[0.0, 0.0], &[-1.0, 1.0]).map_err(err)?;
    ensure((r - 1.0).abs() < 1e-12, || {
        format!("rmse hand case gave {r}")
    })?;
    let scaled = rmse(&[0.0, 0.0], &[-3.0, 3.0]).map_err(err)?;
    ensure((scaled - 3.0 * r).abs() < 1e-12, || {
        "rmse homogeneity".into()
    })?;
    ensure(
        accuracy(&[1, 2, 3], &[1, 2, 3]).map_err(err)? == 1.0,
        || "identical classes".into(),
    )?;
    ensure(accuracy(&[0, 0], &[1, 1]).map_err(err)? == 0.0, || {
        "all wrong".into()
    })?;
    ensure(
        accuracy(&[0, 1, 2, 3], &[0, 1, 2, 0]).map_err(err)? == 0.75,
        || "3 of 4".into(),
    )?;
    Ok("R², RMSE and accuracy hand cases".into())
}

fn single_param(value: Vec<f64>) -> Linear<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut layer = Linear::new("p", value.len(), 1, &mut rng);
    let mut first = true;
    layer.visit_mut(&mut |p| {
        if first {
            p.value.copy_from_slice(&value);
            first = false;
        } else {
            p.value.iter_mut().for_each(|v| *v = 0.0);
        }
    });
    layer
}

fn weights(layer: &Linear<f64>) -> Vec<f64> {
    let mut out = Vec::new();
    layer.visit(&mut |p| out.extend_from_slice(&p.value));
    out
}

fn schedule_and_optimizer() -> Outcome {
    let cfg = TrainConfig::default();
    let lr0 = lr_at_epoch(0, &cfg);
    let lr20 = lr_at_epoch(20, &cfg);
    let lr199 = lr_at_epoch(199, &cfg);
    ensure(
        lr0 == 1e-5 && lr20 == 5e-6 && (lr199 - 1.5625e-7).abs() < 1e-18,
        || format!("lr at 0/20/199 = {lr0}/{lr20}/{lr199}"),
    )?;

    let mut layer = single_param(vec![0.4, -1.3]);
    let before = weights(&layer);
    let mut adam = Adam::new();
    for _ in 0..5 {
        layer.zero_grad();
        adam.step(&mut layer, 1e-2, 0.0).map_err(err)?;
    }
    ensure(weights(&layer) == before, || {
        "zero gradient moved parameters".into()
    })?;

    let mut layer = single_param(vec![0.4, -1.3]);
    let mut adam = Adam::new();
    for _ in 0..20 {
        layer.zero_grad();
        adam.step(&mut layer, 1e-3, 1e-2).map_err(err)?;
    }
    let after = weights(&layer);
    ensure(
        after[0] < 0.4 && after[0] > 0.0 && after[1] > -1.3 && after[1] < 0.0,
        || format!("weight decay moved {before:?} to {after:?}"),
    )?;

    let mut layer = single_param(vec![0.0]);
    let mut adam = Adam::new();
    let lr = 1e-3;
    let mut last = 0.0;
    let mut update = 0.0;
    for _ in 0..3000 {
        layer.zero_grad();
        layer.visit_mut(&mut |p| p.grad.iter_mut().for_each(|g| *g = 0.25));
        adam.step(&mut layer, lr, 0.0).map_err(err)?;
        let now = weights(&layer)[0];
        update = now - last;
        last = now;
    }
    ensure((update + lr).abs() < 1e-3 * lr, || {
        format!("saturated update {update}, want {}", -lr)
    })?;
    Ok("milestone values, fixed point, decay direction, saturated step".into())
}

fn synth_features(
    root: &Path,
    n: usize,
    seed: u64,
) -> Result<(Vec<ChorusRecord>, Vec<ChorusFeatures>), String> {
    let records = synth_generate(root, n, seed, 5.0).map_err(err)?;
    let features = records
        .iter()
        .map(|r| {
            let clip = load_audio(&r.audio_path).map_err(err)?;
            Ok(ChorusFeatures {
                mel: extract(&clip).map_err(err)?,
                duration_s: clip.duration_seconds(),
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok((records, features))
}

fn desk_segments(n: usize) -> Result<Vec<LabeledSegment>, String> {
    let dir = tempfile::tempdir().map_err(err)?;
    let (records, features) = synth_features(dir.path(), n, DESK_SEED)?;
    let spec = DatasetSpec {
        mode: CutMode::Simple,
        seg_len: 5.0,
        seg_num: 6,
        seed: 0,
    };
    build_segments(&records, &features, &spec).map_err(err)
}

const DESK_SEED: u64 = 1;

fn desk_model() -> ModelConfig {
    ModelConfig {
        width: 0.25,
        lstm_hidden: 32,
        task: Task::Multi,
        ..ModelConfig::default()
    }
}

fn desk_train() -> TrainConfig {
    TrainConfig {
        lr0: 1e-3,
        weight_decay: 0.0,
        epochs: 30,
        batch_size: 8,
        milestones: vec![20, 26],
        seed: DESK_SEED,
        ..TrainConfig::default()
    }
}

/// Means over consecutive non-overlapping windows of `w` epochs.
fn smoothed(losses: &[f64], w: usize) -> Vec<f64> {
    losses
        .chunks_exact(w)
        .map(|c| c.iter().sum::<f64>() / w as f64)
        .collect()
}

fn overfit() -> Outcome {
    let start = Instant::now();
    let segments = desk_segments(16)?;
    ensure(segments.len() == 16, || {
        format!("{} segments", segments.len())
    })?;
    let outcome = train_fold(&segments, &[], &desk_model(), &desk_train()).map_err(err)?;
    let final_mse = *outcome.epoch_losses.last().unwrap();
    let windows = smoothed(&outcome.epoch_losses, 5);
    ensure(final_mse < 0.01, || {
        format!("final training MSE {final_mse:.5}")
    })?;
    ensure(windows.windows(2).all(|p| p[1] < p[0]), || {
        format!("smoothed losses {windows:.4?}")
    })?;
    within(start.elapsed(), 600.0, "overfit run")?;
    Ok(format!(
        "final MSE {final_mse:.4}, 5-epoch means {windows:.4?}, {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn generalization() -> Outcome {
    let start = Instant::now();
    let segments = desk_segments(60)?;
    let ids: Vec<String> = segments.iter().map(|s| s.song_id.clone()).collect();
    let plan = kfold_split(&ids, 5, 0).map_err(err)?;
    let report = cross_validate(
        &segments,
        &plan,
        &desk_model(),
        &desk_train(),
        |_, _| Ok(()),
    )
    .map_err(err)?;
    let r2_v = report.mean.r2_v.ok_or("no valence R²")?;
    let r2_a = report.mean.r2_a.ok_or("no arousal R²")?;
    ensure(r2_v > 0.5 && r2_a > 0.5, || {
        format!("mean test R² valence {r2_v:.4}, arousal {r2_a:.4}")
    })?;
    within(start.elapsed(), 45.0 * 60.0, "generalization run")?;
    Ok(format!(
        "mean test R² valence {r2_v:.4}, arousal {r2_a:.4}, {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn frontend_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let samples: Vec<f32> = (0..SAMPLE_RATE as usize / 4)
        .map(|_| rng.gen_range(-0.5f32..0.5))
        .collect();
    let clip = AudioClip::new(samples.clone(), SAMPLE_RATE).map_err(err)?;
    let power = stft_power(&clip).map_err(err)?;
    // Frame 3 is centred on sample 1323, so it covers samples [0, 2646) with no padding.
    let window = hann_window(N_FFT);
    let frame: Vec<f64> = samples[..N_FFT].iter().map(|&x| x as f64).collect();
    let row = power.row(3);
    let single = frame_power(&frame);
    let mut worst: f64 = 0.0;
    for k in 0..N_BINS {
        let (mut re, mut im) = (0.0, 0.0);
        for (n, (&x, &w)) in frame.iter().zip(&window).enumerate() {
            let phase = -2.0 * std::f64::consts::PI * ((k * n) % N_FFT) as f64 / N_FFT as f64;
            re += x * w * phase.cos();
            im += x * w * phase.sin();
        }
        let brute = re * re + im * im;
        for got in [row[k], single[k]] {
            worst = worst.max((got - brute).abs() / brute.abs().max(1e-300));
        }
    }
    ensure(worst <= 1e-6, || {
        format!("STFT frame relative error {worst:.3e}")
    })?;

    let fb = filterbank();
    let mel = mel_project(&power, fb).map_err(err)?;
    let mut dense = Matrix::zeros(power.rows, N_MELS);
    for t in 0..power.rows {
        for m in 0..N_MELS {
            let mut acc = 0.0;
            for k in 0..N_BINS {
                acc += power.row(t)[k] * fb.weight(m, k);
            }
            dense.data[t * N_MELS + m] = acc;
        }
    }
    ensure(mel == dense, || {
        "Mel projection differs from the dense product".into()
    })?;
    Ok(format!(
        "worst bin relative error {worst:.2e}; Mel projection bit-identical"
    ))
}

fn tiny_run_config(root: &Path, out: &Path) -> RunConfig {
    let mut config = RunConfig::default();
    config.seed = 11;
    config.data.root = Some(root.to_path_buf());
    config.data.seg_len = 5.0;
    config.data.seg_num = 2;
    config.model.width = 1.0 / 32.0;
    config.model.lstm_hidden = 4;
    config.model.head_dims = vec![8];
    config.model.task = Task::Multi;
    config.train.lr0 = 1e-3;
    config.train.epochs = 2;
    config.train.batch_size = 4;
    config.train.milestones = vec![1];
    config.output.out_dir = out.to_path_buf();
    config.output.timing = false;
    config
}

fn determinism() -> Outcome {
    let corpus = tempfile::tempdir().map_err(err)?;
    synth_generate(corpus.path(), 10, 5, 5.0).map_err(err)?;
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let out = tempfile::tempdir().map_err(err)?;
        let config = tiny_run_config(corpus.path(), out.path());
        cmd_extract(&config).map_err(err)?;
        let cv = cmd_cv(&config).map_err(err)?;
        let ablation = cmd_ablate(&config).map_err(err)?;
        let read = |p: &Path| std::fs::read(p).map_err(err);
        outputs.push((
            read(&cv.dir.join("results.csv"))?,
            read(&cv.dir.join("results.json"))?,
            read(&ablation.dir.join("ablation.csv"))?,
            read(&cv.dir.join("fold0.ckpt"))?,
        ));
        let ckpt = cv.dir.join("fold0.ckpt");
        let mut model = checkpoint::load(&ckpt).map_err(err)?;
        ensure(
            checkpoint::to_bytes(&model).map_err(err)? == read(&ckpt)?,
            || "checkpoint bytes changed on reload".into(),
        )?;
        let copy =
            checkpoint::from_bytes(&checkpoint::to_bytes(&model).map_err(err)?).map_err(err)?;
        let bits = |m: &Adff<f32>| {
            m.named_tensors()
                .into_iter()
                .flat_map(|(_, _, v)| v.into_iter().map(f32::to_bits))
                .collect::<Vec<_>>()
        };
        ensure(bits(&model) == bits(&copy), || {
            "parameters changed across round trip".into()
        })?;
        let x =
            Tensor::from_vec(&[1, 2, 250, N_MELS], vec![0.25f32; 2 * 250 * N_MELS]).map_err(err)?;
        let mut copy = copy;
        let (a, b) = (
            model.forward(&x, Mode::Eval).map_err(err)?,
            copy.forward(&x, Mode::Eval).map_err(err)?,
        );
        ensure(a.data() == b.data(), || {
            "reloaded model predicts differently".into()
        })?;
    }
    let (a, b) = (&outputs[0], &outputs[1]);
    ensure(a.0 == b.0, || "results.csv differs between runs".into())?;
    ensure(a.1 == b.1, || "results.json differs between runs".into())?;
    ensure(a.2 == b.2, || "ablation.csv differs between runs".into())?;
    ensure(a.3 == b.3, || "checkpoints differ between runs".into())?;
    Ok("cv and ablate reruns byte-identical; checkpoints round-trip bit-exactly".into())
}

/// Runs only when `ADFF_PMEMO_ROOT` points at a PMEmo copy with WAV audio.
/// `ADFF_PMEMO_EPOCHS` (default 1) and `ADFF_PMEMO_WIDTH` (default 0.25)
/// keep the run affordable.
fn pmemo_integration() -> Option<Outcome> {
    let root = std::env::var_os("ADFF_PMEMO_ROOT")?;
    let env_or =
        |key: &str, default: &str| std::env::var(key).unwrap_or_else(|_| default.to_string());
    let run = || -> Outcome {
        let out = tempfile::tempdir().map_err(err)?;
        let mut rows = Vec::new();
        for task in [Task::Valence, Task::Arousal] {
            let mut config = RunConfig::default();
            config.data.root = Some(root.clone().into());
            config.data.mode = CutMode::Simple;
            config.data.seg_len = 20.0;
            config.data.seg_num = 6;
            config.model.task = task;
            config.model.width = env_or("ADFF_PMEMO_WIDTH", "0.25").parse().map_err(err)?;
            config.train.epochs = env_or("ADFF_PMEMO_EPOCHS", "1").parse().map_err(err)?;
            config.train.milestones.retain(|&m| m < config.train.epochs);
            config.output.out_dir = out.path().to_path_buf();
            let cv = cmd_cv(&config).map_err(err)?;
            ensure(cv.rows.len() == 7, || {
                format!("{}: {} rows", task.name(), cv.rows.len())
            })?;
            rows.push(cv.rows.len());
        }
        Ok(format!("7 rows each for valence and arousal ({rows:?})"))
    };
    Some(run())
}

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("gradient suite", gradient_suite),
        ("SE algebra", se_algebra),
        ("shape suite", shape_suite),
        ("cutting-rule oracle", cutting_oracle),
        ("metric oracles", metric_oracles),
        ("schedule/optimizer", schedule_and_optimizer),
        ("overfit check", overfit),
        ("generalization sanity", generalization),
        ("frontend oracle", frontend_oracle),
        ("determinism", determinism),
    ];
    let selected =
        |name: &str| filter.is_empty() || filter.iter().any(|f| name.contains(f.as_str()));
    let mut failed = 0;
    for (name, run) in criteria {
        if !selected(name) {
            continue;
        }
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if selected("optional integration") {
        match pmemo_integration() {
            None => println!("SKIP optional integration: ADFF_PMEMO_ROOT not set"),
            Some(Ok(detail)) => println!("PASS optional integration: {detail}"),
            Some(Err(detail)) => {
                failed += 1;
                println!("FAIL optional integration: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
