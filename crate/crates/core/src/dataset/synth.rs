//! Synthetic corpus whose labels are computed from the rendered signal:
//! arousal from RMS level, valence from spectral centroid.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::frontend::{write_wav, AudioClip, SAMPLE_RATE};

use super::ChorusRecord;

/// RMS level (dBFS) mapped to arousal 0 and 1.
pub const RMS_DB_RANGE: (f64, f64) = (-40.0, 0.0);
/// Spectral centroid (Hz) mapped to valence 0 and 1, on a log axis.
pub const CENTROID_HZ_RANGE: (f64, f64) = (100.0, 8000.0);

const NOISE_PARTIALS: usize = 24;

/// Generator settings of one clip.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthParams {
    /// Fundamental of the harmonic tone.
    pub f0: f64,
    /// Harmonic `k` has amplitude `k^-tilt`.
    pub tilt: f64,
    pub harmonics: usize,
    /// Centre and relative half-width of the noise band.
    pub noise_centre: f64,
    pub noise_width: f64,
    /// Share of noise power relative to tone power.
    pub noise_mix: f64,
    pub tremolo_hz: f64,
    pub rms_db: f64,
}

impl SynthParams {
    pub fn draw(rng: &mut impl Rng) -> Self {
        let f0 = rng.gen_range(150f64.ln()..3000f64.ln()).exp();
        Self {
            f0,
            tilt: rng.gen_range(0.5..2.0),
            harmonics: rng.gen_range(1..=4),
            noise_centre: f0 * rng.gen_range(1.0..2.5),
            noise_width: rng.gen_range(0.1..0.4),
            noise_mix: rng.gen_range(0.05..0.6),
            tremolo_hz: rng.gen_range(1.0..6.0),
            rms_db: rng.gen_range(-32.0..-8.0),
        }
    }
}

/// Renders `duration_s` seconds at `sample_rate`; `rng` supplies noise
/// partial frequencies and phases.
pub fn render(p: &SynthParams, duration_s: f64, sample_rate: u32, rng: &mut impl Rng) -> Vec<f32> {
    let n = (duration_s * sample_rate as f64).round() as usize;
    let nyquist = sample_rate as f64 / 2.0;
    let mut partials: Vec<(f64, f64, f64)> = (1..=p.harmonics)
        .map(|k| {
            (
                p.f0 * k as f64,
                (k as f64).powf(-p.tilt),
                rng.gen_range(0.0..TAU),
            )
        })
        .filter(|&(f, _, _)| f < nyquist)
        .collect();
    let tone_power: f64 = partials.iter().map(|&(_, a, _)| a * a / 2.0).sum();
    let noise_amp = (2.0 * p.noise_mix * tone_power / NOISE_PARTIALS as f64).sqrt();
    for _ in 0..NOISE_PARTIALS {
        let f = p.noise_centre * rng.gen_range(1.0 - p.noise_width..1.0 + p.noise_width);
        if f < nyquist {
            partials.push((f, noise_amp, rng.gen_range(0.0..TAU)));
        }
    }
    let dt = 1.0 / sample_rate as f64;
    let mut x: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 * dt;
            let env = 1.0 + 0.3 * (TAU * p.tremolo_hz * t).sin();
            env * partials
                .iter()
                .map(|&(f, a, ph)| a * (TAU * f * t + ph).sin())
                .sum::<f64>()
        })
        .collect();
    let rms = (x.iter().map(|v| v * v).sum::<f64>() / n.max(1) as f64).sqrt();
    if rms > 0.0 {
        let gain = 10f64.powf(p.rms_db / 20.0) / rms;
        x.iter_mut().for_each(|v| *v *= gain);
    }
    x.into_iter().map(|v| v as f32).collect()
}

fn unit_clamp(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// RMS level in dBFS, normalised to `[0, 1]`.
pub fn arousal_from_signal(samples: &[f32]) -> f64 {
    let ms = samples.iter().map(|&v| (v as f64).powi(2)).sum::<f64>() / samples.len().max(1) as f64;
    let db = 10.0 * ms.max(1e-20).log10();
    let (lo, hi) = RMS_DB_RANGE;
    unit_clamp((db - lo) / (hi - lo))
}

/// Power-weighted spectral centroid of the whole clip in Hz.
pub fn spectral_centroid(samples: &[f32], sample_rate: u32) -> f64 {
    let n = samples.len();
    if n == 0 {
        return 0.0;
    }
    let mut buf: Vec<Complex<f64>> = samples
        .iter()
        .map(|&v| Complex::new(v as f64, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let bin_hz = sample_rate as f64 / n as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for (k, c) in buf.iter().take(n / 2 + 1).enumerate() {
        let p = c.norm_sqr();
        num += k as f64 * bin_hz * p;
        den += p;
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Log spectral centroid, normalised to `[0, 1]`.
pub fn valence_from_signal(samples: &[f32], sample_rate: u32) -> f64 {
    let c = spectral_centroid(samples, sample_rate).max(1.0);
    let (lo, hi) = CENTROID_HZ_RANGE;
    unit_clamp((c.ln() - lo.ln()) / (hi.ln() - lo.ln()))
}

/// Writes `n` clips of `duration_s` seconds under `root` in the annotated
/// corpus layout and returns their records. Output is a pure function of
/// `(n, seed, duration_s)`.
pub fn synth_generate(
    root: &Path,
    n: usize,
    seed: u64,
    duration_s: f64,
) -> Result<Vec<ChorusRecord>> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "synthetic corpus needs at least one clip".into(),
        ));
    }
    if !(duration_s > 0.0) {
        return Err(Error::InvalidInput(format!(
            "clip duration must be positive, got {duration_s}"
        )));
    }
    let audio_dir = root.join("audio");
    fs::create_dir_all(&audio_dir).map_err(|e| Error::io(&audio_dir, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = n.to_string().len().max(4);
    let mut records = Vec::with_capacity(n);
    for i in 0..n {
        let song_id = format!("{:0width$}", i + 1);
        let params = SynthParams::draw(&mut rng);
        let samples = render(&params, duration_s, SAMPLE_RATE, &mut rng);
        let record = ChorusRecord {
            valence_raw: valence_from_signal(&samples, SAMPLE_RATE),
            arousal_raw: arousal_from_signal(&samples),
            audio_path: audio_dir.join(format!("{song_id}.wav")),
            song_id,
        };
        write_wav(&record.audio_path, &AudioClip::new(samples, SAMPLE_RATE)?)?;
        records.push(record);
    }
    let csv_path = root.join("annotations.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(["musicId", "Arousal(mean)", "Valence(mean)"])?;
    for r in &records {
        w.write_record([
            r.song_id.clone(),
            format!("{:.6}", r.arousal_raw),
            format!("{:.6}", r.valence_raw),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&csv_path, e))?;
    Ok(records)
}
