use std::f64::consts::PI;

use rayon::prelude::*;

use super::AudioClip;

/// Zero crossings of the sinc kernel on each side.
const KERNEL_HALF_WIDTH: f64 = 32.0;

/// Band-limited resampling with a Hann-windowed sinc kernel.
///
/// Output length is `round(n * target / source)`, so duration is preserved
/// to within one output sample.
pub fn resample(clip: &AudioClip, target_rate: u32) -> AudioClip {
    if clip.sample_rate == target_rate || clip.samples.is_empty() {
        return AudioClip {
            samples: clip.samples.clone(),
            sample_rate: target_rate,
        };
    }
    let ratio = target_rate as f64 / clip.sample_rate as f64;
    let n_out = (clip.samples.len() as f64 * ratio).round() as usize;
    // Low-pass at the lower of the two Nyquist rates, with a little guard band.
    let cutoff = ratio.min(1.0) * 0.97;
    let half = KERNEL_HALF_WIDTH / cutoff;
    let input = &clip.samples;
    let samples = (0..n_out)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 / ratio;
            let lo = (t - half).ceil().max(0.0) as usize;
            let hi = ((t + half).floor() as usize).min(input.len() - 1);
            let mut acc = 0.0;
            for (j, &x) in input.iter().enumerate().take(hi + 1).skip(lo) {
                let u = t - j as f64;
                acc += x as f64 * kernel(u, cutoff, half);
            }
            acc as f32
        })
        .collect();
    AudioClip {
        samples,
        sample_rate: target_rate,
    }
}

fn kernel(u: f64, cutoff: f64, half: f64) -> f64 {
    if u.abs() >= half {
        return 0.0;
    }
    let x = cutoff * u;
    let sinc = if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    };
    let window = 0.5 + 0.5 * (PI * u / half).cos();
    cutoff * sinc * window
}
