use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

use super::{AudioClip, Matrix, HOP_SAMPLES, N_BINS, N_FFT, SAMPLE_RATE, WINDOW_SAMPLES};

/// Periodic Hann window.
pub fn hann_window(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

/// Frames produced for `n_samples` of centred input.
pub fn frame_count(n_samples: usize) -> usize {
    1 + n_samples / HOP_SAMPLES
}

fn plan() -> Arc<dyn Fft<f64>> {
    FftPlanner::new().plan_fft_forward(N_FFT)
}

/// One-sided power spectrum `|X_k|²` of a single Hann-windowed frame of
/// exactly `N_FFT` samples (no centring).
pub fn frame_power(frame: &[f64]) -> Vec<f64> {
    assert_eq!(frame.len(), N_FFT, "frame must hold {N_FFT} samples");
    let window = hann_window(WINDOW_SAMPLES);
    let fft = plan();
    let mut buf: Vec<Complex<f64>> = frame
        .iter()
        .zip(&window)
        .map(|(&x, &w)| Complex::new(x * w, 0.0))
        .collect();
    fft.process(&mut buf);
    buf[..N_BINS].iter().map(|c| c.norm_sqr()).collect()
}

/// Index into a signal of length `n` with numpy-style `reflect` padding
/// (edge sample not repeated).
fn reflect_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let mut j = i.rem_euclid(period);
    if j >= n as isize {
        j = period - j;
    }
    j as usize
}

/// Magnitude-squared STFT, `T × 1324` with `T = 1 + floor(n / 441)`.
pub fn stft_power(clip: &AudioClip) -> Result<Matrix> {
    if clip.sample_rate != SAMPLE_RATE {
        return Err(Error::InvalidInput(format!(
            "STFT expects {SAMPLE_RATE} Hz audio, got {} Hz",
            clip.sample_rate
        )));
    }
    let n = clip.samples.len();
    if n < HOP_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "clip of {n} samples is shorter than one hop ({HOP_SAMPLES})"
        )));
    }
    let frames = frame_count(n);
    let pad = (N_FFT / 2) as isize;
    let window = hann_window(WINDOW_SAMPLES);
    let fft = plan();
    let mut out = Matrix::zeros(frames, N_BINS);
    out.data.par_chunks_mut(N_BINS).enumerate().for_each_init(
        || {
            (
                vec![Complex::new(0.0, 0.0); N_FFT],
                vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()],
            )
        },
        |(buf, scratch), (t, row)| {
            let start = (t * HOP_SAMPLES) as isize - pad;
            for (k, slot) in buf.iter_mut().enumerate() {
                let x = clip.samples[reflect_index(start + k as isize, n)] as f64;
                *slot = Complex::new(x * window[k], 0.0);
            }
            fft.process_with_scratch(buf, scratch);
            for (dst, c) in row.iter_mut().zip(buf.iter()) {
                *dst = c.norm_sqr();
            }
        },
    );
    Ok(out)
}
