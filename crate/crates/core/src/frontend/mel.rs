use crate::error::{Error, Result};

use super::{Matrix, LOG_EPSILON};

const F_SP: f64 = 200.0 / 3.0;
const MIN_LOG_HZ: f64 = 1000.0;
const MIN_LOG_MEL: f64 = MIN_LOG_HZ / F_SP;

fn log_step() -> f64 {
    6.4f64.ln() / 27.0
}

/// Slaney Mel scale: linear below 1 kHz, logarithmic above.
pub fn hz_to_mel(hz: f64) -> f64 {
    if hz >= MIN_LOG_HZ {
        MIN_LOG_MEL + (hz / MIN_LOG_HZ).ln() / log_step()
    } else {
        hz / F_SP
    }
}

pub fn mel_to_hz(mel: f64) -> f64 {
    if mel >= MIN_LOG_MEL {
        MIN_LOG_HZ * (log_step() * (mel - MIN_LOG_MEL)).exp()
    } else {
        F_SP * mel
    }
}

/// Triangular, area-normalised Mel filterbank stored as `n_mels × n_bins`.
#[derive(Clone, Debug)]
pub struct MelFilterbank {
    pub n_mels: usize,
    pub n_bins: usize,
    weights: Vec<f64>,
    /// Non-zero bin range `[lo, hi)` of each filter.
    support: Vec<(usize, usize)>,
}

impl MelFilterbank {
    pub fn slaney(sample_rate: f64, n_fft: usize, n_mels: usize, fmin: f64, fmax: f64) -> Self {
        let n_bins = n_fft / 2 + 1;
        let fft_freqs: Vec<f64> = (0..n_bins)
            .map(|k| k as f64 * sample_rate / n_fft as f64)
            .collect();
        let (mel_lo, mel_hi) = (hz_to_mel(fmin), hz_to_mel(fmax));
        let edges: Vec<f64> = (0..n_mels + 2)
            .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (n_mels + 1) as f64))
            .collect();
        let mut weights = vec![0.0; n_mels * n_bins];
        let mut support = Vec::with_capacity(n_mels);
        for m in 0..n_mels {
            let (left, centre, right) = (edges[m], edges[m + 1], edges[m + 2]);
            let enorm = 2.0 / (right - left);
            let row = &mut weights[m * n_bins..(m + 1) * n_bins];
            let (mut lo, mut hi) = (n_bins, 0);
            for (k, &f) in fft_freqs.iter().enumerate() {
                let lower = (f - left) / (centre - left);
                let upper = (right - f) / (right - centre);
                let w = lower.min(upper).max(0.0);
                if w > 0.0 {
                    row[k] = w * enorm;
                    lo = lo.min(k);
                    hi = hi.max(k + 1);
                }
            }
            if lo > hi {
                lo = hi;
            }
            support.push((lo, hi));
        }
        Self {
            n_mels,
            n_bins,
            weights,
            support,
        }
    }

    /// Weight of FFT bin `bin` in filter `mel`.
    pub fn weight(&self, mel: usize, bin: usize) -> f64 {
        self.weights[mel * self.n_bins + bin]
    }

    pub fn filter(&self, mel: usize) -> &[f64] {
        &self.weights[mel * self.n_bins..(mel + 1) * self.n_bins]
    }
}

/// `power × M`: projects `T × n_bins` power onto the Mel bands.
pub fn mel_project(power: &Matrix, fb: &MelFilterbank) -> Result<Matrix> {
    if power.cols != fb.n_bins {
        return Err(Error::Shape(format!(
            "power spectrum has {} bins, filterbank expects {}",
            power.cols, fb.n_bins
        )));
    }
    let mut out = Matrix::zeros(power.rows, fb.n_mels);
    for t in 0..power.rows {
        let row = power.row(t);
        for m in 0..fb.n_mels {
            let (lo, hi) = fb.support[m];
            let filt = fb.filter(m);
            let mut acc = 0.0;
            for k in lo..hi {
                acc += row[k] * filt[k];
            }
            out.data[t * fb.n_mels + m] = acc;
        }
    }
    Ok(out)
}

/// Elementwise `ln(x + 1e-6)`.
pub fn log_compress(mel: &Matrix) -> Result<Matrix> {
    if let Some(bad) = mel.data.iter().find(|&&x| !(x >= 0.0)) {
        return Err(Error::InvalidInput(format!(
            "log compression needs non-negative input, got {bad}"
        )));
    }
    Ok(Matrix {
        rows: mel.rows,
        cols: mel.cols,
        data: mel.data.iter().map(|&x| (x + LOG_EPSILON).ln()).collect(),
    })
}
