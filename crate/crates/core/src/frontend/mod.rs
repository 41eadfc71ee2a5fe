//! Audio decoding and log Mel-spectrogram extraction.
//!
//! Extraction parameters are fixed: 44.1 kHz input, 60 ms Hann window
//! (2646 samples), 10 ms hop (441 samples), a 2646-point transform, reflect
//! centre padding, 128 Slaney Mel bands over 0–22050 Hz and `ln(x + 1e-6)`
//! compression of the Mel power.

mod audio;
pub mod cache;
mod mel;
mod resample;
mod stft;

pub use audio::{load_audio, pad_to_length, write_wav, AudioClip};
pub use mel::{hz_to_mel, log_compress, mel_project, mel_to_hz, MelFilterbank};
pub use resample::resample;
pub use stft::{frame_count, frame_power, hann_window, stft_power};

use std::sync::LazyLock;

use crate::error::Result;

pub const SAMPLE_RATE: u32 = 44_100;
pub const HOP_SAMPLES: usize = 441;
pub const WINDOW_SAMPLES: usize = 2646;
pub const N_FFT: usize = WINDOW_SAMPLES;
pub const N_BINS: usize = N_FFT / 2 + 1;
pub const N_MELS: usize = 128;
pub const HOP_SECONDS: f64 = 0.010;
pub const WINDOW_SECONDS: f64 = 0.060;
pub const LOG_EPSILON: f64 = 1e-6;
pub const FRONTEND_VERSION: &str = "adff-frontend/1";

/// Row-major real matrix used for intermediate spectra.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * a).collect(),
        }
    }
}

/// Log Mel-spectrogram of one clip, `frames × 128`, time-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MelSpectrogram {
    pub frames: usize,
    pub data: Vec<f32>,
    pub sample_rate: u32,
    pub hop_seconds: f64,
    pub window_seconds: f64,
}

impl MelSpectrogram {
    pub const N_MELS: usize = N_MELS;

    /// A spectrogram at the standard frontend settings.
    pub fn from_frames(frames: usize, data: Vec<f32>) -> Self {
        debug_assert_eq!(data.len(), frames * N_MELS);
        Self {
            frames,
            data,
            sample_rate: SAMPLE_RATE,
            hop_seconds: HOP_SECONDS,
            window_seconds: WINDOW_SECONDS,
        }
    }

    pub fn row(&self, t: usize) -> &[f32] {
        &self.data[t * N_MELS..(t + 1) * N_MELS]
    }

    /// Value every bin takes on digital silence.
    pub fn silence_level() -> f32 {
        LOG_EPSILON.ln() as f32
    }

    /// Frames `[start, start + len)`, filling frames past the end with the
    /// silence level (equivalent to zero-padding the audio).
    pub fn window(&self, start: usize, len: usize) -> MelSpectrogram {
        let mut data = vec![Self::silence_level(); len * N_MELS];
        let avail = self.frames.saturating_sub(start).min(len);
        if avail > 0 {
            data[..avail * N_MELS]
                .copy_from_slice(&self.data[start * N_MELS..(start + avail) * N_MELS]);
        }
        MelSpectrogram {
            frames: len,
            data,
            ..self.clone_meta()
        }
    }

    fn clone_meta(&self) -> MelSpectrogram {
        MelSpectrogram {
            frames: 0,
            data: Vec::new(),
            sample_rate: self.sample_rate,
            hop_seconds: self.hop_seconds,
            window_seconds: self.window_seconds,
        }
    }
}

static FILTERBANK: LazyLock<MelFilterbank> = LazyLock::new(|| {
    MelFilterbank::slaney(
        SAMPLE_RATE as f64,
        N_FFT,
        N_MELS,
        0.0,
        SAMPLE_RATE as f64 / 2.0,
    )
});

/// The shared 128-band filterbank used by [`extract`].
pub fn filterbank() -> &'static MelFilterbank {
    &FILTERBANK
}

/// `log_compress(mel_project(stft_power(clip)))`.
pub fn extract(clip: &AudioClip) -> Result<MelSpectrogram> {
    let power = stft_power(clip)?;
    let mel = mel_project(&power, filterbank())?;
    let logged = log_compress(&mel)?;
    Ok(MelSpectrogram {
        frames: logged.rows,
        data: logged.data.iter().map(|&x| x as f32).collect(),
        sample_rate: clip.sample_rate,
        hop_seconds: HOP_SECONDS,
        window_seconds: WINDOW_SECONDS,
    })
}
