use std::path::Path;

use crate::error::{Error, Result};

use super::{resample, SAMPLE_RATE};

/// Mono audio at a known sample rate.
#[derive(Clone, Debug, PartialEq)]
pub struct AudioClip {
    pub samples: Vec<f32>,
    pub sample_rate: u32,
}

impl AudioClip {
    pub fn new(samples: Vec<f32>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidInput("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Samples `[start_s, start_s + len_s)`, clipped to the clip.
    pub fn slice_seconds(&self, start_s: f64, len_s: f64) -> AudioClip {
        let sr = self.sample_rate as f64;
        let a = ((start_s * sr).round() as usize).min(self.samples.len());
        let b = (((start_s + len_s) * sr).round() as usize).min(self.samples.len());
        AudioClip {
            samples: self.samples[a..b].to_vec(),
            sample_rate: self.sample_rate,
        }
    }
}

/// Decodes a PCM WAV file (16/24/32-bit integer or 32-bit float), averages
/// channels to mono and resamples to 44.1 kHz.
pub fn load_audio(path: impl AsRef<Path>) -> Result<AudioClip> {
    let path = path.as_ref();
    let decode_err = |reason: String| Error::Decode {
        path: path.to_path_buf(),
        reason,
    };
    let mut reader = hound::WavReader::open(path).map_err(|e| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => decode_err(other.to_string()),
    })?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(decode_err("no channels".into()));
    }
    let interleaved: Vec<f32> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| decode_err(e.to_string()))?,
        (hound::SampleFormat::Int, bits @ (8 | 16 | 24 | 32)) => {
            let scale = 1.0 / (1u64 << (bits - 1)) as f64;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| (v as f64 * scale) as f32))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| decode_err(e.to_string()))?
        }
        (fmt, bits) => {
            return Err(decode_err(format!("unsupported codec: {fmt:?} {bits}-bit")));
        }
    };
    if interleaved.is_empty() {
        return Err(Error::ZeroLengthAudio(path.to_path_buf()));
    }
    let mono: Vec<f32> = interleaved
        .chunks_exact(channels)
        .map(|frame| (frame.iter().map(|&x| x as f64).sum::<f64>() / channels as f64) as f32)
        .collect();
    if mono.is_empty() {
        return Err(Error::ZeroLengthAudio(path.to_path_buf()));
    }
    let clip = AudioClip::new(mono, spec.sample_rate).map_err(|e| decode_err(e.to_string()))?;
    if clip.sample_rate == SAMPLE_RATE {
        Ok(clip)
    } else {
        Ok(resample(&clip, SAMPLE_RATE))
    }
}

/// Writes a mono 32-bit float WAV.
pub fn write_wav(path: impl AsRef<Path>, clip: &AudioClip) -> Result<()> {
    let path = path.as_ref();
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: clip.sample_rate,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let to_err = |e: hound::Error| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::Decode {
            path: path.to_path_buf(),
            reason: other.to_string(),
        },
    };
    let mut w = hound::WavWriter::create(path, spec).map_err(to_err)?;
    for &s in &clip.samples {
        w.write_sample(s).map_err(to_err)?;
    }
    w.finalize().map_err(to_err)
}

/// Appends zeros until the clip lasts `target_seconds`; never truncates.
pub fn pad_to_length(clip: &AudioClip, target_seconds: f64) -> AudioClip {
    let target = (target_seconds * clip.sample_rate as f64).round() as usize;
    let mut samples = clip.samples.clone();
    if samples.len() < target {
        samples.resize(target, 0.0);
    }
    AudioClip {
        samples,
        sample_rate: clip.sample_rate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(secs: f64, sr: u32) -> AudioClip {
        let n = (secs * sr as f64) as usize;
        let s = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * 440.0 * i as f64 / sr as f64).sin() as f32 * 0.5)
            .collect();
        AudioClip::new(s, sr).unwrap()
    }

    #[test]
    fn pad_appends_exact_zeros() {
        let clip = tone(15.0, 1000);
        let padded = pad_to_length(&clip, 20.0);
        assert_eq!(padded.samples.len(), 20_000);
        assert_eq!(&padded.samples[..15_000], &clip.samples[..]);
        assert!(padded.samples[15_000..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn pad_is_identity_at_or_above_target() {
        let clip = tone(20.0, 1000);
        assert_eq!(pad_to_length(&clip, 20.0), clip);
        let long = tone(25.0, 1000);
        assert_eq!(pad_to_length(&long, 20.0), long);
    }

    #[test]
    fn wav_round_trip_at_native_rate() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.wav");
        let clip = tone(1.0, SAMPLE_RATE);
        write_wav(&path, &clip).unwrap();
        let back = load_audio(&path).unwrap();
        assert_eq!(back.samples.len(), 44_100);
        assert_eq!(back, clip);
    }

    #[test]
    fn int16_stereo_is_averaged() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: SAMPLE_RATE,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&path, spec).unwrap();
        for _ in 0..100 {
            w.write_sample(16384i16).unwrap();
            w.write_sample(0i16).unwrap();
        }
        w.finalize().unwrap();
        let clip = load_audio(&path).unwrap();
        assert_eq!(clip.samples.len(), 100);
        assert!(clip.samples.iter().all(|&x| (x - 0.25).abs() < 1e-6));
    }

    #[test]
    fn empty_wav_is_zero_length_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.wav");
        let clip = AudioClip {
            samples: vec![],
            sample_rate: SAMPLE_RATE,
        };
        write_wav(&path, &clip).unwrap();
        let err = load_audio(&path).unwrap_err();
        assert!(err.to_string().contains("zero-length audio"), "{err}");
    }

    #[test]
    fn garbage_file_is_decode_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.wav");
        std::fs::write(&path, b"definitely not a wav file").unwrap();
        assert!(matches!(load_audio(&path), Err(Error::Decode { .. })));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_audio("/nonexistent/x.wav"),
            Err(Error::Io { .. })
        ));
    }
}
