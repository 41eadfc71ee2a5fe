use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// A window `[start_s, start_s + len_s)` of a chorus. When the chorus is
/// shorter than the window, `audio_s < len_s` and the rest is zero padding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub start_s: f64,
    pub len_s: f64,
    /// Seconds of real audio inside the window.
    pub audio_s: f64,
}

impl Window {
    pub fn padded(&self) -> bool {
        self.audio_s < self.len_s
    }

    pub fn end_s(&self) -> f64 {
        self.start_s + self.len_s
    }
}

/// Tolerance when comparing durations derived from sample counts.
const EPS: f64 = 1e-9;

fn short_window(duration_s: f64, seg_len: f64) -> Window {
    Window {
        start_s: 0.0,
        len_s: seg_len,
        audio_s: duration_s,
    }
}

/// Generator for one chorus's simple-mode crop, fixed by `(seed, song_id)`.
pub fn simple_rng(seed: u64, song_id: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(song_id.as_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// One window per chorus: a uniformly placed crop, or the whole chorus
/// (flagged for padding) when it is shorter than `seg_len`.
pub fn cut_simple(duration_s: f64, seg_len: f64, rng: &mut impl Rng) -> Window {
    if duration_s < seg_len + EPS {
        return short_window(duration_s.min(seg_len), seg_len);
    }
    let start_s = rng.gen_range(0.0..=duration_s - seg_len);
    Window {
        start_s,
        len_s: seg_len,
        audio_s: seg_len,
    }
}

/// Consecutive windows; a tail shorter than half a window is dropped,
/// otherwise the last window is shifted back so it ends at the chorus end.
pub fn cut_full(duration_s: f64, seg_len: f64) -> Vec<Window> {
    if duration_s < seg_len - EPS {
        return vec![short_window(duration_s, seg_len)];
    }
    let whole = ((duration_s + EPS) / seg_len).floor() as usize;
    let mut windows: Vec<Window> = (0..whole)
        .map(|i| Window {
            start_s: i as f64 * seg_len,
            len_s: seg_len,
            audio_s: seg_len,
        })
        .collect();
    let remainder = duration_s - whole as f64 * seg_len;
    if remainder > EPS && remainder + EPS >= seg_len / 2.0 {
        windows.push(Window {
            start_s: duration_s - seg_len,
            len_s: seg_len,
            audio_s: seg_len,
        });
    }
    windows
}
