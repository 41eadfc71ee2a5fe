use crate::error::{Error, Result};
use crate::frontend::{MelSpectrogram, N_MELS};
use crate::tensor::Tensor;

/// Cuts a `T × 128` spectrogram into `seg_num` consecutive time slices and
/// stacks them as channels: `(seg_num, floor(T / seg_num), 128)`. Trailing
/// frames that do not fill a slice are dropped.
pub fn segment_stack(mel: &MelSpectrogram, seg_num: usize) -> Result<Tensor<f32>> {
    if seg_num == 0 || seg_num > mel.frames {
        return Err(Error::Shape(format!(
            "cannot stack {} frames into {seg_num} slices",
            mel.frames
        )));
    }
    let per = mel.frames / seg_num;
    // Time-major storage makes channel c exactly rows [c·per, (c+1)·per).
    Tensor::from_vec(
        &[seg_num, per, N_MELS],
        mel.data[..seg_num * per * N_MELS].to_vec(),
    )
}

/// Concatenates the channels of a stacked input back along time.
pub fn destack(stacked: &Tensor<f32>) -> Result<MelSpectrogram> {
    let shape = stacked.shape();
    if shape.len() != 3 || shape[2] != N_MELS {
        return Err(Error::Shape(format!(
            "expected (seg_num, T', {N_MELS}), got {shape:?}"
        )));
    }
    Ok(MelSpectrogram::from_frames(
        shape[0] * shape[1],
        stacked.data().to_vec(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mel(frames: usize) -> MelSpectrogram {
        MelSpectrogram::from_frames(frames, (0..frames * N_MELS).map(|i| i as f32).collect())
    }

    #[test]
    fn stacks_rows_into_channels() {
        let m = mel(2001);
        let s = segment_stack(&m, 6).unwrap();
        assert_eq!(s.shape(), &[6, 333, 128]);
        // Channel 2, row 5 is spectrogram row 2·333 + 5.
        let at = (2 * 333 + 5) * N_MELS;
        assert_eq!(&s.data()[at..at + N_MELS], m.row(671));
    }

    #[test]
    fn single_slice_is_identity() {
        let m = mel(50);
        let s = segment_stack(&m, 1).unwrap();
        assert_eq!(s.shape(), &[1, 50, 128]);
        assert_eq!(s.data(), &m.data[..]);
    }

    #[test]
    fn too_many_slices_is_an_error() {
        assert!(segment_stack(&mel(5), 6).is_err());
        assert!(segment_stack(&mel(5), 0).is_err());
    }

    #[test]
    fn destack_round_trip() {
        let m = mel(103);
        let back = destack(&segment_stack(&m, 4).unwrap()).unwrap();
        assert_eq!(back.frames, 100);
        assert_eq!(back.data, m.data[..100 * N_MELS]);
    }
}
