//! Layers with hand-written forward and backward passes.
//!
//! Every layer caches what its backward pass needs during `forward` and
//! accumulates parameter gradients into [`Param::grad`] during `backward`.
//! Feature maps are `(batch, channels, height, width)`; sequences are
//! `(batch, time, features)`.

mod activation;
mod batchnorm;
mod conv;
pub mod gradcheck;
mod linear;
mod lstm;
mod param;
mod pool;
pub mod se;

pub use activation::Relu;
pub use batchnorm::BatchNorm2d;
pub use conv::Conv2d;
pub use linear::Linear;
pub use lstm::{BiLstm, LstmDirection, StackedBiLstm};
pub use param::{HasParams, Param};
pub use pool::MaxPool2;
pub use se::SeBlock;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Mean over the spatial axes: `(n, c, h, w) -> (n, c)`.
pub fn spatial_mean<R: crate::Real>(x: &crate::Tensor<R>) -> crate::Tensor<R> {
    let (n, c, h, w) = x.dims4();
    let hw = h * w;
    let inv = R::one() / R::from_usize(hw).unwrap();
    let data = x
        .data()
        .chunks(hw)
        .map(|plane| plane.iter().copied().sum::<R>() * inv)
        .collect();
    crate::Tensor::from_vec(&[n, c], data).unwrap()
}

/// Backward of [`spatial_mean`]: spreads `(n, c)` gradients uniformly.
pub fn spatial_mean_backward<R: crate::Real>(
    dz: &crate::Tensor<R>,
    h: usize,
    w: usize,
) -> crate::Tensor<R> {
    let (n, c) = dz.dims2();
    let hw = h * w;
    let inv = R::one() / R::from_usize(hw).unwrap();
    let mut out = crate::Tensor::zeros(&[n, c, h, w]);
    for (plane, &g) in out.data_mut().chunks_mut(hw).zip(dz.data()) {
        plane.fill(g * inv);
    }
    out
}

/// Average over the frequency axis, producing a time sequence:
/// `(n, c, h, w) -> (n, h, c)`.
pub fn frequency_mean<R: crate::Real>(x: &crate::Tensor<R>) -> crate::Tensor<R> {
    let (n, c, h, w) = x.dims4();
    let inv = R::one() / R::from_usize(w).unwrap();
    let mut out = crate::Tensor::zeros(&[n, h, c]);
    let src = x.data();
    let dst = out.data_mut();
    for b in 0..n {
        for ch in 0..c {
            for t in 0..h {
                let row = &src[((b * c + ch) * h + t) * w..][..w];
                dst[(b * h + t) * c + ch] = row.iter().copied().sum::<R>() * inv;
            }
        }
    }
    out
}

/// Backward of [`frequency_mean`].
pub fn frequency_mean_backward<R: crate::Real>(
    dseq: &crate::Tensor<R>,
    c: usize,
    w: usize,
) -> crate::Tensor<R> {
    let (n, h, c2) = (dseq.shape()[0], dseq.shape()[1], dseq.shape()[2]);
    assert_eq!(c, c2);
    let inv = R::one() / R::from_usize(w).unwrap();
    let mut out = crate::Tensor::zeros(&[n, c, h, w]);
    let src = dseq.data();
    let dst = out.data_mut();
    for b in 0..n {
        for ch in 0..c {
            for t in 0..h {
                let g = src[(b * h + t) * c + ch] * inv;
                dst[((b * c + ch) * h + t) * w..][..w].fill(g);
            }
        }
    }
    out
}
