//! Squeeze-and-excitation channel attention.
//!
//! `z_c` is the spatial mean of channel `c`, `a = σ(W₂ · relu(W₁ · z))` with
//! bias-free `W₁: b×C` and `W₂: C×b`, and each channel is rescaled by `a_c`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::real::{gemm, sigmoid, Real};
use crate::tensor::Tensor;

use super::{spatial_mean, spatial_mean_backward, HasParams, Param};

/// Per-channel spatial mean of one `(C, H, W)` feature map.
pub fn se_squeeze<R: Real>(feature: &[R], c: usize, h: usize, w: usize) -> Vec<R> {
    let hw = h * w;
    assert_eq!(feature.len(), c * hw);
    let inv = R::one() / R::from_usize(hw).unwrap();
    feature
        .chunks(hw)
        .map(|p| p.iter().copied().sum::<R>() * inv)
        .collect()
}

/// Excitation for one descriptor: `σ(W₂ relu(W₁ z))`.
pub fn se_excite<R: Real>(z: &[R], w1: &[R], w2: &[R], bottleneck: usize) -> Vec<R> {
    let c = z.len();
    assert_eq!(w1.len(), bottleneck * c);
    assert_eq!(w2.len(), c * bottleneck);
    let mut u = vec![R::zero(); bottleneck];
    gemm(
        false,
        false,
        bottleneck,
        1,
        c,
        R::one(),
        w1,
        z,
        R::zero(),
        &mut u,
    );
    u.iter_mut().for_each(|v| *v = v.max(R::zero()));
    let mut a = vec![R::zero(); c];
    gemm(
        false,
        false,
        c,
        1,
        bottleneck,
        R::one(),
        w2,
        &u,
        R::zero(),
        &mut a,
    );
    a.into_iter().map(sigmoid).collect()
}

/// Multiplies channel `c` of a `(C, H, W)` map by `a[c]`.
pub fn se_scale<R: Real>(feature: &[R], a: &[R], h: usize, w: usize) -> Result<Vec<R>> {
    let hw = h * w;
    if feature.len() != a.len() * hw {
        return Err(Error::Shape(format!(
            "attention length {} does not match {} channels",
            a.len(),
            feature.len() / hw.max(1)
        )));
    }
    Ok(feature
        .chunks(hw)
        .zip(a)
        .flat_map(|(p, &ac)| p.iter().map(move |&v| v * ac))
        .collect())
}

/// Bottleneck width for `channels` at reduction `r`, never below 4.
pub fn bottleneck_width(channels: usize, reduction: usize) -> usize {
    (channels / reduction.max(1)).max(4).min(channels.max(1))
}

#[derive(Clone, Debug)]
pub struct SeBlock<R> {
    pub w1: Param<R>,
    pub w2: Param<R>,
    cache: Option<Cache<R>>,
}

#[derive(Clone, Debug)]
struct Cache<R> {
    input: Tensor<R>,
    z: Tensor<R>,
    u: Vec<R>,
    attention: Tensor<R>,
}

impl<R: Real> SeBlock<R> {
    pub fn new(name: &str, channels: usize, reduction: usize, rng: &mut impl Rng) -> Self {
        let b = bottleneck_width(channels, reduction);
        Self {
            w1: Param::uniform(
                format!("{name}.w1"),
                &[b, channels],
                1.0 / (channels as f64).sqrt(),
                rng,
            ),
            w2: Param::uniform(
                format!("{name}.w2"),
                &[channels, b],
                1.0 / (b as f64).sqrt(),
                rng,
            ),
            cache: None,
        }
    }

    pub fn bottleneck(&self) -> usize {
        self.w1.shape[0]
    }

    /// Attention weights of the last forward pass, `(batch, channels)`.
    pub fn last_attention(&self) -> Option<&Tensor<R>> {
        self.cache.as_ref().map(|c| &c.attention)
    }

    pub fn forward(&mut self, x: &Tensor<R>) -> Tensor<R> {
        let (n, c, h, w) = x.dims4();
        let b = self.bottleneck();
        let z = spatial_mean(x);
        let mut u = vec![R::zero(); n * b];
        gemm(
            false,
            true,
            n,
            b,
            c,
            R::one(),
            z.data(),
            &self.w1.value,
            R::zero(),
            &mut u,
        );
        let r: Vec<R> = u.iter().map(|&v| v.max(R::zero())).collect();
        let mut v = vec![R::zero(); n * c];
        gemm(
            false,
            true,
            n,
            c,
            b,
            R::one(),
            &r,
            &self.w2.value,
            R::zero(),
            &mut v,
        );
        let attention = Tensor::from_vec(&[n, c], v.into_iter().map(sigmoid).collect()).unwrap();
        let hw = h * w;
        let mut y = x.clone();
        for (plane, &ac) in y.data_mut().chunks_mut(hw).zip(attention.data()) {
            plane.iter_mut().for_each(|v| *v *= ac);
        }
        self.cache = Some(Cache {
            input: x.clone(),
            z,
            u,
            attention,
        });
        y
    }

    pub fn backward(&mut self, dy: &Tensor<R>) -> Tensor<R> {
        let cache = self.cache.as_ref().expect("SE backward before forward");
        let (n, c, h, w) = cache.input.dims4();
        let hw = h * w;
        let b = self.bottleneck();
        let a = cache.attention.data();
        let mut dx = dy.clone();
        let mut da = vec![R::zero(); n * c];
        for (((dplane, xplane), &ac), dac) in dx
            .data_mut()
            .chunks_mut(hw)
            .zip(cache.input.data().chunks(hw))
            .zip(a)
            .zip(da.iter_mut())
        {
            *dac = dplane.iter().zip(xplane).map(|(&g, &xv)| g * xv).sum();
            dplane.iter_mut().for_each(|g| *g *= ac);
        }
        // through the logistic
        let dv: Vec<R> = da
            .iter()
            .zip(a)
            .map(|(&g, &s)| g * s * (R::one() - s))
            .collect();
        let r: Vec<R> = cache.u.iter().map(|&v| v.max(R::zero())).collect();
        gemm(
            true,
            false,
            c,
            b,
            n,
            R::one(),
            &dv,
            &r,
            R::one(),
            &mut self.w2.grad,
        );
        let mut dr = vec![R::zero(); n * b];
        gemm(
            false,
            false,
            n,
            b,
            c,
            R::one(),
            &dv,
            &self.w2.value,
            R::zero(),
            &mut dr,
        );
        let du: Vec<R> = dr
            .iter()
            .zip(&cache.u)
            .map(|(&g, &u)| if u > R::zero() { g } else { R::zero() })
            .collect();
        gemm(
            true,
            false,
            b,
            c,
            n,
            R::one(),
            &du,
            cache.z.data(),
            R::one(),
            &mut self.w1.grad,
        );
        let mut dz = Tensor::zeros(&[n, c]);
        gemm(
            false,
            false,
            n,
            c,
            b,
            R::one(),
            &du,
            &self.w1.value,
            R::zero(),
            dz.data_mut(),
        );
        let dsq = spatial_mean_backward(&dz, h, w);
        dx.data_mut()
            .iter_mut()
            .zip(dsq.data())
            .for_each(|(g, &s)| *g += s);
        dx
    }
}

impl<R: Real> HasParams<R> for SeBlock<R> {
    fn visit(&self, f: &mut dyn FnMut(&Param<R>)) {
        f(&self.w1);
        f(&self.w2);
    }
    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut Param<R>)) {
        f(&mut self.w1);
        f(&mut self.w2);
    }
}
