use rand::Rng;
use rayon::prelude::*;

use crate::real::{gemm, Real};
use crate::tensor::Tensor;

use super::{HasParams, Param};

/// 3×3 convolution, stride 1, zero padding 1, via im2col + GEMM.
#[derive(Clone, Debug)]
pub struct Conv2d<R> {
    pub weight: Param<R>,
    pub bias: Param<R>,
    pub in_channels: usize,
    pub out_channels: usize,
    input: Option<Tensor<R>>,
}

fn im2col<R: Real>(x: &[R], c: usize, h: usize, w: usize, cols: &mut [R]) {
    let hw = h * w;
    for ci in 0..c {
        let plane = &x[ci * hw..(ci + 1) * hw];
        for ky in 0..3 {
            for kx in 0..3 {
                let row = &mut cols[((ci * 3 + ky) * 3 + kx) * hw..][..hw];
                for y in 0..h {
                    let sy = y as isize + ky as isize - 1;
                    let out = &mut row[y * w..(y + 1) * w];
                    if sy < 0 || sy >= h as isize {
                        out.fill(R::zero());
                        continue;
                    }
                    let src = &plane[sy as usize * w..(sy as usize + 1) * w];
                    for (xo, o) in out.iter_mut().enumerate() {
                        let sx = xo as isize + kx as isize - 1;
                        *o = if sx < 0 || sx >= w as isize {
                            R::zero()
                        } else {
                            src[sx as usize]
                        };
                    }
                }
            }
        }
    }
}

fn col2im<R: Real>(cols: &[R], c: usize, h: usize, w: usize, dx: &mut [R]) {
    let hw = h * w;
    for ci in 0..c {
        let plane = &mut dx[ci * hw..(ci + 1) * hw];
        for ky in 0..3 {
            for kx in 0..3 {
                let row = &cols[((ci * 3 + ky) * 3 + kx) * hw..][..hw];
                for y in 0..h {
                    let sy = y as isize + ky as isize - 1;
                    if sy < 0 || sy >= h as isize {
                        continue;
                    }
                    let dst = &mut plane[sy as usize * w..(sy as usize + 1) * w];
                    for (xo, &g) in row[y * w..(y + 1) * w].iter().enumerate() {
                        let sx = xo as isize + kx as isize - 1;
                        if sx >= 0 && sx < w as isize {
                            dst[sx as usize] += g;
                        }
                    }
                }
            }
        }
    }
}

impl<R: Real> Conv2d<R> {
    pub fn new(name: &str, in_channels: usize, out_channels: usize, rng: &mut impl Rng) -> Self {
        let fan_in = (in_channels * 9) as f64;
        let bound = 1.0 / fan_in.sqrt();
        Self {
            weight: Param::uniform(
                format!("{name}.weight"),
                &[out_channels, in_channels, 3, 3],
                bound,
                rng,
            ),
            bias: Param::uniform(format!("{name}.bias"), &[out_channels], bound, rng),
            in_channels,
            out_channels,
            input: None,
        }
    }

    pub fn forward(&mut self, x: &Tensor<R>) -> Tensor<R> {
        let (n, c, h, w) = x.dims4();
        assert_eq!(c, self.in_channels, "conv input channels");
        let (hw, k, co) = (h * w, c * 9, self.out_channels);
        let mut out = Tensor::zeros(&[n, co, h, w]);
        let weight = &self.weight.value;
        let bias = &self.bias.value;
        out.data_mut()
            .par_chunks_mut(co * hw)
            .zip(x.data().par_chunks(c * hw))
            .for_each(|(o, xi)| {
                let mut cols = vec![R::zero(); k * hw];
                im2col(xi, c, h, w, &mut cols);
                gemm(
                    false,
                    false,
                    co,
                    hw,
                    k,
                    R::one(),
                    weight,
                    &cols,
                    R::zero(),
                    o,
                );
                for (row, &b) in o.chunks_mut(hw).zip(bias) {
                    row.iter_mut().for_each(|v| *v += b);
                }
            });
        self.input = Some(x.clone());
        out
    }

    pub fn backward(&mut self, dy: &Tensor<R>) -> Tensor<R> {
        let x = self.input.as_ref().expect("conv backward before forward");
        let (n, c, h, w) = x.dims4();
        let (hw, k, co) = (h * w, c * 9, self.out_channels);
        assert_eq!(dy.shape(), &[n, co, h, w]);
        let weight = &self.weight.value;
        let mut dx = Tensor::zeros(&[n, c, h, w]);
        let partials: Vec<(Vec<R>, Vec<R>)> = dx
            .data_mut()
            .par_chunks_mut(c * hw)
            .zip(x.data().par_chunks(c * hw))
            .zip(dy.data().par_chunks(co * hw))
            .map(|((dxi, xi), dyi)| {
                let mut cols = vec![R::zero(); k * hw];
                im2col(xi, c, h, w, &mut cols);
                let mut dw = vec![R::zero(); co * k];
                gemm(
                    false,
                    true,
                    co,
                    k,
                    hw,
                    R::one(),
                    dyi,
                    &cols,
                    R::zero(),
                    &mut dw,
                );
                let db: Vec<R> = dyi.chunks(hw).map(|r| r.iter().copied().sum()).collect();
                gemm(
                    true,
                    false,
                    k,
                    hw,
                    co,
                    R::one(),
                    weight,
                    dyi,
                    R::zero(),
                    &mut cols,
                );
                col2im(&cols, c, h, w, dxi);
                (dw, db)
            })
            .collect();
        // Reduce in sample order so results do not depend on thread count.
        for (dw, db) in partials {
            self.weight
                .grad
                .iter_mut()
                .zip(&dw)
                .for_each(|(g, d)| *g += *d);
            self.bias
                .grad
                .iter_mut()
                .zip(&db)
                .for_each(|(g, d)| *g += *d);
        }
        dx
    }
}

impl<R: Real> HasParams<R> for Conv2d<R> {
    fn visit(&self, f: &mut dyn FnMut(&Param<R>)) {
        f(&self.weight);
        f(&self.bias);
    }
    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut Param<R>)) {
        f(&mut self.weight);
        f(&mut self.bias);
    }
}
