use rand::Rng;

use crate::nn::{BatchNorm2d, Conv2d, HasParams, MaxPool2, Mode, Param, Relu};
use crate::real::Real;
use crate::tensor::Tensor;

/// Output `(channels, height, width)` of every level for an input of
/// `height × width`: each level halves both spatial axes (floor).
pub fn level_shapes(channels: &[usize], height: usize, width: usize) -> Vec<(usize, usize, usize)> {
    let (mut h, mut w) = (height, width);
    channels
        .iter()
        .map(|&c| {
            h /= 2;
            w /= 2;
            (c, h, w)
        })
        .collect()
}

#[derive(Clone, Debug)]
struct ConvBlock<R> {
    conv: Conv2d<R>,
    bn: BatchNorm2d<R>,
    relu: Relu,
}

/// One level: `k × (conv3×3 → BN → ReLU)`, 2×2 max-pool, then BN → ReLU.
#[derive(Clone, Debug)]
pub struct SflmLevel<R> {
    blocks: Vec<ConvBlock<R>>,
    pool: MaxPool2,
    post_bn: BatchNorm2d<R>,
    post_relu: Relu,
}

impl<R: Real> SflmLevel<R> {
    pub fn new(
        name: &str,
        in_channels: usize,
        out_channels: usize,
        convs: usize,
        rng: &mut impl Rng,
    ) -> Self {
        let blocks = (0..convs)
            .map(|i| {
                let cin = if i == 0 { in_channels } else { out_channels };
                let prefix = format!("{name}.conv{i}");
                ConvBlock {
                    conv: Conv2d::new(&prefix, cin, out_channels, rng),
                    bn: BatchNorm2d::new(&format!("{prefix}.bn"), out_channels),
                    relu: Relu::new(),
                }
            })
            .collect();
        Self {
            blocks,
            pool: MaxPool2::new(),
            post_bn: BatchNorm2d::new(&format!("{name}.post_bn"), out_channels),
            post_relu: Relu::new(),
        }
    }

    pub fn forward(&mut self, x: &Tensor<R>, mode: Mode) -> Tensor<R> {
        let mut y = x.clone();
        for b in &mut self.blocks {
            y = b.conv.forward(&y);
            y = b.bn.forward(&y, mode);
            y = b.relu.forward(&y);
        }
        y = self.pool.forward(&y);
        y = self.post_bn.forward(&y, mode);
        self.post_relu.forward(&y)
    }

    pub fn backward(&mut self, dy: &Tensor<R>) -> Tensor<R> {
        let mut g = self.post_relu.backward(dy);
        g = self.post_bn.backward(&g);
        g = self.pool.backward(&g);
        for b in self.blocks.iter_mut().rev() {
            g = b.relu.backward(&g);
            g = b.bn.backward(&g);
            g = b.conv.backward(&g);
        }
        g
    }
}

impl<R: Real> HasParams<R> for SflmLevel<R> {
    fn visit(&self, f: &mut dyn FnMut(&Param<R>)) {
        for b in &self.blocks {
            b.conv.visit(f);
            b.bn.visit(f);
        }
        self.post_bn.visit(f);
    }
    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut Param<R>)) {
        for b in &mut self.blocks {
            b.conv.visit_mut(f);
            b.bn.visit_mut(f);
        }
        self.post_bn.visit_mut(f);
    }
}
