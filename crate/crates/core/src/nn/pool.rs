use crate::real::Real;
use crate::tensor::Tensor;

/// 2×2 max-pooling, stride 2, floor output size.
#[derive(Clone, Debug, Default)]
pub struct MaxPool2 {
    argmax: Vec<usize>,
    input_shape: Vec<usize>,
}

impl MaxPool2 {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn forward<R: Real>(&mut self, x: &Tensor<R>) -> Tensor<R> {
        let (n, c, h, w) = x.dims4();
        let (oh, ow) = (h / 2, w / 2);
        let mut out = Tensor::zeros(&[n, c, oh, ow]);
        self.argmax = vec![0; n * c * oh * ow];
        self.input_shape = x.shape().to_vec();
        let src = x.data();
        let dst = out.data_mut();
        for plane in 0..n * c {
            let base = plane * h * w;
            for oy in 0..oh {
                for ox in 0..ow {
                    let mut best = base + 2 * oy * w + 2 * ox;
                    for (dy, dx) in [(0, 1), (1, 0), (1, 1)] {
                        let idx = base + (2 * oy + dy) * w + 2 * ox + dx;
                        if src[idx] > src[best] {
                            best = idx;
                        }
                    }
                    let o = (plane * oh + oy) * ow + ox;
                    dst[o] = src[best];
                    self.argmax[o] = best;
                }
            }
        }
        out
    }

    pub fn backward<R: Real>(&self, dy: &Tensor<R>) -> Tensor<R> {
        let mut dx = Tensor::zeros(&self.input_shape);
        let d = dx.data_mut();
        for (&g, &idx) in dy.data().iter().zip(&self.argmax) {
            d[idx] += g;
        }
        dx
    }
}
