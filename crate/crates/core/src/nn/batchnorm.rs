use crate::real::Real;
use crate::tensor::Tensor;

use super::{HasParams, Mode, Param};

/// Per-channel batch normalisation over `(batch, height, width)`.
///
/// Train mode normalises with biased batch statistics and folds the
/// (unbiased) batch variance into the running estimates with momentum 0.1.
#[derive(Clone, Debug)]
pub struct BatchNorm2d<R> {
    pub gamma: Param<R>,
    pub beta: Param<R>,
    pub running_mean: Param<R>,
    pub running_var: Param<R>,
    pub momentum: f64,
    pub eps: f64,
    cache: Option<Cache<R>>,
}

#[derive(Clone, Debug)]
struct Cache<R> {
    x_hat: Tensor<R>,
    inv_std: Vec<R>,
    mode: Mode,
}

impl<R: Real> BatchNorm2d<R> {
    pub fn new(name: &str, channels: usize) -> Self {
        Self {
            gamma: Param::new(
                format!("{name}.gamma"),
                &[channels],
                vec![R::one(); channels],
            ),
            beta: Param::zeros(format!("{name}.beta"), &[channels]),
            running_mean: Param::buffer(
                format!("{name}.running_mean"),
                &[channels],
                vec![R::zero(); channels],
            ),
            running_var: Param::buffer(
                format!("{name}.running_var"),
                &[channels],
                vec![R::one(); channels],
            ),
            momentum: 0.1,
            eps: 1e-5,
            cache: None,
        }
    }

    pub fn channels(&self) -> usize {
        self.gamma.len()
    }

    pub fn forward(&mut self, x: &Tensor<R>, mode: Mode) -> Tensor<R> {
        let (n, c, h, w) = x.dims4();
        assert_eq!(c, self.channels(), "batch-norm channels");
        let hw = h * w;
        let count = n * hw;
        let src = x.data();
        let eps = R::lit(self.eps);
        let (mean, var): (Vec<R>, Vec<R>) = match mode {
            Mode::Train => (0..c)
                .map(|ch| {
                    let planes = (0..n).map(|b| &src[(b * c + ch) * hw..][..hw]);
                    let sum: f64 = planes
                        .clone()
                        .flat_map(|p| p.iter())
                        .map(|v| v.as_f64())
                        .sum();
                    let mean = sum / count as f64;
                    let ss: f64 = planes
                        .flat_map(|p| p.iter())
                        .map(|v| (v.as_f64() - mean).powi(2))
                        .sum();
                    (R::lit(mean), R::lit(ss / count as f64))
                })
                .unzip(),
            Mode::Eval => (
                self.running_mean.value.clone(),
                self.running_var.value.clone(),
            ),
        };
        if mode == Mode::Train {
            let m = R::lit(self.momentum);
            let unbias = if count > 1 {
                R::lit(count as f64 / (count - 1) as f64)
            } else {
                R::one()
            };
            for ch in 0..c {
                let rm = &mut self.running_mean.value[ch];
                *rm = (R::one() - m) * *rm + m * mean[ch];
                let rv = &mut self.running_var.value[ch];
                *rv = (R::one() - m) * *rv + m * var[ch] * unbias;
            }
        }
        let inv_std: Vec<R> = var.iter().map(|&v| R::one() / (v + eps).sqrt()).collect();
        let mut x_hat = Tensor::zeros(x.shape());
        let mut y = Tensor::zeros(x.shape());
        for b in 0..n {
            for ch in 0..c {
                let off = (b * c + ch) * hw;
                let (g, be, mu, is) = (
                    self.gamma.value[ch],
                    self.beta.value[ch],
                    mean[ch],
                    inv_std[ch],
                );
                for i in off..off + hw {
                    let xh = (src[i] - mu) * is;
                    x_hat.data_mut()[i] = xh;
                    y.data_mut()[i] = g * xh + be;
                }
            }
        }
        self.cache = Some(Cache {
            x_hat,
            inv_std,
            mode,
        });
        y
    }

    pub fn backward(&mut self, dy: &Tensor<R>) -> Tensor<R> {
        let cache = self
            .cache
            .as_ref()
            .expect("batch-norm backward before forward");
        let (n, c, h, w) = dy.dims4();
        let hw = h * w;
        let count = R::from_usize(n * hw).unwrap();
        let g = dy.data();
        let xh = cache.x_hat.data();
        let mut dx = Tensor::zeros(dy.shape());
        for ch in 0..c {
            let mut sum_dy = R::zero();
            let mut sum_dy_xh = R::zero();
            for b in 0..n {
                let off = (b * c + ch) * hw;
                for i in off..off + hw {
                    sum_dy += g[i];
                    sum_dy_xh += g[i] * xh[i];
                }
            }
            self.gamma.grad[ch] += sum_dy_xh;
            self.beta.grad[ch] += sum_dy;
            let scale = self.gamma.value[ch] * cache.inv_std[ch];
            for b in 0..n {
                let off = (b * c + ch) * hw;
                for i in off..off + hw {
                    dx.data_mut()[i] = match cache.mode {
                        Mode::Train => scale * (g[i] - (sum_dy + xh[i] * sum_dy_xh) / count),
                        Mode::Eval => scale * g[i],
                    };
                }
            }
        }
        dx
    }
}

impl<R: Real> HasParams<R> for BatchNorm2d<R> {
    fn visit(&self, f: &mut dyn FnMut(&Param<R>)) {
        f(&self.gamma);
        f(&self.beta);
        f(&self.running_mean);
        f(&self.running_var);
    }
    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut Param<R>)) {
        f(&mut self.gamma);
        f(&mut self.beta);
        f(&mut self.running_mean);
        f(&mut self.running_var);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn train_mode_normalises_and_updates_running_stats() {
        let mut bn = BatchNorm2d::<f64>::new("bn", 1);
        let x = Tensor::from_vec(&[2, 1, 1, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = bn.forward(&x, Mode::Train);
        let mean: f64 = y.data().iter().sum::<f64>() / 4.0;
        let var: f64 = y.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 4.0;
        assert!(mean.abs() < 1e-12);
        assert!((var - 1.25 / (1.25 + 1e-5)).abs() < 1e-9);
        assert!((bn.running_mean.value[0] - 0.25).abs() < 1e-12);
        // unbiased variance 5/3, momentum 0.1
        assert!((bn.running_var.value[0] - (0.9 + 0.1 * 5.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn eval_mode_uses_running_stats() {
        let mut bn = BatchNorm2d::<f64>::new("bn", 1);
        bn.running_mean.value[0] = 1.0;
        bn.running_var.value[0] = 4.0 - 1e-5;
        let x = Tensor::from_vec(&[1, 1, 1, 1], vec![5.0]).unwrap();
        let y = bn.forward(&x, Mode::Eval);
        assert!((y.data()[0] - 2.0).abs() < 1e-12);
        assert_eq!(bn.running_mean.value[0], 1.0);
    }
}
