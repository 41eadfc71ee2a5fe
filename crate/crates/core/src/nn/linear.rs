use rand::Rng;

use crate::real::{gemm, Real};
use crate::tensor::Tensor;

use super::{HasParams, Param};

/// Affine map `y = x Wᵀ + b` on `(batch, features)`.
#[derive(Clone, Debug)]
pub struct Linear<R> {
    pub weight: Param<R>,
    pub bias: Param<R>,
    input: Option<Tensor<R>>,
}

impl<R: Real> Linear<R> {
    pub fn new(name: &str, in_features: usize, out_features: usize, rng: &mut impl Rng) -> Self {
        let bound = 1.0 / (in_features as f64).sqrt();
        Self {
            weight: Param::uniform(
                format!("{name}.weight"),
                &[out_features, in_features],
                bound,
                rng,
            ),
            bias: Param::uniform(format!("{name}.bias"), &[out_features], bound, rng),
            input: None,
        }
    }

    pub fn in_features(&self) -> usize {
        self.weight.shape[1]
    }

    pub fn out_features(&self) -> usize {
        self.weight.shape[0]
    }

    pub fn forward(&mut self, x: &Tensor<R>) -> Tensor<R> {
        let (n, i) = x.dims2();
        assert_eq!(i, self.in_features(), "linear input features");
        let o = self.out_features();
        let mut y = Tensor::zeros(&[n, o]);
        gemm(
            false,
            true,
            n,
            o,
            i,
            R::one(),
            x.data(),
            &self.weight.value,
            R::zero(),
            y.data_mut(),
        );
        for row in y.data_mut().chunks_mut(o) {
            row.iter_mut()
                .zip(&self.bias.value)
                .for_each(|(v, &b)| *v += b);
        }
        self.input = Some(x.clone());
        y
    }

    pub fn backward(&mut self, dy: &Tensor<R>) -> Tensor<R> {
        let x = self.input.as_ref().expect("linear backward before forward");
        let (n, i) = x.dims2();
        let o = self.out_features();
        gemm(
            true,
            false,
            o,
            i,
            n,
            R::one(),
            dy.data(),
            x.data(),
            R::one(),
            &mut self.weight.grad,
        );
        for row in dy.data().chunks(o) {
            self.bias
                .grad
                .iter_mut()
                .zip(row)
                .for_each(|(g, &d)| *g += d);
        }
        let mut dx = Tensor::zeros(&[n, i]);
        gemm(
            false,
            false,
            n,
            i,
            o,
            R::one(),
            dy.data(),
            &self.weight.value,
            R::zero(),
            dx.data_mut(),
        );
        dx
    }
}

impl<R: Real> HasParams<R> for Linear<R> {
    fn visit(&self, f: &mut dyn FnMut(&Param<R>)) {
        f(&self.weight);
        f(&self.bias);
    }
    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut Param<R>)) {
        f(&mut self.weight);
        f(&mut self.bias);
    }
}
