use crate::real::Real;
use crate::tensor::Tensor;

#[derive(Clone, Debug, Default)]
pub struct Relu {
    mask: Vec<bool>,
}

impl Relu {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn forward<R: Real>(&mut self, x: &Tensor<R>) -> Tensor<R> {
        self.mask = x.data().iter().map(|&v| v > R::zero()).collect();
        x.map(|v| if v > R::zero() { v } else { R::zero() })
    }

    pub fn backward<R: Real>(&self, dy: &Tensor<R>) -> Tensor<R> {
        assert_eq!(dy.len(), self.mask.len(), "relu backward before forward");
        let data = dy
            .data()
            .iter()
            .zip(&self.mask)
            .map(|(&g, &m)| if m { g } else { R::zero() })
            .collect();
        Tensor::from_vec(dy.shape(), data).unwrap()
    }
}
