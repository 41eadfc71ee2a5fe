use rand::Rng;

use crate::nn::{HasParams, Linear, Param, Relu};
use crate::real::Real;
use crate::tensor::Tensor;

/// Fully connected prediction head: hidden layers with ReLU, then a final
/// affine map to the task arity (raw regression values or logits).
#[derive(Clone, Debug)]
pub struct Head<R> {
    layers: Vec<Linear<R>>,
    relus: Vec<Relu>,
}

impl<R: Real> Head<R> {
    pub fn new(input: usize, hidden: &[usize], arity: usize, rng: &mut impl Rng) -> Self {
        let mut dims = vec![input];
        dims.extend_from_slice(hidden);
        dims.push(arity);
        let layers: Vec<Linear<R>> = dims
            .windows(2)
            .enumerate()
            .map(|(i, d)| Linear::new(&format!("head.fc{i}"), d[0], d[1], rng))
            .collect();
        let relus = vec![Relu::new(); layers.len() - 1];
        Self { layers, relus }
    }

    pub fn layers(&self) -> &[Linear<R>] {
        &self.layers
    }

    pub fn forward(&mut self, e: &Tensor<R>) -> Tensor<R> {
        let mut y = e.clone();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter_mut().enumerate() {
            y = layer.forward(&y);
            if i < last {
                y = self.relus[i].forward(&y);
            }
        }
        y
    }

    pub fn backward(&mut self, dy: &Tensor<R>) -> Tensor<R> {
        let mut g = dy.clone();
        let last = self.layers.len() - 1;
        for i in (0..self.layers.len()).rev() {
            if i < last {
                g = self.relus[i].backward(&g);
            }
            g = self.layers[i].backward(&g);
        }
        g
    }
}

impl<R: Real> HasParams<R> for Head<R> {
    fn visit(&self, f: &mut dyn FnMut(&Param<R>)) {
        self.layers.iter().for_each(|l| l.visit(f));
    }
    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut Param<R>)) {
        self.layers.iter_mut().for_each(|l| l.visit_mut(f));
    }
}
