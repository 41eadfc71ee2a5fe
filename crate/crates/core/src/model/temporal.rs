use rand::Rng;

use crate::nn::{
    frequency_mean, frequency_mean_backward, spatial_mean, spatial_mean_backward, HasParams,
    Linear, Param, StackedBiLstm,
};
use crate::real::Real;
use crate::tensor::Tensor;

/// Turns one level's feature map into a fixed-length vector.
#[derive(Clone, Debug)]
pub enum TemporalBranch<R> {
    /// Frequency-mean sequence through a stacked bidirectional LSTM.
    BiLstm {
        lstm: StackedBiLstm<R>,
        input_shape: Vec<usize>,
    },
    /// Spatial mean through an affine map (the ablation without temporal
    /// learning).
    MeanProjection {
        proj: Linear<R>,
        input_shape: Vec<usize>,
    },
}

impl<R: Real> TemporalBranch<R> {
    pub fn bilstm(
        name: &str,
        channels: usize,
        hidden: usize,
        layers: usize,
        rng: &mut impl Rng,
    ) -> Self {
        TemporalBranch::BiLstm {
            lstm: StackedBiLstm::new(name, channels, hidden, layers, rng),
            input_shape: Vec::new(),
        }
    }

    pub fn mean_projection(name: &str, channels: usize, out: usize, rng: &mut impl Rng) -> Self {
        TemporalBranch::MeanProjection {
            proj: Linear::new(&format!("{name}.proj"), channels, out, rng),
            input_shape: Vec::new(),
        }
    }

    pub fn forward(&mut self, s: &Tensor<R>) -> Tensor<R> {
        match self {
            TemporalBranch::BiLstm { lstm, input_shape } => {
                *input_shape = s.shape().to_vec();
                lstm.forward(&frequency_mean(s))
            }
            TemporalBranch::MeanProjection { proj, input_shape } => {
                *input_shape = s.shape().to_vec();
                proj.forward(&spatial_mean(s))
            }
        }
    }

    pub fn backward(&mut self, de: &Tensor<R>) -> Tensor<R> {
        match self {
            TemporalBranch::BiLstm { lstm, input_shape } => {
                let dseq = lstm.backward(de);
                frequency_mean_backward(&dseq, input_shape[1], input_shape[3])
            }
            TemporalBranch::MeanProjection { proj, input_shape } => {
                let dz = proj.backward(de);
                spatial_mean_backward(&dz, input_shape[2], input_shape[3])
            }
        }
    }
}

impl<R: Real> HasParams<R> for TemporalBranch<R> {
    fn visit(&self, f: &mut dyn FnMut(&Param<R>)) {
        match self {
            TemporalBranch::BiLstm { lstm, .. } => lstm.visit(f),
            TemporalBranch::MeanProjection { proj, .. } => proj.visit(f),
        }
    }
    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut Param<R>)) {
        match self {
            TemporalBranch::BiLstm { lstm, .. } => lstm.visit_mut(f),
            TemporalBranch::MeanProjection { proj, .. } => proj.visit_mut(f),
        }
    }
}
