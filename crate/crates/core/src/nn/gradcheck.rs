//! Central finite-difference oracle for analytic gradients.
//!
//! Losses are probed as `L = Σ y ⊙ r` for a fixed random projection `r`, so
//! `dL/dy = r` is what the analytic backward pass receives.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{HasParams, Param};
use crate::tensor::Tensor;

pub const STEP: f64 = 1e-6;

/// Largest mismatch seen by a check.
#[derive(Clone, Debug, Default)]
pub struct GradReport {
    pub checked: usize,
    pub worst_rel: f64,
    pub worst_name: String,
    pub worst_analytic: f64,
    pub worst_numeric: f64,
}

impl GradReport {
    pub fn record(&mut self, name: &str, analytic: f64, numeric: f64) {
        self.checked += 1;
        let rel = relative_error(analytic, numeric);
        if rel > self.worst_rel {
            self.worst_rel = rel;
            self.worst_name = name.to_string();
            self.worst_analytic = analytic;
            self.worst_numeric = numeric;
        }
    }

    pub fn merge(&mut self, other: GradReport) {
        self.checked += other.checked;
        if other.worst_rel > self.worst_rel {
            self.worst_rel = other.worst_rel;
            self.worst_name = other.worst_name;
            self.worst_analytic = other.worst_analytic;
            self.worst_numeric = other.worst_numeric;
        }
    }
}

/// Gradients smaller than this are compared absolutely: with [`STEP`] and a
/// unit-scale loss, double-precision round-off alone leaves ~1e-10 of noise in
/// a central difference.
pub const SCALE_FLOOR: f64 = 1e-6;

/// `|a - n| / max(|a|, |n|, SCALE_FLOOR)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let diff = (analytic - numeric).abs();
    diff / analytic.abs().max(numeric.abs()).max(SCALE_FLOOR)
}

pub fn random_tensor(shape: &[usize], seed: u64) -> Tensor<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = shape.iter().product();
    Tensor::from_vec(shape, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

pub fn dot(a: &Tensor<f64>, b: &Tensor<f64>) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum()
}

/// Compares `input_grad` against central differences of `loss` with respect
/// to every element of `input`.
pub fn check_input(
    input: &Tensor<f64>,
    input_grad: &Tensor<f64>,
    mut loss: impl FnMut(&Tensor<f64>) -> f64,
) -> GradReport {
    let mut report = GradReport::default();
    let mut x = input.clone();
    for i in 0..x.len() {
        let orig = x.data()[i];
        x.data_mut()[i] = orig + STEP;
        let plus = loss(&x);
        x.data_mut()[i] = orig - STEP;
        let minus = loss(&x);
        x.data_mut()[i] = orig;
        report.record(
            &format!("input[{i}]"),
            input_grad.data()[i],
            (plus - minus) / (2.0 * STEP),
        );
    }
    report
}

/// Compares accumulated `grad` of every trainable parameter of `module`
/// against central differences of `loss`. At most `max_per_param` entries of
/// each tensor are probed (evenly strided).
pub fn check_params<M: HasParams<f64>>(
    module: &mut M,
    max_per_param: usize,
    mut loss: impl FnMut(&mut M) -> f64,
) -> GradReport {
    let mut targets: Vec<(String, usize, f64)> = Vec::new();
    module.visit(&mut |p: &Param<f64>| {
        if !p.trainable {
            return;
        }
        let stride = (p.len() / max_per_param.max(1)).max(1);
        for i in (0..p.len()).step_by(stride).take(max_per_param) {
            targets.push((p.name.clone(), i, p.grad[i]));
        }
    });
    let mut report = GradReport::default();
    for (name, idx, analytic) in targets {
        let nudge = |m: &mut M, delta: f64| {
            m.visit_mut(&mut |p| {
                if p.name == name {
                    p.value[idx] += delta;
                }
            })
        };
        nudge(module, STEP);
        let plus = loss(module);
        nudge(module, -2.0 * STEP);
        let minus = loss(module);
        nudge(module, STEP);
        report.record(
            &format!("{name}[{idx}]"),
            analytic,
            (plus - minus) / (2.0 * STEP),
        );
    }
    report
}
