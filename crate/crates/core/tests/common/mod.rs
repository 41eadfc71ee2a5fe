//! Shared helpers for the integration and acceptance tests.

#![allow(dead_code)]

use adff::model::{Adff, ModelConfig, Task, Variant};
use adff::nn::gradcheck::{check_input, check_params, dot, random_tensor, GradReport};
use adff::nn::{
    frequency_mean, frequency_mean_backward, spatial_mean, spatial_mean_backward, BatchNorm2d,
    Conv2d, HasParams, Linear, MaxPool2, Mode, Relu, SeBlock, StackedBiLstm,
};
use adff::real::sigmoid;
use adff::tensor::Tensor;
use adff::train::{ce_loss, ce_loss_with_grad, mse_loss, mse_loss_with_grad};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Relative-error bound for every finite-difference comparison.
pub const GRAD_TOLERANCE: f64 = 1e-4;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random values bounded away from zero so kinks are never straddled.
fn off_zero(shape: &[usize], seed: u64) -> Tensor<f64> {
    random_tensor(shape, seed).map(|v| {
        if v.abs() < 0.05 {
            v + 0.1 * v.signum() + 0.1
        } else {
            v
        }
    })
}

/// Checks input and parameter gradients of a layer under the projected loss
/// `Σ forward(x) ⊙ r`.
fn check_layer<M: HasParams<f64>>(
    mut layer: M,
    x: Tensor<f64>,
    forward: impl Fn(&mut M, &Tensor<f64>) -> Tensor<f64>,
    backward: impl Fn(&mut M, &Tensor<f64>) -> Tensor<f64>,
) -> GradReport {
    let y = forward(&mut layer, &x);
    let r = random_tensor(y.shape(), 999);
    layer.zero_grad();
    let dx = backward(&mut layer, &r);
    let mut report = check_input(&x, &dx, |xp| dot(&forward(&mut layer, xp), &r));
    forward(&mut layer, &x);
    report.merge(check_params(&mut layer, 64, |m| dot(&forward(m, &x), &r)));
    report
}

/// Input-only check for a parameter-free operation.
fn check_op(
    x: Tensor<f64>,
    forward: impl Fn(&Tensor<f64>) -> Tensor<f64>,
    backward: impl Fn(&Tensor<f64>, &Tensor<f64>) -> Tensor<f64>,
) -> GradReport {
    let y = forward(&x);
    let r = random_tensor(y.shape(), 998);
    let dx = backward(&x, &r);
    check_input(&x, &dx, |xp| dot(&forward(xp), &r))
}

pub fn grad_conv() -> GradReport {
    let conv = Conv2d::<f64>::new("conv", 3, 5, &mut rng(1));
    check_layer(
        conv,
        random_tensor(&[2, 3, 5, 6], 2),
        |m, x| m.forward(x),
        |m, d| m.backward(d),
    )
}

pub fn grad_batchnorm_train() -> GradReport {
    let mut bn = BatchNorm2d::<f64>::new("bn", 4);
    bn.gamma.value = random_tensor(&[4], 3).into_data();
    bn.beta.value = random_tensor(&[4], 4).into_data();
    check_layer(
        bn,
        random_tensor(&[3, 4, 5, 4], 5),
        |m, x| m.forward(x, Mode::Train),
        |m, d| m.backward(d),
    )
}

pub fn grad_batchnorm_eval() -> GradReport {
    let mut bn = BatchNorm2d::<f64>::new("bn", 6);
    bn.gamma.value = random_tensor(&[6], 6).into_data();
    bn.beta.value = random_tensor(&[6], 7).into_data();
    bn.running_mean.value = random_tensor(&[6], 8).into_data();
    bn.running_var.value = random_tensor(&[6], 9).map(|v| 0.5 + v.abs()).into_data();
    check_layer(
        bn,
        random_tensor(&[2, 6, 3, 5], 10),
        |m, x| m.forward(x, Mode::Eval),
        |m, d| m.backward(d),
    )
}

pub fn grad_relu() -> GradReport {
    let x = off_zero(&[2, 4, 6, 6], 11);
    check_op(
        x,
        |x| Relu::new().forward(x),
        |x, d| {
            let mut relu = Relu::new();
            relu.forward(x);
            relu.backward(d)
        },
    )
}

pub fn grad_maxpool() -> GradReport {
    check_op(
        random_tensor(&[2, 3, 6, 5], 12),
        |x| MaxPool2::new().forward(x),
        |x, d| {
            let mut pool = MaxPool2::new();
            pool.forward(x);
            pool.backward(d)
        },
    )
}

pub fn grad_logistic() -> GradReport {
    let x = random_tensor(&[4, 8], 13).map(|v| 4.0 * v);
    check_op(
        x,
        |x| x.map(sigmoid),
        |x, d| {
            let mut g = x.map(|v| sigmoid(v) * (1.0 - sigmoid(v)));
            g.data_mut()
                .iter_mut()
                .zip(d.data())
                .for_each(|(a, b)| *a *= b);
            g
        },
    )
}

pub fn grad_lstm() -> GradReport {
    let lstm = StackedBiLstm::<f64>::new("lstm", 3, 4, 2, &mut rng(14));
    check_layer(
        lstm,
        random_tensor(&[2, 5, 3], 15),
        |m, x| m.forward(x),
        |m, d| m.backward(d),
    )
}

pub fn grad_affine() -> GradReport {
    let fc = Linear::<f64>::new("fc", 7, 5, &mut rng(16));
    check_layer(
        fc,
        random_tensor(&[3, 7], 17),
        |m, x| m.forward(x),
        |m, d| m.backward(d),
    )
}

pub fn grad_frequency_mean() -> GradReport {
    let mut report = check_op(random_tensor(&[2, 5, 4, 6], 18), frequency_mean, |x, d| {
        let (_, c, _, w) = x.dims4();
        frequency_mean_backward(d, c, w)
    });
    report.merge(check_op(
        random_tensor(&[2, 5, 4, 6], 19),
        spatial_mean,
        |x, d| {
            let (_, _, h, w) = x.dims4();
            spatial_mean_backward(d, h, w)
        },
    ));
    report
}

pub fn grad_se() -> GradReport {
    let se = SeBlock::<f64>::new("se", 8, 2, &mut rng(20));
    check_layer(
        se,
        random_tensor(&[2, 8, 4, 5], 21),
        |m, x| m.forward(x),
        |m, d| m.backward(d),
    )
}

pub fn grad_mse_loss() -> GradReport {
    let target = random_tensor(&[4, 2], 22);
    let pred = random_tensor(&[4, 2], 23);
    let (_, grad) = mse_loss_with_grad(&pred, &target).unwrap();
    check_input(&pred, &grad, |p| mse_loss(p, &target).unwrap())
}

pub fn grad_ce_loss() -> GradReport {
    let classes = [0, 3, 1, 2, 3];
    let logits = random_tensor(&[5, 4], 24).map(|v| 3.0 * v);
    let (_, grad) = ce_loss_with_grad(&logits, &classes).unwrap();
    check_input(&logits, &grad, |l| ce_loss(l, &classes).unwrap())
}

/// The smallest model the architecture admits, in double precision.
pub fn tiny_config(task: Task, variant: Variant) -> ModelConfig {
    ModelConfig {
        seg_num: 2,
        width: 1.0 / 64.0,
        se_reduction: 2,
        lstm_hidden: 3,
        lstm_layers: 2,
        head_dims: vec![6, 5],
        task,
        variant,
    }
}

/// End-to-end check through every level, SE block, LSTM and the head.
pub fn grad_whole_model(variant: Variant) -> GradReport {
    let mut model = Adff::<f64>::new(tiny_config(Task::Multi, variant), 25).unwrap();
    let x = random_tensor(&[2, 2, 32, 32], 26);
    let y = model.forward(&x, Mode::Train).unwrap();
    let r = random_tensor(y.shape(), 27);
    model.zero_grad();
    let dx = model.backward(&r);
    let mut report = check_params(&mut model, 4, |m| {
        dot(&m.forward(&x, Mode::Train).unwrap(), &r)
    });
    // Probing all 2048 inputs is slow; a strided subset suffices.
    let idx: Vec<usize> = (0..x.len()).step_by(37).collect();
    let mut xp = x.clone();
    for &i in &idx {
        let orig = xp.data()[i];
        let mut at = |v: f64| {
            xp.data_mut()[i] = v;
            dot(&model.forward(&xp, Mode::Train).unwrap(), &r)
        };
        let numeric = (at(orig + 1e-6) - at(orig - 1e-6)) / 2e-6;
        xp.data_mut()[i] = orig;
        report.record(&format!("input[{i}]"), dx.data()[i], numeric);
    }
    report
}

/// Every gradient case with its name.
pub fn gradient_suite() -> Vec<(&'static str, GradReport)> {
    vec![
        ("conv", grad_conv()),
        ("batch-norm train", grad_batchnorm_train()),
        ("batch-norm eval", grad_batchnorm_eval()),
        ("relu", grad_relu()),
        ("max-pool", grad_maxpool()),
        ("logistic", grad_logistic()),
        ("lstm", grad_lstm()),
        ("affine", grad_affine()),
        ("frequency/spatial mean", grad_frequency_mean()),
        ("se block", grad_se()),
        ("mse loss", grad_mse_loss()),
        ("cross-entropy loss", grad_ce_loss()),
        ("whole model", grad_whole_model(Variant::Full)),
        (
            "whole model without tflm",
            grad_whole_model(Variant::NoTflm),
        ),
    ]
}
