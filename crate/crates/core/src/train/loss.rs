use crate::error::{Error, Result};
use crate::real::Real;
use crate::tensor::Tensor;

/// Mean squared error over every element, with its gradient.
pub fn mse_loss_with_grad<R: Real>(
    pred: &Tensor<R>,
    target: &Tensor<R>,
) -> Result<(f64, Tensor<R>)> {
    if pred.shape() != target.shape() || pred.is_empty() {
        return Err(Error::Shape(format!(
            "mse: prediction {:?} vs target {:?}",
            pred.shape(),
            target.shape()
        )));
    }
    let n = pred.len() as f64;
    let mut loss = 0.0;
    let scale = R::lit(2.0 / n);
    let grad = pred
        .data()
        .iter()
        .zip(target.data())
        .map(|(&p, &t)| {
            let d = p - t;
            loss += d.as_f64() * d.as_f64();
            d * scale
        })
        .collect();
    Ok((loss / n, Tensor::from_vec(pred.shape(), grad)?))
}

pub fn mse_loss<R: Real>(pred: &Tensor<R>, target: &Tensor<R>) -> Result<f64> {
    mse_loss_with_grad(pred, target).map(|(l, _)| l)
}

/// Softmax cross-entropy of `(batch, classes)` logits, averaged over the
/// batch, with its gradient.
pub fn ce_loss_with_grad<R: Real>(
    logits: &Tensor<R>,
    classes: &[usize],
) -> Result<(f64, Tensor<R>)> {
    if logits.shape().len() != 2 {
        return Err(Error::Shape(format!(
            "logits must be rank 2, got {:?}",
            logits.shape()
        )));
    }
    let (n, k) = logits.dims2();
    if n != classes.len() || n == 0 {
        return Err(Error::Shape(format!(
            "{n} logit rows for {} labels",
            classes.len()
        )));
    }
    if let Some(&c) = classes.iter().find(|&&c| c >= k) {
        return Err(Error::InvalidInput(format!(
            "class index {c} out of range for {k} classes"
        )));
    }
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(n * k);
    for (row, &c) in logits.data().chunks(k).zip(classes) {
        let row: Vec<f64> = row.iter().map(|v| v.as_f64()).collect();
        let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = row.iter().map(|v| (v - m).exp()).sum();
        let lse = m + sum.ln();
        loss += lse - row[c];
        for (j, &v) in row.iter().enumerate() {
            let p = (v - lse).exp();
            let onehot = if j == c { 1.0 } else { 0.0 };
            grad.push(R::lit((p - onehot) / n as f64));
        }
    }
    Ok((loss / n as f64, Tensor::from_vec(&[n, k], grad)?))
}

pub fn ce_loss<R: Real>(logits: &Tensor<R>, classes: &[usize]) -> Result<f64> {
    ce_loss_with_grad(logits, classes).map(|(l, _)| l)
}
