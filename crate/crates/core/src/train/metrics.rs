use crate::error::{Error, Result};

fn check_lengths(pred: usize, target: usize) -> Result<()> {
    if pred != target || pred == 0 {
        return Err(Error::Shape(format!(
            "{pred} predictions for {target} targets"
        )));
    }
    Ok(())
}

pub fn rmse(pred: &[f64], target: &[f64]) -> Result<f64> {
    check_lengths(pred.len(), target.len())?;
    let sse: f64 = pred.iter().zip(target).map(|(p, t)| (t - p).powi(2)).sum();
    Ok((sse / pred.len() as f64).sqrt())
}

/// Coefficient of determination `1 − SS_res / SS_tot`.
pub fn r2_score(pred: &[f64], target: &[f64]) -> Result<f64> {
    check_lengths(pred.len(), target.len())?;
    if pred.len() < 2 {
        return Err(Error::InvalidInput("R² needs at least two samples".into()));
    }
    let mean = target.iter().sum::<f64>() / target.len() as f64;
    let ss_tot: f64 = target.iter().map(|t| (t - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::R2Undefined);
    }
    let ss_res: f64 = pred.iter().zip(target).map(|(p, t)| (t - p).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

pub fn accuracy(pred: &[usize], target: &[usize]) -> Result<f64> {
    check_lengths(pred.len(), target.len())?;
    let hits = pred.iter().zip(target).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / pred.len() as f64)
}

/// Arithmetic mean and sample standard deviation (`n − 1`).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// `mean±std` with four and two decimals, e.g. `0.6394±0.02`.
pub fn format_mean_std(mean: f64, std: f64) -> String {
    format!("{mean:.4}±{std:.2}")
}
