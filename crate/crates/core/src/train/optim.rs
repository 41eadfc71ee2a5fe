use crate::error::{Error, Result};
use crate::nn::HasParams;
use crate::real::Real;

/// Adam with coupled (L2-style) weight decay: `g ← g + λ·θ` before the
/// moment updates.
#[derive(Clone, Debug)]
pub struct Adam<R> {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: u64,
    first: Vec<Vec<R>>,
    second: Vec<Vec<R>>,
}

impl<R: Real> Default for Adam<R> {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            first: Vec::new(),
            second: Vec::new(),
        }
    }
}

impl<R: Real> Adam<R> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    /// Applies one update to every trainable parameter of `model`. Fails
    /// without touching anything if a gradient is non-finite.
    pub fn step<M: HasParams<R>>(
        &mut self,
        model: &mut M,
        lr: f64,
        weight_decay: f64,
    ) -> Result<()> {
        let mut bad = None;
        model.visit(&mut |p| {
            if bad.is_none() && p.trainable && p.grad.iter().any(|g| !g.is_finite()) {
                bad = Some(p.name.clone());
            }
        });
        if let Some(param) = bad {
            return Err(Error::NonFiniteGradient {
                param,
                step: self.step + 1,
            });
        }
        self.step += 1;
        let t = self.step as i32;
        let (b1, b2) = (R::lit(self.beta1), R::lit(self.beta2));
        let (one_b1, one_b2) = (R::lit(1.0 - self.beta1), R::lit(1.0 - self.beta2));
        let bc1 = R::lit(1.0 - self.beta1.powi(t));
        let bc2 = R::lit(1.0 - self.beta2.powi(t));
        let lr = R::lit(lr);
        let wd = R::lit(weight_decay);
        let eps = R::lit(self.eps);
        let mut idx = 0;
        let (first, second) = (&mut self.first, &mut self.second);
        model.visit_mut(&mut |p| {
            if !p.trainable {
                return;
            }
            if first.len() == idx {
                first.push(vec![R::zero(); p.len()]);
                second.push(vec![R::zero(); p.len()]);
            }
            let (m, v) = (&mut first[idx], &mut second[idx]);
            for i in 0..p.len() {
                let g = p.grad[i] + wd * p.value[i];
                m[i] = b1 * m[i] + one_b1 * g;
                v[i] = b2 * v[i] + one_b2 * g * g;
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                p.value[i] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
            idx += 1;
        });
        Ok(())
    }
}
