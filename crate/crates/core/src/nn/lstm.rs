use rand::Rng;

use crate::real::{gemm, sigmoid, Real};
use crate::tensor::Tensor;

use super::{HasParams, Param};

/// One direction of an LSTM layer. Gate order in the stacked weights is
/// input, forget, cell, output.
#[derive(Clone, Debug)]
pub struct LstmDirection<R> {
    pub w_ih: Param<R>,
    pub w_hh: Param<R>,
    pub bias: Param<R>,
    pub hidden: usize,
    pub reverse: bool,
    cache: Option<Cache<R>>,
}

#[derive(Clone, Debug)]
struct Cache<R> {
    x: Tensor<R>,
    /// Post-activation gates, `(batch·time, 4·hidden)`.
    gates: Vec<R>,
    cells: Vec<R>,
    hiddens: Vec<R>,
}

impl<R: Real> LstmDirection<R> {
    pub fn new(name: &str, input: usize, hidden: usize, reverse: bool, rng: &mut impl Rng) -> Self {
        let bound = 1.0 / (hidden as f64).sqrt();
        Self {
            w_ih: Param::uniform(format!("{name}.w_ih"), &[4 * hidden, input], bound, rng),
            w_hh: Param::uniform(format!("{name}.w_hh"), &[4 * hidden, hidden], bound, rng),
            bias: Param::uniform(format!("{name}.bias"), &[4 * hidden], bound, rng),
            hidden,
            reverse,
            cache: None,
        }
    }

    fn input_size(&self) -> usize {
        self.w_ih.shape[1]
    }

    fn order(&self, steps: usize) -> Vec<usize> {
        if self.reverse {
            (0..steps).rev().collect()
        } else {
            (0..steps).collect()
        }
    }

    /// `x: (batch, time, input)` to hidden states `(batch, time, hidden)`.
    pub fn forward(&mut self, x: &Tensor<R>) -> Tensor<R> {
        let (n, steps, inp) = (x.shape()[0], x.shape()[1], x.shape()[2]);
        assert_eq!(inp, self.input_size(), "lstm input size");
        let h = self.hidden;
        let g4 = 4 * h;
        let mut gates = vec![R::zero(); n * steps * g4];
        gemm(
            false,
            true,
            n * steps,
            g4,
            inp,
            R::one(),
            x.data(),
            &self.w_ih.value,
            R::zero(),
            &mut gates,
        );
        let mut cells = vec![R::zero(); n * steps * h];
        let mut hiddens = vec![R::zero(); n * steps * h];
        let mut h_prev = vec![R::zero(); n * h];
        let mut c_prev = vec![R::zero(); n * h];
        let mut rec = vec![R::zero(); n * g4];
        for (s, &t) in self.order(steps).iter().enumerate() {
            if s > 0 {
                gemm(
                    false,
                    true,
                    n,
                    g4,
                    h,
                    R::one(),
                    &h_prev,
                    &self.w_hh.value,
                    R::zero(),
                    &mut rec,
                );
            } else {
                rec.fill(R::zero());
            }
            for b in 0..n {
                let row = (b * steps + t) * g4;
                let gate = &mut gates[row..row + g4];
                for (j, gv) in gate.iter_mut().enumerate() {
                    let pre = *gv + rec[b * g4 + j] + self.bias.value[j];
                    *gv = if (2 * h..3 * h).contains(&j) {
                        pre.tanh()
                    } else {
                        sigmoid(pre)
                    };
                }
                for k in 0..h {
                    let (i, f, g, o) = (gate[k], gate[h + k], gate[2 * h + k], gate[3 * h + k]);
                    let c = f * c_prev[b * h + k] + i * g;
                    let hv = o * c.tanh();
                    cells[(b * steps + t) * h + k] = c;
                    hiddens[(b * steps + t) * h + k] = hv;
                    c_prev[b * h + k] = c;
                    h_prev[b * h + k] = hv;
                }
            }
        }
        let out = Tensor::from_vec(&[n, steps, h], hiddens.clone()).unwrap();
        self.cache = Some(Cache {
            x: x.clone(),
            gates,
            cells,
            hiddens,
        });
        out
    }

    /// Backpropagation through time; returns `d x`.
    pub fn backward(&mut self, dh_out: &Tensor<R>) -> Tensor<R> {
        let cache = self.cache.as_ref().expect("lstm backward before forward");
        let x = &cache.x;
        let (n, steps, inp) = (x.shape()[0], x.shape()[1], x.shape()[2]);
        let h = self.hidden;
        let g4 = 4 * h;
        let order = self.order(steps);
        let mut dgates = vec![R::zero(); n * steps * g4];
        let mut dh_next = vec![R::zero(); n * h];
        let mut dc_next = vec![R::zero(); n * h];
        let mut dg_step = vec![R::zero(); n * g4];
        let mut h_prev = vec![R::zero(); n * h];
        let one = R::one();
        for s in (0..steps).rev() {
            let t = order[s];
            let tp = if s > 0 { Some(order[s - 1]) } else { None };
            for b in 0..n {
                let row = (b * steps + t) * g4;
                let gate = &cache.gates[row..row + g4];
                for k in 0..h {
                    let idx = (b * steps + t) * h + k;
                    let (i, f, g, o) = (gate[k], gate[h + k], gate[2 * h + k], gate[3 * h + k]);
                    let c = cache.cells[idx];
                    let c_prev = tp.map_or(R::zero(), |p| cache.cells[(b * steps + p) * h + k]);
                    let tc = c.tanh();
                    let dh = dh_out.data()[idx] + dh_next[b * h + k];
                    let d_o = dh * tc;
                    let dc = dh * o * (one - tc * tc) + dc_next[b * h + k];
                    dc_next[b * h + k] = dc * f;
                    let dst = &mut dg_step[b * g4..(b + 1) * g4];
                    dst[k] = dc * g * i * (one - i);
                    dst[h + k] = dc * c_prev * f * (one - f);
                    dst[2 * h + k] = dc * i * (one - g * g);
                    dst[3 * h + k] = d_o * o * (one - o);
                }
                dgates[row..row + g4].copy_from_slice(&dg_step[b * g4..(b + 1) * g4]);
            }
            for b in 0..self.bias.len() {
                let mut acc = R::zero();
                for bb in 0..n {
                    acc += dg_step[bb * g4 + b];
                }
                self.bias.grad[b] += acc;
            }
            match tp {
                Some(p) => {
                    for b in 0..n {
                        let src = (b * steps + p) * h;
                        h_prev[b * h..(b + 1) * h].copy_from_slice(&cache.hiddens[src..src + h]);
                    }
                    gemm(
                        true,
                        false,
                        g4,
                        h,
                        n,
                        one,
                        &dg_step,
                        &h_prev,
                        one,
                        &mut self.w_hh.grad,
                    );
                    gemm(
                        false,
                        false,
                        n,
                        h,
                        g4,
                        one,
                        &dg_step,
                        &self.w_hh.value,
                        R::zero(),
                        &mut dh_next,
                    );
                }
                None => dh_next.fill(R::zero()),
            }
        }
        gemm(
            true,
            false,
            g4,
            inp,
            n * steps,
            one,
            &dgates,
            x.data(),
            one,
            &mut self.w_ih.grad,
        );
        let mut dx = Tensor::zeros(&[n, steps, inp]);
        gemm(
            false,
            false,
            n * steps,
            inp,
            g4,
            one,
            &dgates,
            &self.w_ih.value,
            R::zero(),
            dx.data_mut(),
        );
        dx
    }
}

impl<R: Real> HasParams<R> for LstmDirection<R> {
    fn visit(&self, f: &mut dyn FnMut(&Param<R>)) {
        f(&self.w_ih);
        f(&self.w_hh);
        f(&self.bias);
    }
    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut Param<R>)) {
        f(&mut self.w_ih);
        f(&mut self.w_hh);
        f(&mut self.bias);
    }
}

/// Bidirectional layer; outputs `[forward_h, backward_h]` per step.
#[derive(Clone, Debug)]
pub struct BiLstm<R> {
    pub forward_dir: LstmDirection<R>,
    pub backward_dir: LstmDirection<R>,
}

impl<R: Real> BiLstm<R> {
    pub fn new(name: &str, input: usize, hidden: usize, rng: &mut impl Rng) -> Self {
        Self {
            forward_dir: LstmDirection::new(&format!("{name}.fwd"), input, hidden, false, rng),
            backward_dir: LstmDirection::new(&format!("{name}.bwd"), input, hidden, true, rng),
        }
    }

    pub fn forward(&mut self, x: &Tensor<R>) -> Tensor<R> {
        let (n, steps) = (x.shape()[0], x.shape()[1]);
        let h = self.forward_dir.hidden;
        let f = self.forward_dir.forward(x);
        let b = self.backward_dir.forward(x);
        let mut out = Tensor::zeros(&[n, steps, 2 * h]);
        for ((row, fr), br) in out
            .data_mut()
            .chunks_mut(2 * h)
            .zip(f.data().chunks(h))
            .zip(b.data().chunks(h))
        {
            row[..h].copy_from_slice(fr);
            row[h..].copy_from_slice(br);
        }
        out
    }

    pub fn backward(&mut self, dy: &Tensor<R>) -> Tensor<R> {
        let (n, steps) = (dy.shape()[0], dy.shape()[1]);
        let h = self.forward_dir.hidden;
        let mut df = Tensor::zeros(&[n, steps, h]);
        let mut db = Tensor::zeros(&[n, steps, h]);
        for ((row, fr), br) in dy
            .data()
            .chunks(2 * h)
            .zip(df.data_mut().chunks_mut(h))
            .zip(db.data_mut().chunks_mut(h))
        {
            fr.copy_from_slice(&row[..h]);
            br.copy_from_slice(&row[h..]);
        }
        let mut dx = self.forward_dir.backward(&df);
        let dxb = self.backward_dir.backward(&db);
        dx.data_mut()
            .iter_mut()
            .zip(dxb.data())
            .for_each(|(a, &b)| *a += b);
        dx
    }
}

impl<R: Real> HasParams<R> for BiLstm<R> {
    fn visit(&self, f: &mut dyn FnMut(&Param<R>)) {
        self.forward_dir.visit(f);
        self.backward_dir.visit(f);
    }
    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut Param<R>)) {
        self.forward_dir.visit_mut(f);
        self.backward_dir.visit_mut(f);
    }
}

/// Stacked bidirectional LSTM summarising a sequence as
/// `[top forward h at the last step, top backward h at step 0]`.
#[derive(Clone, Debug)]
pub struct StackedBiLstm<R> {
    pub layers: Vec<BiLstm<R>>,
    steps: usize,
}

impl<R: Real> StackedBiLstm<R> {
    pub fn new(name: &str, input: usize, hidden: usize, layers: usize, rng: &mut impl Rng) -> Self {
        let layers = (0..layers)
            .map(|l| {
                let inp = if l == 0 { input } else { 2 * hidden };
                BiLstm::new(&format!("{name}.layer{l}"), inp, hidden, rng)
            })
            .collect();
        Self { layers, steps: 0 }
    }

    pub fn hidden(&self) -> usize {
        self.layers[0].forward_dir.hidden
    }

    /// `(batch, time, features)` to `(batch, 2·hidden)`.
    pub fn forward(&mut self, seq: &Tensor<R>) -> Tensor<R> {
        let (n, steps) = (seq.shape()[0], seq.shape()[1]);
        let h = self.hidden();
        let mut x = seq.clone();
        for layer in &mut self.layers {
            x = layer.forward(&x);
        }
        self.steps = steps;
        let mut e = Tensor::zeros(&[n, 2 * h]);
        for b in 0..n {
            let last = &x.data()[(b * steps + steps - 1) * 2 * h..][..h];
            let first = &x.data()[(b * steps) * 2 * h + h..][..h];
            e.data_mut()[b * 2 * h..b * 2 * h + h].copy_from_slice(last);
            e.data_mut()[b * 2 * h + h..(b + 1) * 2 * h].copy_from_slice(first);
        }
        e
    }

    pub fn backward(&mut self, de: &Tensor<R>) -> Tensor<R> {
        let (n, _) = de.dims2();
        let h = self.hidden();
        let steps = self.steps;
        let mut dy = Tensor::zeros(&[n, steps, 2 * h]);
        for b in 0..n {
            let src = &de.data()[b * 2 * h..(b + 1) * 2 * h];
            dy.data_mut()[(b * steps + steps - 1) * 2 * h..][..h].copy_from_slice(&src[..h]);
            dy.data_mut()[(b * steps) * 2 * h + h..][..h].copy_from_slice(&src[h..]);
        }
        for layer in self.layers.iter_mut().rev() {
            dy = layer.backward(&dy);
        }
        dy
    }
}

impl<R: Real> HasParams<R> for StackedBiLstm<R> {
    fn visit(&self, f: &mut dyn FnMut(&Param<R>)) {
        self.layers.iter().for_each(|l| l.visit(f));
    }
    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut Param<R>)) {
        self.layers.iter_mut().for_each(|l| l.visit_mut(f));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Scalar reference cell for a single sequence.
    fn reference(dir: &LstmDirection<f64>, xs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let h = dir.hidden;
        let inp = xs[0].len();
        let mut hs = vec![vec![0.0; h]; xs.len()];
        let (mut hp, mut cp) = (vec![0.0; h], vec![0.0; h]);
        let order: Vec<usize> = if dir.reverse {
            (0..xs.len()).rev().collect()
        } else {
            (0..xs.len()).collect()
        };
        for t in order {
            let mut pre = vec![0.0; 4 * h];
            for (j, p) in pre.iter_mut().enumerate() {
                *p = dir.bias.value[j];
                for i in 0..inp {
                    *p += dir.w_ih.value[j * inp + i] * xs[t][i];
                }
                for k in 0..h {
                    *p += dir.w_hh.value[j * h + k] * hp[k];
                }
            }
            let s = |v: f64| 1.0 / (1.0 + (-v).exp());
            for k in 0..h {
                let c = s(pre[h + k]) * cp[k] + s(pre[k]) * pre[2 * h + k].tanh();
                cp[k] = c;
                hp[k] = s(pre[3 * h + k]) * c.tanh();
            }
            hs[t] = hp.clone();
        }
        hs
    }

    #[test]
    fn batched_matches_scalar_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for reverse in [false, true] {
            let mut dir = LstmDirection::<f64>::new("l", 3, 2, reverse, &mut rng);
            let data: Vec<f64> = (0..2 * 4 * 3)
                .map(|i| ((i * 13) % 7) as f64 / 7.0 - 0.5)
                .collect();
            let x = Tensor::from_vec(&[2, 4, 3], data.clone()).unwrap();
            let y = dir.forward(&x);
            for b in 0..2 {
                let xs: Vec<Vec<f64>> = (0..4)
                    .map(|t| data[(b * 4 + t) * 3..][..3].to_vec())
                    .collect();
                let want = reference(&dir, &xs);
                for t in 0..4 {
                    for k in 0..2 {
                        let got = y.data()[(b * 4 + t) * 2 + k];
                        assert!((got - want[t][k]).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn summary_length_is_independent_of_sequence_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut lstm = StackedBiLstm::<f64>::new("t", 3, 5, 2, &mut rng);
        for steps in [1, 4, 9] {
            let x = Tensor::zeros(&[2, steps, 3]);
            assert_eq!(lstm.forward(&x).shape(), &[2, 10]);
        }
    }
}
