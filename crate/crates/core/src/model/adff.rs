use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nn::{HasParams, Mode, Param, SeBlock};
use crate::real::Real;
use crate::tensor::Tensor;

use super::config::{ModelConfig, Variant, CONVS_PER_LEVEL, LEVELS};
use super::head::Head;
use super::sflm::SflmLevel;
use super::temporal::TemporalBranch;

/// Smallest spatial extent that survives five 2× poolings.
const MIN_EXTENT: usize = 1 << LEVELS;

/// Intermediate values of one forward pass.
#[derive(Clone, Debug)]
pub struct Trace<R> {
    /// `S_1..S_5`, each `(batch, C_N, H_N, W_N)`.
    pub spatial: Vec<Tensor<R>>,
    /// SE attention per level, `(batch, C_N)`; absent when SE is not applied.
    pub attention: Vec<Option<Tensor<R>>>,
    /// Per-level fixed-length vectors, `(batch, 2·lstm_hidden)`.
    pub estf: Vec<Tensor<R>>,
    pub fused: Tensor<R>,
    pub output: Tensor<R>,
}

/// Concatenates per-level vectors along the feature axis, in level order.
pub fn fuse<R: Real>(parts: &[Tensor<R>]) -> Result<Tensor<R>> {
    if parts.len() != LEVELS {
        return Err(Error::Shape(format!(
            "fusion needs {LEVELS} levels, got {}",
            parts.len()
        )));
    }
    let n = parts[0].dims2().0;
    let widths: Vec<usize> = parts.iter().map(|p| p.dims2().1).collect();
    if parts.iter().any(|p| p.dims2().0 != n) {
        return Err(Error::Shape("fusion inputs disagree on batch size".into()));
    }
    let total: usize = widths.iter().sum();
    let mut out = Tensor::zeros(&[n, total]);
    for b in 0..n {
        let mut off = 0;
        for (p, &w) in parts.iter().zip(&widths) {
            out.data_mut()[b * total + off..b * total + off + w]
                .copy_from_slice(&p.data()[b * w..(b + 1) * w]);
            off += w;
        }
    }
    Ok(out)
}

fn split<R: Real>(fused: &Tensor<R>, parts: usize) -> Vec<Tensor<R>> {
    let (n, total) = fused.dims2();
    let w = total / parts;
    (0..parts)
        .map(|l| {
            let data = (0..n)
                .flat_map(|b| {
                    fused.data()[b * total + l * w..b * total + (l + 1) * w]
                        .iter()
                        .copied()
                })
                .collect();
            Tensor::from_vec(&[n, w], data).unwrap()
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct Adff<R> {
    config: ModelConfig,
    levels: Vec<SflmLevel<R>>,
    se: Vec<SeBlock<R>>,
    branches: Vec<TemporalBranch<R>>,
    head: Head<R>,
}

impl<R: Real> Adff<R> {
    /// Builds a freshly initialised model; `seed` fixes every weight.
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let channels = config.level_channels();
        let mut levels = Vec::with_capacity(LEVELS);
        let mut se = Vec::with_capacity(LEVELS);
        let mut branches = Vec::with_capacity(LEVELS);
        let mut cin = config.seg_num;
        for (l, &c) in channels.iter().enumerate() {
            let tag = format!("level{}", l + 1);
            levels.push(SflmLevel::new(
                &format!("sflm.{tag}"),
                cin,
                c,
                CONVS_PER_LEVEL[l],
                &mut rng,
            ));
            match config.variant {
                Variant::Full | Variant::NoSe => {
                    se.push(SeBlock::new(
                        &format!("se.{tag}"),
                        c,
                        config.se_reduction,
                        &mut rng,
                    ));
                    branches.push(TemporalBranch::bilstm(
                        &format!("tflm.{tag}"),
                        c,
                        config.lstm_hidden,
                        config.lstm_layers,
                        &mut rng,
                    ));
                }
                Variant::NoTflm => branches.push(TemporalBranch::mean_projection(
                    &format!("pool.{tag}"),
                    c,
                    config.estf_len(),
                    &mut rng,
                )),
            }
            cin = c;
        }
        let head = Head::new(
            config.fused_len(),
            &config.head_dims,
            config.task.arity(),
            &mut rng,
        );
        Ok(Self {
            config,
            levels,
            se,
            branches,
            head,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn head(&self) -> &Head<R> {
        &self.head
    }

    pub fn se_blocks(&self) -> &[SeBlock<R>] {
        &self.se
    }

    pub fn se_blocks_mut(&mut self) -> &mut [SeBlock<R>] {
        &mut self.se
    }

    fn check_input(&self, input: &Tensor<R>) -> Result<()> {
        if input.shape().len() != 4 {
            return Err(Error::Shape(format!(
                "model input must be (batch, seg_num, frames, bands), got {:?}",
                input.shape()
            )));
        }
        let (n, c, h, w) = input.dims4();
        if n == 0 {
            return Err(Error::Shape("empty batch".into()));
        }
        if c != self.config.seg_num {
            return Err(Error::Shape(format!(
                "model expects {} input channels, got {c}",
                self.config.seg_num
            )));
        }
        if h < MIN_EXTENT || w < MIN_EXTENT {
            return Err(Error::Shape(format!(
                "input {h}×{w} is too small for {LEVELS} poolings (need ≥ {MIN_EXTENT} on both axes)"
            )));
        }
        Ok(())
    }

    /// Full forward pass keeping every intermediate.
    pub fn forward_trace(&mut self, input: &Tensor<R>, mode: Mode) -> Result<Trace<R>> {
        self.check_input(input)?;
        let mut spatial = Vec::with_capacity(LEVELS);
        let mut x = input.clone();
        for level in &mut self.levels {
            x = level.forward(&x, mode);
            spatial.push(x.clone());
        }
        let mut attention = Vec::with_capacity(LEVELS);
        let mut estf = Vec::with_capacity(LEVELS);
        for (l, s) in spatial.iter().enumerate() {
            let weighted = match self.config.variant {
                Variant::Full => {
                    let y = self.se[l].forward(s);
                    attention.push(self.se[l].last_attention().cloned());
                    y
                }
                Variant::NoSe | Variant::NoTflm => {
                    attention.push(None);
                    s.clone()
                }
            };
            estf.push(self.branches[l].forward(&weighted));
        }
        let fused = fuse(&estf)?;
        let output = self.head.forward(&fused);
        Ok(Trace {
            spatial,
            attention,
            estf,
            fused,
            output,
        })
    }

    /// `(batch, seg_num, frames, bands)` to `(batch, arity)`.
    pub fn forward(&mut self, input: &Tensor<R>, mode: Mode) -> Result<Tensor<R>> {
        Ok(self.forward_trace(input, mode)?.output)
    }

    /// Accumulates parameter gradients for `d_output` and returns the input
    /// gradient. Must follow a forward pass.
    pub fn backward(&mut self, d_output: &Tensor<R>) -> Tensor<R> {
        let d_fused = self.head.backward(d_output);
        let d_estf = split(&d_fused, LEVELS);
        let mut d_spatial: Vec<Tensor<R>> = Vec::with_capacity(LEVELS);
        for (l, de) in d_estf.iter().enumerate() {
            let g = self.branches[l].backward(de);
            let g = match self.config.variant {
                Variant::Full => self.se[l].backward(&g),
                Variant::NoSe | Variant::NoTflm => g,
            };
            d_spatial.push(g);
        }
        let mut g = d_spatial.pop().expect("five levels");
        for l in (0..LEVELS).rev() {
            g = self.levels[l].backward(&g);
            if l > 0 {
                let branch = d_spatial.pop().expect("branch gradient");
                g.data_mut()
                    .iter_mut()
                    .zip(branch.data())
                    .for_each(|(a, &b)| *a += b);
            }
        }
        g
    }

    /// Every named tensor (parameters and batch-norm statistics) in a fixed
    /// order.
    pub fn named_tensors(&self) -> Vec<(String, Vec<usize>, Vec<R>)> {
        let mut out = Vec::new();
        self.visit(&mut |p| out.push((p.name.clone(), p.shape.clone(), p.value.clone())));
        out
    }

    pub fn all_finite(&self) -> bool {
        let mut ok = true;
        self.visit(&mut |p| ok &= p.value.iter().all(|v| v.is_finite()));
        ok
    }
}

impl<R: Real> HasParams<R> for Adff<R> {
    fn visit(&self, f: &mut dyn FnMut(&Param<R>)) {
        self.levels.iter().for_each(|l| l.visit(f));
        self.se.iter().for_each(|s| s.visit(f));
        self.branches.iter().for_each(|b| b.visit(f));
        self.head.visit(f);
    }
    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut Param<R>)) {
        self.levels.iter_mut().for_each(|l| l.visit_mut(f));
        self.se.iter_mut().for_each(|s| s.visit_mut(f));
        self.branches.iter_mut().for_each(|b| b.visit_mut(f));
        self.head.visit_mut(f);
    }
}
