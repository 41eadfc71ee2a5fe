use rand::Rng;

use crate::real::Real;

/// A named tensor owned by a layer. Buffers (batch-norm running statistics)
/// are stored the same way but are not trainable.
#[derive(Clone, Debug, PartialEq)]
pub struct Param<R> {
    pub name: String,
    pub shape: Vec<usize>,
    pub value: Vec<R>,
    pub grad: Vec<R>,
    pub trainable: bool,
}

impl<R: Real> Param<R> {
    pub fn new(name: impl Into<String>, shape: &[usize], value: Vec<R>) -> Self {
        assert_eq!(shape.iter().product::<usize>(), value.len());
        Self {
            name: name.into(),
            shape: shape.to_vec(),
            grad: vec![R::zero(); value.len()],
            value,
            trainable: true,
        }
    }

    pub fn buffer(name: impl Into<String>, shape: &[usize], value: Vec<R>) -> Self {
        let mut p = Self::new(name, shape, value);
        p.trainable = false;
        p
    }

    pub fn zeros(name: impl Into<String>, shape: &[usize]) -> Self {
        Self::new(name, shape, vec![R::zero(); shape.iter().product()])
    }

    /// Uniform in `[-bound, bound]`.
    pub fn uniform(
        name: impl Into<String>,
        shape: &[usize],
        bound: f64,
        rng: &mut impl Rng,
    ) -> Self {
        let n = shape.iter().product();
        let value = (0..n)
            .map(|_| R::lit(rng.gen_range(-bound..=bound)))
            .collect();
        Self::new(name, shape, value)
    }

    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }

    pub fn zero_grad(&mut self) {
        self.grad.fill(R::zero());
    }
}

/// Visitation over every parameter and buffer in a fixed order.
pub trait HasParams<R: Real> {
    fn visit(&self, f: &mut dyn FnMut(&Param<R>));
    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut Param<R>));

    fn zero_grad(&mut self) {
        self.visit_mut(&mut |p| p.zero_grad());
    }

    fn param_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |p| {
            if p.trainable {
                n += p.len()
            }
        });
        n
    }
}
