use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::MlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Sigmoid,
    Linear,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Sigmoid => "sigmoid",
            Activation::Linear => "linear",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "relu" => Some(Activation::Relu),
            "sigmoid" => Some(Activation::Sigmoid),
            "linear" => Some(Activation::Linear),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Activation::Linear => 0,
            Activation::Relu => 1,
            Activation::Sigmoid => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Activation::Linear),
            1 => Some(Activation::Relu),
            2 => Some(Activation::Sigmoid),
            _ => None,
        }
    }

    #[inline]
    pub fn apply<T: Float>(self, z: T) -> T {
        match self {
            Activation::Relu => {
                if z > T::zero() {
                    z
                } else {
                    T::zero()
                }
            }
            Activation::Sigmoid => T::one() / (T::one() + (-z).exp()),
            Activation::Linear => z,
        }
    }

    /// Derivative expressed through the activation output `a = apply(z)`.
    #[inline]
    pub fn derivative_from_output<T: Float>(self, a: T) -> T {
        match self {
            Activation::Relu => {
                if a > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Activation::Sigmoid => a * (T::one() - a),
            Activation::Linear => T::one(),
        }
    }
}

/// Layer widths `[d0, d1, ..., dL]` plus one activation per non-input layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpArchitecture {
    dims: Vec<usize>,
    activations: Vec<Activation>,
}

impl MlpArchitecture {
    pub fn new(dims: Vec<usize>, activations: Vec<Activation>) -> Result<Self, MlError> {
        if dims.len() < 2 {
            return Err(MlError::Architecture(
                "need an input width and at least one layer".into(),
            ));
        }
        if dims.contains(&0) {
            return Err(MlError::Architecture("layer widths must be at least 1".into()));
        }
        if activations.len() != dims.len() - 1 {
            return Err(MlError::Architecture(format!(
                "{} layers but {} activations",
                dims.len() - 1,
                activations.len()
            )));
        }
        Ok(MlpArchitecture { dims, activations })
    }

    /// Hidden layers use `hidden_activation`, the head is a sigmoid.
    pub fn classifier(dims: Vec<usize>, hidden_activation: Activation) -> Result<Self, MlError> {
        let layers = dims.len().saturating_sub(1);
        let mut activations = vec![hidden_activation; layers.saturating_sub(1)];
        if layers > 0 {
            activations.push(Activation::Sigmoid);
        }
        Self::new(dims, activations)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn layer_count(&self) -> usize {
        self.activations.len()
    }

    /// `(in, out)` per layer.
    pub fn layer_shapes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.dims.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn weight_count(&self) -> Result<u64, MlError> {
        self.layer_shapes().try_fold(0u64, |acc, (i, o)| {
            (i as u64)
                .checked_mul(o as u64)
                .and_then(|w| acc.checked_add(w))
                .ok_or(MlError::Overflow)
        })
    }

    pub fn bias_count(&self) -> u64 {
        self.dims[1..].iter().map(|&d| d as u64).sum()
    }

    pub fn param_count(&self) -> Result<u64, MlError> {
        self.weight_count()?
            .checked_add(self.bias_count())
            .ok_or(MlError::Overflow)
    }
}

impl std::fmt::Display for MlpArchitecture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let dims: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        f.write_str(&dims.join(","))
    }
}

/// Fully connected layer; `weights` is `out_dim x in_dim`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer<T = f32> {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
    pub weights: Vec<T>,
    pub biases: Vec<T>,
}

impl<T: Float> DenseLayer<T> {
    pub fn zeros(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        DenseLayer {
            in_dim,
            out_dim,
            activation,
            weights: vec![T::zero(); in_dim * out_dim],
            biases: vec![T::zero(); out_dim],
        }
    }

    #[inline]
    pub fn row(&self, o: usize) -> &[T] {
        &self.weights[o * self.in_dim..(o + 1) * self.in_dim]
    }

    /// `act(W x + b)` written into `out`.
    pub fn forward_into(&self, x: &[T], out: &mut Vec<T>) {
        out.clear();
        out.extend((0..self.out_dim).map(|o| {
            let z = dot(self.row(o), x) + self.biases[o];
            self.activation.apply(z)
        }));
    }

    pub fn cast<U: Float>(&self) -> DenseLayer<U> {
        let conv = |v: &Vec<T>| v.iter().map(|&x| U::from(x).unwrap()).collect();
        DenseLayer {
            in_dim: self.in_dim,
            out_dim: self.out_dim,
            activation: self.activation,
            weights: conv(&self.weights),
            biases: conv(&self.biases),
        }
    }
}

/// Dot product with a fixed summation order (four interleaved partial sums).
#[inline]
pub(crate) fn dot<T: Float>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [T::zero(); 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = c * 4;
        acc[0] = acc[0] + a[i] * b[i];
        acc[1] = acc[1] + a[i + 1] * b[i + 1];
        acc[2] = acc[2] + a[i + 2] * b[i + 2];
        acc[3] = acc[3] + a[i + 3] * b[i + 3];
    }
    let mut tail = T::zero();
    for i in chunks * 4..a.len() {
        tail = tail + a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Class decision and raw output scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub class: usize,
    pub scores: Vec<f32>,
}

impl Prediction {
    /// Argmax with ties resolved to the lowest class index. A single-unit
    /// head is read as P(class 1) with threshold 0.5.
    pub fn from_scores(scores: Vec<f32>) -> Self {
        let class = if scores.len() == 1 {
            usize::from(scores[0] > 0.5)
        } else {
            let mut best = 0;
            for (i, &s) in scores.iter().enumerate().skip(1) {
                if s > scores[best] {
                    best = i;
                }
            }
            best
        };
        Prediction { class, scores }
    }
}

/// Anything that maps a feature vector to a class.
pub trait Classifier {
    fn input_dim(&self) -> usize;
    fn predict(&self, x: &[f32]) -> Result<Prediction, MlError>;
}

/// A dense feed-forward network with float32 parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    layers: Vec<DenseLayer<f32>>,
}

impl MlpModel {
    pub fn from_layers(layers: Vec<DenseLayer<f32>>) -> Result<Self, MlError> {
        if layers.is_empty() {
            return Err(MlError::Architecture("model has no layers".into()));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.in_dim == 0 || l.out_dim == 0 {
                return Err(MlError::Architecture(format!("layer {i} has a zero dimension")));
            }
            if l.weights.len() != l.in_dim * l.out_dim || l.biases.len() != l.out_dim {
                return Err(MlError::Architecture(format!(
                    "layer {i} parameter shapes do not match {}x{}",
                    l.out_dim, l.in_dim
                )));
            }
            if i > 0 && layers[i - 1].out_dim != l.in_dim {
                return Err(MlError::Architecture(format!(
                    "layer {i} expects {} inputs but the previous layer has {} outputs",
                    l.in_dim,
                    layers[i - 1].out_dim
                )));
            }
        }
        Ok(MlpModel { layers })
    }

    pub fn zeros(arch: &MlpArchitecture) -> Self {
        let layers = arch
            .layer_shapes()
            .zip(arch.activations())
            .map(|((i, o), &act)| DenseLayer::zeros(i, o, act))
            .collect();
        MlpModel { layers }
    }

    /// Scaled-uniform initialization, bound `sqrt(6 / (in + out))` per layer,
    /// zero biases. Deterministic for a given seed on every platform.
    pub fn init(arch: &MlpArchitecture, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut model = Self::zeros(arch);
        for layer in &mut model.layers {
            let bound = (6.0 / (layer.in_dim + layer.out_dim) as f64).sqrt() as f32;
            for w in &mut layer.weights {
                *w = rng.gen_range(-bound..=bound);
            }
        }
        model
    }

    pub fn layers(&self) -> &[DenseLayer<f32>] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [DenseLayer<f32>] {
        &mut self.layers
    }

    pub fn architecture(&self) -> MlpArchitecture {
        let mut dims = vec![self.layers[0].in_dim];
        dims.extend(self.layers.iter().map(|l| l.out_dim));
        MlpArchitecture {
            dims,
            activations: self.layers.iter().map(|l| l.activation).collect(),
        }
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().out_dim
    }

    /// Output activations for one input vector.
    pub fn forward(&self, x: &[f32]) -> Result<Vec<f32>, MlError> {
        if x.len() != self.input_dim() {
            return Err(MlError::Dimension {
                expected: self.input_dim(),
                found: x.len(),
            });
        }
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        for layer in &self.layers {
            layer.forward_into(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }
}

impl Classifier for MlpModel {
    fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    fn predict(&self, x: &[f32]) -> Result<Prediction, MlError> {
        Ok(Prediction::from_scores(self.forward(x)?))
    }
}

/// Runs `model` on `x`; see [`Prediction::from_scores`] for the decision rule.
pub fn predict(model: &impl Classifier, x: &[f32]) -> Result<Prediction, MlError> {
    model.predict(x)
}
