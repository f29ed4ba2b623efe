use serde::{Deserialize, Serialize};

use crate::mlcore::{Activation, Classifier, MlError, MlpModel, Prediction};

use super::ConvError;

/// One dense layer with int8 weights under a per-tensor affine map
/// `w = scale * (q - zero_point)`; biases stay float32.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizedLayer {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
    /// Strictly positive.
    pub scale: f32,
    /// Within `[-128, 127]`.
    pub zero_point: i32,
    /// `out_dim x in_dim`, row-major.
    pub weights: Vec<i8>,
    pub biases: Vec<f32>,
}

impl QuantizedLayer {
    pub fn dequantize(&self, q: i8) -> f32 {
        self.scale * (i32::from(q) - self.zero_point) as f32
    }

    fn forward_into(&self, x: &[f32], out: &mut Vec<f32>) {
        let z = self.zero_point as f32;
        out.clear();
        for o in 0..self.out_dim {
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            let mut acc = [0.0f32; 4];
            let chunks = row.len() / 4;
            for c in 0..chunks {
                let i = c * 4;
                for k in 0..4 {
                    acc[k] += (f32::from(row[i + k]) - z) * x[i + k];
                }
            }
            let mut tail = 0.0f32;
            for i in chunks * 4..row.len() {
                tail += (f32::from(row[i]) - z) * x[i];
            }
            let sum = (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail;
            out.push(self.activation.apply(self.scale * sum + self.biases[o]));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizedMlpModel {
    layers: Vec<QuantizedLayer>,
}

impl QuantizedMlpModel {
    pub fn from_layers(layers: Vec<QuantizedLayer>) -> Result<Self, ConvError> {
        if layers.is_empty() {
            return Err(ConvError::Shape("model has no layers".into()));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.in_dim == 0 || l.out_dim == 0 {
                return Err(ConvError::Shape(format!("layer {i} has a zero dimension")));
            }
            if l.weights.len() != l.in_dim * l.out_dim || l.biases.len() != l.out_dim {
                return Err(ConvError::Shape(format!(
                    "layer {i} parameter shapes do not match {}x{}",
                    l.out_dim, l.in_dim
                )));
            }
            if !(l.scale > 0.0 && l.scale.is_finite()) {
                return Err(ConvError::Shape(format!("layer {i} scale must be positive")));
            }
            if !(-128..=127).contains(&l.zero_point) {
                return Err(ConvError::Shape(format!(
                    "layer {i} zero point {} is outside the int8 range",
                    l.zero_point
                )));
            }
            if i > 0 && layers[i - 1].out_dim != l.in_dim {
                return Err(ConvError::Shape(format!(
                    "layer {i} expects {} inputs but the previous layer has {} outputs",
                    l.in_dim,
                    layers[i - 1].out_dim
                )));
            }
        }
        Ok(QuantizedMlpModel { layers })
    }

    pub fn layers(&self) -> &[QuantizedLayer] {
        &self.layers
    }

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

impl Classifier for QuantizedMlpModel {
    fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    fn predict(&self, x: &[f32]) -> Result<Prediction, MlError> {
        Ok(Prediction::from_scores(self.forward(x)?))
    }
}

/// Quantized inference; same decision rule as the float path.
pub fn predict_quantized(model: &QuantizedMlpModel, x: &[f32]) -> Result<Prediction, MlError> {
    model.predict(x)
}

/// Smallest f32 not below `v`.
fn f32_at_least(v: f64) -> f32 {
    let f = v as f32;
    if (f as f64) < v {
        f.next_up()
    } else {
        f
    }
}

fn affine_params(lo: f64, hi: f64) -> (f32, i32) {
    let scale = if hi == lo { 1.0 } else { f32_at_least((hi - lo) / 255.0) };
    let zp = (-128.0 - lo / scale as f64).round().clamp(-128.0, 127.0);
    (scale, zp as i32)
}

/// Whether every value in `[lo, hi]` rounds into the int8 range.
fn covers(lo: f64, hi: f64, (scale, zp): (f32, i32)) -> bool {
    let (s, z) = (scale as f64, zp as f64);
    lo / s + z >= -128.5 && hi / s + z <= 127.5
}

/// Per-tensor affine parameters for `weights`: `s = (max - min) / 255`
/// (1 for a constant tensor) and `z = round(-128 - min / s)` clamped to int8.
/// If the clamped map cannot reach every weight, the range is widened to
/// include 0 first, so each weight stays within `s / 2` of its dequantized value.
pub fn quantization_params(weights: &[f32]) -> (f32, i32) {
    if weights.is_empty() {
        return (1.0, -128);
    }
    let (lo, hi) = weights.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &w| {
        (lo.min(w as f64), hi.max(w as f64))
    });
    let params = affine_params(lo, hi);
    if covers(lo, hi, params) {
        params
    } else {
        affine_params(lo.min(0.0), hi.max(0.0))
    }
}

pub fn quantize_value(w: f32, scale: f32, zero_point: i32) -> i8 {
    (w as f64 / scale as f64 + zero_point as f64)
        .round()
        .clamp(-128.0, 127.0) as i8
}

/// Post-training weight-only int8 quantization.
pub fn quantize(model: &MlpModel) -> Result<QuantizedMlpModel, ConvError> {
    let mut layers = Vec::with_capacity(model.layers().len());
    for (i, l) in model.layers().iter().enumerate() {
        if l.weights.iter().chain(&l.biases).any(|w| !w.is_finite()) {
            return Err(ConvError::NonFinite { layer: i });
        }
        let (scale, zero_point) = quantization_params(&l.weights);
        layers.push(QuantizedLayer {
            in_dim: l.in_dim,
            out_dim: l.out_dim,
            activation: l.activation,
            scale,
            zero_point,
            weights: l
                .weights
                .iter()
                .map(|&w| quantize_value(w, scale, zero_point))
                .collect(),
            biases: l.biases.clone(),
        });
    }
    QuantizedMlpModel::from_layers(layers)
}
