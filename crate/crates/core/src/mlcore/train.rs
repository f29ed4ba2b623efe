use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{dot, Activation, DenseLayer, MlpArchitecture, MlpModel};
use super::{Dataset, MlError};

/// Probability clamp applied before taking logarithms.
pub const BCE_EPSILON: f64 = 1e-7;
pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without validation-loss improvement before stopping. Zero acts like one.
    pub patience: usize,
    pub shuffle: bool,
    /// Trailing share of the training rows held out for early stopping.
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-5,
            batch_size: 100,
            max_epochs: 200,
            patience: 3,
            shuffle: false,
            validation_fraction: 0.1,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), MlError> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(MlError::Config(format!(
                "learning rate {} must be a finite non-negative number",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(MlError::Config("batch size must be at least 1".into()));
        }
        if self.max_epochs == 0 {
            return Err(MlError::Config("max epochs must be at least 1".into()));
        }
        if !(self.validation_fraction >= 0.0 && self.validation_fraction < 1.0) {
            return Err(MlError::Config(format!(
                "validation fraction {} must lie in [0, 1)",
                self.validation_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    EarlyStopping,
    MaxEpochs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    /// Mean of the per-batch losses seen during the epoch.
    pub loss: f64,
    pub binary_accuracy: f64,
    pub val_loss: Option<f64>,
    pub val_binary_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    pub stopped_epoch: usize,
    /// Epoch whose weights were restored.
    pub best_epoch: usize,
    pub stop_reason: StopReason,
}

impl TrainHistory {
    /// Tab-separated per-epoch log.
    pub fn to_log(&self) -> String {
        let mut out = String::from("epoch\tloss\tbinary_accuracy\tval_loss\tval_binary_accuracy\n");
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"));
        for e in &self.epochs {
            out.push_str(&format!(
                "{}\t{:.6}\t{:.6}\t{}\t{}\n",
                e.epoch,
                e.loss,
                e.binary_accuracy,
                opt(e.val_loss),
                opt(e.val_binary_accuracy)
            ));
        }
        let reason = match self.stop_reason {
            StopReason::EarlyStopping => "early stopping",
            StopReason::MaxEpochs => "max epochs",
        };
        out.push_str(&format!(
            "# stopped after epoch {} ({reason}); restored epoch {}\n",
            self.stopped_epoch, self.best_epoch
        ));
        out
    }
}

#[inline]
fn target<T: Float>(label: u8, unit: usize, units: usize) -> T {
    let hit = if units == 1 {
        label == 1
    } else {
        usize::from(label) == unit
    };
    if hit {
        T::one()
    } else {
        T::zero()
    }
}

/// Per-unit binary cross-entropy on a clamped probability; NaN propagates.
#[inline]
fn bce<T: Float>(p: T, y: T) -> T {
    if p.is_nan() {
        return p;
    }
    let eps = T::from(BCE_EPSILON).unwrap();
    let pc = p.max(eps).min(T::one() - eps);
    -(y * pc.ln() + (T::one() - y) * (T::one() - pc).ln())
}

/// dBCE/dz for an output unit with activation output `p`.
#[inline]
fn output_delta<T: Float>(act: Activation, p: T, y: T) -> T {
    let eps = T::from(BCE_EPSILON).unwrap();
    if p < eps || p > T::one() - eps {
        return T::zero();
    }
    match act {
        Activation::Sigmoid => p - y,
        other => {
            let dl_dp = (p - y) / (p * (T::one() - p));
            dl_dp * other.derivative_from_output(p)
        }
    }
}

struct Workspace<T> {
    acts: Vec<Vec<T>>,
    deltas: Vec<Vec<T>>,
}

impl<T: Float> Workspace<T> {
    fn new(layers: &[DenseLayer<T>]) -> Self {
        Workspace {
            acts: layers.iter().map(|l| vec![T::zero(); l.out_dim]).collect(),
            deltas: layers.iter().map(|l| vec![T::zero(); l.out_dim]).collect(),
        }
    }
}

fn forward_cached<T: Float>(layers: &[DenseLayer<T>], x: &[T], ws: &mut Workspace<T>) {
    for l in 0..layers.len() {
        let (done, rest) = ws.acts.split_at_mut(l);
        let input: &[T] = if l == 0 { x } else { &done[l - 1] };
        let layer = &layers[l];
        for (o, a) in rest[0].iter_mut().enumerate() {
            *a = layer.activation.apply(dot(layer.row(o), input) + layer.biases[o]);
        }
    }
}

/// Forward pass for one sample, optionally accumulating `scale * dLoss/dParam`
/// into `grads`. Returns the summed unit losses and the count of correct units.
fn sample_pass<T: Float>(
    layers: &[DenseLayer<T>],
    x: &[T],
    label: u8,
    scale: T,
    grads: Option<&mut [DenseLayer<T>]>,
    ws: &mut Workspace<T>,
) -> (T, usize) {
    forward_cached(layers, x, ws);
    let last = layers.len() - 1;
    let units = layers[last].out_dim;
    let half = T::from(0.5).unwrap();
    let mut loss = T::zero();
    let mut hits = 0;
    for (u, &p) in ws.acts[last].iter().enumerate() {
        let y = target::<T>(label, u, units);
        loss = loss + bce(p, y);
        if (p > half) == (y > half) {
            hits += 1;
        }
    }
    let Some(grads) = grads else {
        return (loss, hits);
    };
    for u in 0..units {
        let p = ws.acts[last][u];
        ws.deltas[last][u] = output_delta(layers[last].activation, p, target(label, u, units)) * scale;
    }
    for l in (0..layers.len()).rev() {
        let input: &[T] = if l == 0 { x } else { &ws.acts[l - 1] };
        let g = &mut grads[l];
        let in_dim = g.in_dim;
        for (o, &d) in ws.deltas[l].iter().enumerate() {
            if d == T::zero() {
                continue;
            }
            g.biases[o] = g.biases[o] + d;
            for (gw, &a) in g.weights[o * in_dim..(o + 1) * in_dim].iter_mut().zip(input) {
                *gw = *gw + d * a;
            }
        }
        if l > 0 {
            let (lower, upper) = ws.deltas.split_at_mut(l);
            let prev = &mut lower[l - 1];
            prev.iter_mut().for_each(|v| *v = T::zero());
            for (o, &d) in upper[0].iter().enumerate() {
                if d == T::zero() {
                    continue;
                }
                for (pv, &w) in prev.iter_mut().zip(layers[l].row(o)) {
                    *pv = *pv + d * w;
                }
            }
            let act = layers[l - 1].activation;
            for (pv, &a) in prev.iter_mut().zip(&ws.acts[l - 1]) {
                *pv = *pv * act.derivative_from_output(a);
            }
        }
    }
    (loss, hits)
}

fn zero_grads<T: Float>(layers: &[DenseLayer<T>]) -> Vec<DenseLayer<T>> {
    layers
        .iter()
        .map(|l| DenseLayer::zeros(l.in_dim, l.out_dim, l.activation))
        .collect()
}

/// Mean per-unit binary cross-entropy over `rows` and its gradient with
/// respect to every weight and bias, in the precision of `T`.
pub fn loss_and_gradient<T: Float>(
    layers: &[DenseLayer<T>],
    rows: &[Vec<T>],
    labels: &[u8],
) -> (T, Vec<DenseLayer<T>>) {
    let mut grads = zero_grads(layers);
    let mut ws = Workspace::new(layers);
    let units = layers.last().map_or(1, |l| l.out_dim);
    let denom = T::from(rows.len() * units).unwrap();
    let scale = T::one() / denom;
    let mut total = T::zero();
    for (x, &label) in rows.iter().zip(labels) {
        total = total + sample_pass(layers, x, label, scale, Some(&mut grads), &mut ws).0;
    }
    (total / denom, grads)
}

/// Mean per-unit binary cross-entropy of `layers` on `rows`.
pub fn mean_loss<T: Float>(layers: &[DenseLayer<T>], rows: &[Vec<T>], labels: &[u8]) -> T {
    let mut ws = Workspace::new(layers);
    let units = layers.last().map_or(1, |l| l.out_dim);
    let total = rows.iter().zip(labels).fold(T::zero(), |acc, (x, &label)| {
        acc + sample_pass(layers, x, label, T::one(), None, &mut ws).0
    });
    total / T::from(rows.len() * units).unwrap()
}

struct Adam {
    m: Vec<DenseLayer<f32>>,
    v: Vec<DenseLayer<f32>>,
    t: i32,
}

impl Adam {
    fn new(layers: &[DenseLayer<f32>]) -> Self {
        Adam {
            m: zero_grads(layers),
            v: zero_grads(layers),
            t: 0,
        }
    }

    fn step(&mut self, lr: f64, params: &mut [DenseLayer<f32>], grads: &[DenseLayer<f32>]) {
        self.t += 1;
        let b1 = ADAM_BETA1 as f32;
        let b2 = ADAM_BETA2 as f32;
        let c1 = (1.0 - ADAM_BETA1.powi(self.t)) as f32;
        let c2 = (1.0 - ADAM_BETA2.powi(self.t)) as f32;
        let lr = lr as f32;
        let eps = ADAM_EPSILON as f32;
        let update = |p: &mut [f32], g: &[f32], m: &mut [f32], v: &mut [f32]| {
            for i in 0..p.len() {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                let mhat = m[i] / c1;
                let vhat = v[i] / c2;
                p[i] -= lr * mhat / (vhat.sqrt() + eps);
            }
        };
        for (l, p) in params.iter_mut().enumerate() {
            let (m, v) = (&mut self.m[l], &mut self.v[l]);
            update(&mut p.weights, &grads[l].weights, &mut m.weights, &mut v.weights);
            update(&mut p.biases, &grads[l].biases, &mut m.biases, &mut v.biases);
        }
    }
}

fn check_data(arch: &MlpArchitecture, data: &Dataset) -> Result<(), MlError> {
    if data.n_features() != arch.input_dim() {
        return Err(MlError::Dimension {
            expected: arch.input_dim(),
            found: data.n_features(),
        });
    }
    if !matches!(arch.output_dim(), 1 | 2) {
        return Err(MlError::Architecture(format!(
            "binary classification needs 1 or 2 output units, not {}",
            arch.output_dim()
        )));
    }
    Ok(())
}

/// Trains a freshly initialized network (seeded by `cfg.seed`).
pub fn train(arch: &MlpArchitecture, data: &Dataset, cfg: &TrainConfig) -> Result<(MlpModel, TrainHistory), MlError> {
    train_from(MlpModel::init(arch, cfg.seed), data, cfg)
}

/// Mini-batch Adam from `model`'s current weights. The trailing
/// `validation_fraction` of `data` drives early stopping; the best epoch's
/// weights are returned.
pub fn train_from(mut model: MlpModel, data: &Dataset, cfg: &TrainConfig) -> Result<(MlpModel, TrainHistory), MlError> {
    cfg.validate()?;
    check_data(&model.architecture(), data)?;
    let n_val = (data.len() as f64 * cfg.validation_fraction).floor() as usize;
    let n_train = data.len() - n_val;
    if n_train == 0 {
        return Err(MlError::Data(
            "no training rows left after the validation hold-out".into(),
        ));
    }
    let units = model.output_dim();
    let labels = data.labels();

    let mut order: Vec<usize> = (0..n_train).collect();
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    shuffle_rng.set_stream(1);
    let mut adam = Adam::new(model.layers());
    let mut ws = Workspace::new(model.layers());
    let mut grads = zero_grads(model.layers());

    let mut history = Vec::new();
    let mut best = (f64::INFINITY, 0usize, model.clone());
    let mut wait = 0;
    let mut stop_reason = StopReason::MaxEpochs;

    for epoch in 1..=cfg.max_epochs {
        if cfg.shuffle {
            for i in (1..order.len()).rev() {
                let j = shuffle_rng.gen_range(0..=i as u32) as usize;
                order.swap(i, j);
            }
        }
        let mut loss_sum = 0.0f64;
        let mut hits = 0usize;
        for (b, batch) in order.chunks(cfg.batch_size).enumerate() {
            grads.iter_mut().for_each(|g| {
                g.weights.iter_mut().for_each(|w| *w = 0.0);
                g.biases.iter_mut().for_each(|w| *w = 0.0);
            });
            let denom = (batch.len() * units) as f32;
            let mut batch_loss = 0.0f32;
            for &i in batch {
                let (l, h) = sample_pass(
                    model.layers(),
                    data.row(i),
                    labels[i],
                    1.0 / denom,
                    Some(&mut grads),
                    &mut ws,
                );
                batch_loss += l;
                hits += h;
            }
            let batch_loss = batch_loss / denom;
            if !batch_loss.is_finite() {
                return Err(MlError::NonFinite { epoch, batch: b + 1 });
            }
            loss_sum += batch_loss as f64 * batch.len() as f64;
            adam.step(cfg.learning_rate, model.layers_mut(), &grads);
        }
        let loss = loss_sum / n_train as f64;
        let binary_accuracy = hits as f64 / (n_train * units) as f64;

        let (val_loss, val_binary_accuracy) = if n_val > 0 {
            let mut vl = 0.0f64;
            let mut vh = 0usize;
            for (i, &label) in labels.iter().enumerate().skip(n_train) {
                let (l, h) = sample_pass(model.layers(), data.row(i), label, 1.0, None, &mut ws);
                vl += l as f64;
                vh += h;
            }
            let denom = (n_val * units) as f64;
            let vl = vl / denom;
            if !vl.is_finite() {
                return Err(MlError::NonFinite { epoch, batch: 0 });
            }
            (Some(vl), Some(vh as f64 / denom))
        } else {
            (None, None)
        };
        history.push(EpochRecord {
            epoch,
            loss,
            binary_accuracy,
            val_loss,
            val_binary_accuracy,
        });
        log::debug!("epoch {epoch}: loss {loss:.6} val_loss {val_loss:?}");

        let monitored = val_loss.unwrap_or(loss);
        if monitored < best.0 {
            best = (monitored, epoch, model.clone());
            wait = 0;
        } else {
            wait += 1;
            if wait >= cfg.patience.max(1) {
                stop_reason = StopReason::EarlyStopping;
                break;
            }
        }
    }
    let stopped_epoch = history.len();
    Ok((
        best.2,
        TrainHistory {
            epochs: history,
            stopped_epoch,
            best_epoch: best.1,
            stop_reason,
        },
    ))
}
