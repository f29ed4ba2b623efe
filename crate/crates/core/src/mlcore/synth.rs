use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Dataset, MlError};

pub const VS1_CHANNELS: usize = 60;
pub const EPS1_CHANNELS: usize = 6000;
pub const SE_CHANNELS: usize = 60;
pub const SYNTH_FEATURES: usize = VS1_CHANNELS + EPS1_CHANNELS + SE_CHANNELS;

/// Generator settings for the hydraulic-rig-like dataset.
///
/// Each cycle has a latent leak severity `s ~ N(±separation/2, 1)` (sign by
/// class) and a slowly drifting, class-independent operating condition `c`.
/// Feature `j` is `base_j + loading_j * s + nuisance_j * c + noise_j * e`.
/// The Bayes accuracy is therefore close to `Phi(separation / 2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n: usize,
    pub negative_share: f64,
    pub separation: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n: 2205,
            negative_share: 0.5537,
            separation: 3.8,
            seed: 0,
        }
    }
}

impl SynthSpec {
    /// `round(n * negative_share)`.
    pub fn negatives(&self) -> usize {
        (self.n as f64 * self.negative_share).round() as usize
    }
}

#[derive(Debug, Clone, Copy)]
struct Channel {
    base: f64,
    loading: f64,
    nuisance: f64,
    noise: f64,
}

fn channel(j: usize) -> Channel {
    if j < VS1_CHANNELS {
        // vibration, mm/s, 1 Hz over a 60 s cycle
        let k = j as f64;
        Channel {
            base: 0.55 + 0.02 * (TAU * k / 60.0).sin(),
            loading: 0.03,
            nuisance: 0.02,
            noise: 0.02,
        }
    } else if j < VS1_CHANNELS + EPS1_CHANNELS {
        // motor power, W, 100 Hz over a 60 s cycle
        let k = (j - VS1_CHANNELS) as f64;
        Channel {
            base: 2300.0 + 150.0 * (TAU * 3.0 * k / 6000.0).sin() + 40.0 * (TAU * 50.0 * k / 6000.0).sin(),
            loading: 12.0 * (1.0 + 0.5 * (TAU * k / 1000.0).sin()),
            nuisance: 15.0,
            noise: 25.0,
        }
    } else {
        // efficiency factor, %, 1 Hz
        let k = (j - VS1_CHANNELS - EPS1_CHANNELS) as f64;
        Channel {
            base: 60.0 - 0.05 * k,
            loading: -1.2,
            nuisance: 0.8,
            noise: 1.0,
        }
    }
}

/// Class-mean shift of feature `j` per unit of latent severity.
pub fn synth_loading(j: usize) -> f64 {
    channel(j).loading
}

/// Synthetic leak-detection data with the default separation.
pub fn synth_hydraulic_dataset(seed: u64, n: usize, negative_share: f64) -> Result<Dataset, MlError> {
    synth_dataset(&SynthSpec {
        n,
        negative_share,
        seed,
        ..SynthSpec::default()
    })
}

pub fn synth_dataset(spec: &SynthSpec) -> Result<Dataset, MlError> {
    if !(0.0..=1.0).contains(&spec.negative_share) {
        return Err(MlError::Config(format!(
            "negative share {} must lie in [0, 1]",
            spec.negative_share
        )));
    }
    if !(spec.separation.is_finite() && spec.separation >= 0.0) {
        return Err(MlError::Config("separation must be finite and non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let negatives = spec.negatives();
    let mut labels: Vec<u8> = (0..spec.n).map(|i| u8::from(i >= negatives)).collect();
    for i in (1..labels.len()).rev() {
        let j = rng.gen_range(0..=i as u32) as usize;
        labels.swap(i, j);
    }

    let channels: Vec<Channel> = (0..SYNTH_FEATURES).map(channel).collect();
    let rho: f64 = 0.95;
    let innovation = (1.0 - rho * rho).sqrt();
    let mut condition: f64 = rng.sample(StandardNormal);
    let mut features = Vec::with_capacity(spec.n * SYNTH_FEATURES);
    for &label in &labels {
        let sign = if label == 1 { 0.5 } else { -0.5 };
        let z: f64 = rng.sample(StandardNormal);
        let severity = sign * spec.separation + z;
        let e: f64 = rng.sample(StandardNormal);
        condition = rho * condition + innovation * e;
        for ch in &channels {
            let e: f64 = rng.sample(StandardNormal);
            let v = ch.base + ch.loading * severity + ch.nuisance * condition + ch.noise * e;
            features.push(v as f32);
        }
    }
    Dataset::new(features, SYNTH_FEATURES, labels)
}
