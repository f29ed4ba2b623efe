use serde::{Deserialize, Serialize};

use crate::mlcore::{MlError, MlpArchitecture};
use crate::modelconv::{carray_size, float_file_size, quantized_file_size, EXPANSION_RATIO};

use super::PlatformProfile;

/// Symbol used for embedded model arrays.
pub const CARRAY_SYMBOL: &str = "model_data";

/// Byte sizes of every artifact derived from one architecture.
///
/// KB/MB figures quoted next to these are decimal (10^3, 10^6).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeReport {
    pub dims: Vec<usize>,
    pub param_count: u64,
    pub weight_count: u64,
    pub bias_count: u64,
    /// `.mlq` float32 file.
    pub float_serialized_bytes: u64,
    /// `.mlq` int8 file.
    pub quantized_serialized_bytes: u64,
    /// C source embedding the int8 file as `model_data`.
    pub carray_source_bytes: u64,
    /// Characters of C source per payload byte, [`EXPANSION_RATIO`]. The
    /// exact quotient for this report is within 0.1% of it above 10 KB.
    pub expansion_ratio: f64,
    /// Float32 activation buffers for the widest consecutive layer pair.
    pub arena_bytes: u64,
}

pub fn estimate_sizes(arch: &MlpArchitecture) -> Result<SizeReport, MlError> {
    let float_serialized_bytes = float_file_size(arch)?;
    let quantized_serialized_bytes = quantized_file_size(arch)?;
    let carray_source_bytes = carray_size(quantized_serialized_bytes, CARRAY_SYMBOL.len());
    let widest = arch
        .dims()
        .windows(2)
        .map(|w| w[0] as u64 + w[1] as u64)
        .max()
        .unwrap_or(0);
    Ok(SizeReport {
        dims: arch.dims().to_vec(),
        param_count: arch.param_count()?,
        weight_count: arch.weight_count()?,
        bias_count: arch.bias_count(),
        float_serialized_bytes,
        quantized_serialized_bytes,
        carray_source_bytes,
        expansion_ratio: EXPANSION_RATIO,
        arena_bytes: widest.checked_mul(4).ok_or(MlError::Overflow)?,
    })
}

/// Float offsets of each layer's input and output inside an arena of
/// `max(d_i + d_{i+1})` floats. Inputs and outputs alternate between the two
/// ends of the arena, so a layer never overwrites the vector it is reading.
pub fn arena_layout(dims: &[usize]) -> (usize, Vec<(usize, usize)>) {
    let len = dims.windows(2).map(|w| w[0] + w[1]).max().unwrap_or(0);
    let offsets = dims
        .windows(2)
        .enumerate()
        .map(|(i, w)| if i % 2 == 0 { (0, len - w[1]) } else { (len - w[0], 0) })
        .collect();
    (len, offsets)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Reject iff the generated C-array source is larger than flash. This
    /// overstates the flashed image about sixfold but matches how the
    /// reference deployments were judged, so it is the default.
    #[default]
    SourceSize,
    /// Reject iff the deployed model plus program reserve exceeds flash, or
    /// the model plus activation arena exceeds RAM.
    Strict,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::SourceSize => "source_size",
            Policy::Strict => "strict",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "source" | "source_size" => Some(Policy::SourceSize),
            "strict" => Some(Policy::Strict),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constraint {
    Flash,
    Ram,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetCheck {
    pub constraint: Constraint,
    pub required_bytes: u64,
    pub available_bytes: u64,
}

impl BudgetCheck {
    pub fn margin(&self) -> i64 {
        self.available_bytes as i64 - self.required_bytes as i64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeployDecision {
    pub compiler_id: String,
    pub policy: Policy,
    /// True iff every check has a non-negative margin.
    pub accepted: bool,
    /// The check with the smallest margin; `None` for unconstrained targets.
    pub binding: Option<Constraint>,
    pub margin_bytes: Option<i64>,
    pub checks: Vec<BudgetCheck>,
}

pub fn check_deployability(report: &SizeReport, profile: &PlatformProfile, policy: Policy) -> DeployDecision {
    let model_bytes = if profile.quantized {
        report.quantized_serialized_bytes
    } else {
        report.float_serialized_bytes
    };
    let mut checks = Vec::new();
    match policy {
        Policy::SourceSize => {
            if let Some(flash) = profile.flash_bytes {
                checks.push(BudgetCheck {
                    constraint: Constraint::Flash,
                    required_bytes: report.carray_source_bytes,
                    available_bytes: flash,
                });
            }
        }
        Policy::Strict => {
            if let Some(flash) = profile.flash_bytes {
                checks.push(BudgetCheck {
                    constraint: Constraint::Flash,
                    required_bytes: model_bytes.saturating_add(profile.program_reserve_bytes),
                    available_bytes: flash,
                });
            }
            if let Some(ram) = profile.ram_bytes {
                checks.push(BudgetCheck {
                    constraint: Constraint::Ram,
                    required_bytes: model_bytes.saturating_add(report.arena_bytes),
                    available_bytes: ram,
                });
            }
        }
    }
    let tightest = checks.iter().min_by_key(|c| c.margin());
    DeployDecision {
        compiler_id: profile.compiler_id.clone(),
        policy,
        accepted: checks.iter().all(|c| c.margin() >= 0),
        binding: tightest.map(|c| c.constraint),
        margin_bytes: tightest.map(BudgetCheck::margin),
        checks,
    }
}
