//! Code-generation targets, their hardware budgets and model-size checks.
//!
//! Sizes are exact byte counts of the artifacts this crate writes. Vendor
//! runtime formats (for example the x86 training framework's native save
//! format) are not modeled.

mod budget;
mod registry;

pub use budget::{
    arena_layout, check_deployability, estimate_sizes, BudgetCheck, Constraint, DeployDecision, Policy, SizeReport,
    CARRAY_SYMBOL,
};
pub use registry::{
    builtin_registry, parse_clock, parse_size, PlatformProfile, Registry, TargetLanguage, ARDUINO_NANO_33,
    DEFAULT_PROGRAM_RESERVE, PLATFORMS_ENV, PYTHON_JAVA, RPI_PYTHON, RPI_PYTHON_QUANTIZED,
};

#[derive(Debug, thiserror::Error)]
pub enum PlatformError {
    #[error("{file}: {message}")]
    File { file: String, message: String },
    #[error("platform '{0}' is already registered")]
    Duplicate(String),
    #[error("invalid platform '{id}': {message}")]
    Invalid { id: String, message: String },
}
