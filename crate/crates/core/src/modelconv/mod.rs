//! The `.mlq` model format, int8 weight quantization and C-array embedding.
//!
//! `.mlq` layout, all integers little-endian:
//!
//! ```text
//! "MLQ1" | version u8 | dtype u8 (0 float32, 1 int8) | layer count u16
//! per layer: in u32 | out u32 | activation u8 (0 linear, 1 relu, 2 sigmoid)
//!   float32: weights f32[out*in] (row-major) | biases f32[out]
//!   int8:    scale f32 | zero point i32 | weights i8[out*in] | biases f32[out]
//! ```

mod carray;
mod format;
mod quant;

pub use carray::{carray_size, emit_carray, parse_carray, BYTES_PER_LINE, EXPANSION_RATIO};
pub use format::{
    float_file_size, load, quantized_file_size, save, save_float, save_quantized, AnyModel, Dtype, FORMAT_VERSION,
    HEADER_BYTES, LAYER_HEADER_BYTES, MAGIC, QUANT_META_BYTES,
};
pub use quant::{predict_quantized, quantization_params, quantize, quantize_value, QuantizedLayer, QuantizedMlpModel};

#[derive(Debug, thiserror::Error)]
pub enum ConvError {
    #[error("not an MLQ1 model file")]
    BadMagic,
    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u8),
    #[error("unknown dtype byte {0}")]
    UnknownDtype(u8),
    #[error("layer {layer}: unknown activation code {code}")]
    UnknownActivation { layer: usize, code: u8 },
    #[error("truncated model file: needed {needed} bytes at offset {offset}, {available} left")]
    Truncated {
        offset: usize,
        needed: usize,
        available: usize,
    },
    #[error("{extra} unexpected bytes after the model at offset {offset}")]
    TrailingBytes { offset: usize, extra: usize },
    #[error("invalid model shape: {0}")]
    Shape(String),
    #[error("layer {layer} holds a NaN or infinite parameter")]
    NonFinite { layer: usize },
    #[error("'{0}' is not a valid C identifier")]
    InvalidSymbol(String),
    #[error("{line}:{column}: {message}")]
    Carray {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("declared length {declared} does not match {actual} array bytes")]
    LengthMismatch { declared: usize, actual: usize },
}
