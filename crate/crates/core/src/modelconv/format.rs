use crate::mlcore::{Activation, Classifier, DenseLayer, MlError, MlpArchitecture, MlpModel, Prediction};

use super::quant::{QuantizedLayer, QuantizedMlpModel};
use super::ConvError;

pub const MAGIC: &[u8; 4] = b"MLQ1";
pub const FORMAT_VERSION: u8 = 1;
/// Magic, version, dtype, layer count.
pub const HEADER_BYTES: u64 = 8;
/// in_dim, out_dim, activation.
pub const LAYER_HEADER_BYTES: u64 = 9;
/// Per-tensor scale and zero point.
pub const QUANT_META_BYTES: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Dtype {
    Float32 = 0,
    Int8 = 1,
}

/// A model as stored in an `.mlq` file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel {
    Float(MlpModel),
    Quantized(QuantizedMlpModel),
}

impl AnyModel {
    pub fn dtype(&self) -> Dtype {
        match self {
            AnyModel::Float(_) => Dtype::Float32,
            AnyModel::Quantized(_) => Dtype::Int8,
        }
    }

    pub fn architecture(&self) -> MlpArchitecture {
        match self {
            AnyModel::Float(m) => m.architecture(),
            AnyModel::Quantized(q) => {
                let mut dims = vec![q.layers()[0].in_dim];
                dims.extend(q.layers().iter().map(|l| l.out_dim));
                MlpArchitecture::new(dims, q.layers().iter().map(|l| l.activation).collect())
                    .expect("validated on construction")
            }
        }
    }
}

impl Classifier for AnyModel {
    fn input_dim(&self) -> usize {
        match self {
            AnyModel::Float(m) => m.input_dim(),
            AnyModel::Quantized(q) => q.input_dim(),
        }
    }

    fn predict(&self, x: &[f32]) -> Result<Prediction, MlError> {
        match self {
            AnyModel::Float(m) => m.predict(x),
            AnyModel::Quantized(q) => q.predict(x),
        }
    }
}

/// Exact `.mlq` size of a float32 model.
pub fn float_file_size(arch: &MlpArchitecture) -> Result<u64, MlError> {
    let params = arch.param_count()?;
    params
        .checked_mul(4)
        .and_then(|p| p.checked_add(HEADER_BYTES + LAYER_HEADER_BYTES * arch.layer_count() as u64))
        .ok_or(MlError::Overflow)
}

/// Exact `.mlq` size of an int8 model.
pub fn quantized_file_size(arch: &MlpArchitecture) -> Result<u64, MlError> {
    let layers = arch.layer_count() as u64;
    arch.bias_count()
        .checked_mul(4)
        .and_then(|b| b.checked_add(arch.weight_count().ok()?))
        .and_then(|p| p.checked_add(HEADER_BYTES + (LAYER_HEADER_BYTES + QUANT_META_BYTES) * layers))
        .ok_or(MlError::Overflow)
}

fn header(out: &mut Vec<u8>, dtype: Dtype, layers: usize) -> Result<(), ConvError> {
    let count =
        u16::try_from(layers).map_err(|_| ConvError::Shape(format!("{layers} layers exceed the format limit")))?;
    out.extend_from_slice(MAGIC);
    out.push(FORMAT_VERSION);
    out.push(dtype as u8);
    out.extend_from_slice(&count.to_le_bytes());
    Ok(())
}

fn layer_header(out: &mut Vec<u8>, in_dim: usize, out_dim: usize, act: Activation) -> Result<(), ConvError> {
    let dim =
        |d: usize| u32::try_from(d).map_err(|_| ConvError::Shape(format!("dimension {d} exceeds the format limit")));
    out.extend_from_slice(&dim(in_dim)?.to_le_bytes());
    out.extend_from_slice(&dim(out_dim)?.to_le_bytes());
    out.push(act.code());
    Ok(())
}

fn floats(out: &mut Vec<u8>, values: &[f32]) {
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

pub fn save_float(model: &MlpModel) -> Result<Vec<u8>, ConvError> {
    let mut out = Vec::new();
    header(&mut out, Dtype::Float32, model.layers().len())?;
    for l in model.layers() {
        layer_header(&mut out, l.in_dim, l.out_dim, l.activation)?;
        floats(&mut out, &l.weights);
        floats(&mut out, &l.biases);
    }
    Ok(out)
}

pub fn save_quantized(model: &QuantizedMlpModel) -> Result<Vec<u8>, ConvError> {
    let mut out = Vec::new();
    header(&mut out, Dtype::Int8, model.layers().len())?;
    for l in model.layers() {
        layer_header(&mut out, l.in_dim, l.out_dim, l.activation)?;
        out.extend_from_slice(&l.scale.to_le_bytes());
        out.extend_from_slice(&l.zero_point.to_le_bytes());
        out.extend(l.weights.iter().map(|&q| q as u8));
        floats(&mut out, &l.biases);
    }
    Ok(out)
}

pub fn save(model: &AnyModel) -> Result<Vec<u8>, ConvError> {
    match model {
        AnyModel::Float(m) => save_float(m),
        AnyModel::Quantized(q) => save_quantized(q),
    }
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ConvError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        match end {
            Some(end) => {
                let s = &self.buf[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(ConvError::Truncated {
                offset: self.pos,
                needed: n,
                available: self.buf.len() - self.pos,
            }),
        }
    }

    fn u32(&mut self) -> Result<u32, ConvError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f32>, ConvError> {
        let bytes = self.take(n.checked_mul(4).ok_or(ConvError::Truncated {
            offset: self.pos,
            needed: usize::MAX,
            available: self.buf.len() - self.pos,
        })?)?;
        Ok(bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

/// Parses an `.mlq` buffer. Payload bits are reproduced exactly.
pub fn load(bytes: &[u8]) -> Result<AnyModel, ConvError> {
    let mut cur = Cursor { buf: bytes, pos: 0 };
    let magic = cur.take(4).map_err(|_| ConvError::BadMagic)?;
    if magic != MAGIC {
        return Err(ConvError::BadMagic);
    }
    let version = cur.take(1)?[0];
    if version != FORMAT_VERSION {
        return Err(ConvError::UnsupportedVersion(version));
    }
    let dtype = match cur.take(1)?[0] {
        0 => Dtype::Float32,
        1 => Dtype::Int8,
        other => return Err(ConvError::UnknownDtype(other)),
    };
    let count = u16::from_le_bytes(cur.take(2)?.try_into().unwrap()) as usize;
    let mut float_layers = Vec::new();
    let mut quant_layers = Vec::new();
    for i in 0..count {
        let in_dim = cur.u32()? as usize;
        let out_dim = cur.u32()? as usize;
        let code = cur.take(1)?[0];
        let activation = Activation::from_code(code).ok_or(ConvError::UnknownActivation { layer: i, code })?;
        let n_weights = in_dim
            .checked_mul(out_dim)
            .ok_or_else(|| ConvError::Shape(format!("layer {i} is too large")))?;
        match dtype {
            Dtype::Float32 => {
                let weights = cur.f32s(n_weights)?;
                let biases = cur.f32s(out_dim)?;
                float_layers.push(DenseLayer {
                    in_dim,
                    out_dim,
                    activation,
                    weights,
                    biases,
                });
            }
            Dtype::Int8 => {
                let scale = f32::from_le_bytes(cur.take(4)?.try_into().unwrap());
                let zero_point = i32::from_le_bytes(cur.take(4)?.try_into().unwrap());
                let weights = cur.take(n_weights)?.iter().map(|&b| b as i8).collect();
                let biases = cur.f32s(out_dim)?;
                quant_layers.push(QuantizedLayer {
                    in_dim,
                    out_dim,
                    activation,
                    scale,
                    zero_point,
                    weights,
                    biases,
                });
            }
        }
    }
    if cur.pos != bytes.len() {
        return Err(ConvError::TrailingBytes {
            offset: cur.pos,
            extra: bytes.len() - cur.pos,
        });
    }
    match dtype {
        Dtype::Float32 => MlpModel::from_layers(float_layers)
            .map(AnyModel::Float)
            .map_err(|e| ConvError::Shape(e.to_string())),
        Dtype::Int8 => QuantizedMlpModel::from_layers(quant_layers).map(AnyModel::Quantized),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelconv::quantize;

    fn small() -> MlpModel {
        let arch = MlpArchitecture::new(vec![2, 2], vec![Activation::Sigmoid]).unwrap();
        MlpModel::init(&arch, 3)
    }

    #[test]
    fn float_round_trip() {
        let m = small();
        let bytes = save_float(&m).unwrap();
        assert_eq!(bytes.len() as u64, float_file_size(&m.architecture()).unwrap());
        assert_eq!(load(&bytes).unwrap(), AnyModel::Float(m));
    }

    #[test]
    fn quantized_round_trip() {
        let q = quantize(&small()).unwrap();
        let bytes = save_quantized(&q).unwrap();
        assert_eq!(
            bytes.len() as u64,
            quantized_file_size(&small().architecture()).unwrap()
        );
        assert_eq!(load(&bytes).unwrap(), AnyModel::Quantized(q));
    }

    #[test]
    fn case_study_sizes() {
        let arch = MlpArchitecture::classifier(vec![6120, 32, 2], Activation::Relu).unwrap();
        assert_eq!(float_file_size(&arch).unwrap(), 4 * 195_938 + 8 + 18);
    }

    #[test]
    fn distinct_errors() {
        let bytes = save_float(&small()).unwrap();
        assert!(matches!(load(b"MLQ2\x01\x00\x00\x00"), Err(ConvError::BadMagic)));
        assert!(matches!(load(b"ML"), Err(ConvError::BadMagic)));
        let mut v = bytes.clone();
        v[4] = 9;
        assert!(matches!(load(&v), Err(ConvError::UnsupportedVersion(9))));
        for cut in [5, 8, 12, bytes.len() - 1] {
            assert!(
                matches!(load(&bytes[..cut]), Err(ConvError::Truncated { .. })),
                "cut at {cut}"
            );
        }
        let mut v = bytes.clone();
        v.push(0);
        assert!(matches!(load(&v), Err(ConvError::TrailingBytes { extra: 1, .. })));
    }
}
