//! Minimal NPY v1.0 codec restricted to little-endian `f32`, C order.
//!
//! Shapes select the tensor kind: `(K, H, W)` activations, `(H, W)` building
//! probabilities and `(K,)` excitation weights.

use std::fs;
use std::path::Path;

use super::{ActivationStack, ProbabilityMap, SeWeightVector};
use crate::error::{Error, Result};

const MAGIC: &[u8; 6] = b"\x93NUMPY";

/// Typed view of a decoded NPY file.
#[derive(Debug, Clone, PartialEq)]
pub enum NpyTensor {
    Activations(ActivationStack),
    Probability(ProbabilityMap),
    SeWeights(SeWeightVector),
}

impl NpyTensor {
    pub fn into_activations(self) -> Result<ActivationStack> {
        match self {
            NpyTensor::Activations(a) => Ok(a),
            other => Err(Error::NpyFormat(format!(
                "expected a (K,H,W) activation tensor, found {}",
                other.kind()
            ))),
        }
    }

    pub fn into_probability(self) -> Result<ProbabilityMap> {
        match self {
            NpyTensor::Probability(p) => Ok(p),
            other => Err(Error::NpyFormat(format!(
                "expected an (H,W) probability map, found {}",
                other.kind()
            ))),
        }
    }

    pub fn into_se_weights(self) -> Result<SeWeightVector> {
        match self {
            NpyTensor::SeWeights(w) => Ok(w),
            other => Err(Error::NpyFormat(format!(
                "expected a (K,) weight vector, found {}",
                other.kind()
            ))),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            NpyTensor::Activations(_) => "activations",
            NpyTensor::Probability(_) => "probability map",
            NpyTensor::SeWeights(_) => "weight vector",
        }
    }
}

pub fn load_npy_f32(path: impl AsRef<Path>) -> Result<NpyTensor> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (shape, values) = decode(&bytes)?;
    match shape.as_slice() {
        [k] => {
            debug_assert_eq!(*k, values.len());
            Ok(NpyTensor::SeWeights(SeWeightVector::new(values)?))
        }
        [h, w] => Ok(NpyTensor::Probability(ProbabilityMap::new(*w, *h, values)?)),
        [k, h, w] => Ok(NpyTensor::Activations(ActivationStack::new(
            *k, *w, *h, values,
        )?)),
        _ => unreachable!("rank validated by decode"),
    }
}

/// Writes a raw tensor; `shape` must have rank 1, 2 or 3.
pub fn save_npy_f32(path: impl AsRef<Path>, shape: &[usize], values: &[f32]) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode(shape, values)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

impl ActivationStack {
    pub fn save_npy(&self, path: impl AsRef<Path>) -> Result<()> {
        save_npy_f32(path, &[self.maps(), self.height(), self.width()], self.values())
    }
}

impl ProbabilityMap {
    pub fn save_npy(&self, path: impl AsRef<Path>) -> Result<()> {
        save_npy_f32(path, &[self.height(), self.width()], self.values())
    }
}

impl SeWeightVector {
    pub fn save_npy(&self, path: impl AsRef<Path>) -> Result<()> {
        save_npy_f32(path, &[self.len()], self.weights())
    }
}

pub fn encode(shape: &[usize], values: &[f32]) -> Result<Vec<u8>> {
    if !(1..=3).contains(&shape.len()) {
        return Err(Error::NpyFormat(format!("unsupported rank {}", shape.len())));
    }
    let count: usize = shape.iter().product();
    if count != values.len() {
        return Err(Error::LengthMismatch {
            expected: count,
            found: values.len(),
        });
    }
    let shape_str = match shape {
        [n] => format!("({n},)"),
        dims => format!(
            "({})",
            dims.iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ),
    };
    let mut header =
        format!("{{'descr': '<f4', 'fortran_order': False, 'shape': {shape_str}, }}");
    // magic(6) + version(2) + header length(2) + header, padded to 64 with a final newline
    let unpadded = 10 + header.len() + 1;
    let pad = (64 - unpadded % 64) % 64;
    header.push_str(&" ".repeat(pad));
    header.push('\n');

    let mut out = Vec::with_capacity(10 + header.len() + 4 * values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(header.len() as u16).to_le_bytes());
    out.extend_from_slice(header.as_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> Result<(Vec<usize>, Vec<f32>)> {
    if bytes.len() < 10 || &bytes[..6] != MAGIC {
        return Err(Error::NpyFormat("magic string mismatch".into()));
    }
    if bytes[6] != 1 || bytes[7] != 0 {
        return Err(Error::NpyFormat(format!(
            "unsupported version {}.{}",
            bytes[6], bytes[7]
        )));
    }
    let header_len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
    let header_end = 10 + header_len;
    if bytes.len() < header_end {
        return Err(Error::NpyFormat("truncated header".into()));
    }
    let header = std::str::from_utf8(&bytes[10..header_end])
        .map_err(|_| Error::NpyFormat("header is not ASCII".into()))?;

    let descr = dict_value(header, "descr")?;
    if descr.trim_matches(|c| c == '\'' || c == '"') != "<f4" {
        return Err(Error::NpyFormat(format!("unsupported dtype {descr}")));
    }
    let order = dict_value(header, "fortran_order")?;
    if order != "False" {
        return Err(Error::NpyFormat(format!(
            "unsupported fortran_order {order}"
        )));
    }
    let shape = parse_shape(dict_value(header, "shape")?)?;
    if !(1..=3).contains(&shape.len()) {
        return Err(Error::NpyFormat(format!("unsupported rank {}", shape.len())));
    }

    let count: usize = shape.iter().product();
    let payload = &bytes[header_end..];
    if payload.len() != 4 * count {
        return Err(Error::NpyFormat(format!(
            "payload holds {} bytes, shape needs {}",
            payload.len(),
            4 * count
        )));
    }
    let values = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    Ok((shape, values))
}

/// Raw text of the value stored under `key` in the python-literal header dict.
fn dict_value<'a>(header: &'a str, key: &str) -> Result<&'a str> {
    let missing = || Error::NpyFormat(format!("header lacks '{key}'"));
    let quoted = format!("'{key}'");
    let start = header.find(&quoted).ok_or_else(missing)? + quoted.len();
    let rest = header[start..].trim_start();
    let rest = rest.strip_prefix(':').ok_or_else(missing)?.trim_start();
    let end = if rest.starts_with('(') {
        rest.find(')').map(|i| i + 1)
    } else {
        rest.find([',', '}'])
    }
    .ok_or_else(missing)?;
    Ok(rest[..end].trim())
}

fn parse_shape(text: &str) -> Result<Vec<usize>> {
    let inner = text
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::NpyFormat(format!("malformed shape {text}")))?;
    inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Error::NpyFormat(format!("malformed shape {text}")))
        })
        .collect()
}
