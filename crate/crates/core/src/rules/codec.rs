//! Versioned flat binary model encoding.
//!
//! Layout: magic `LOOA`, format version (u16 LE), kind tag (u8), then a
//! kind-specific payload of little-endian u32 dimensions and f64 values.

use super::model::Model;
use super::smoothing::{NoisePairing, SmoothingConfig};
use super::table::TableAssignment;
use crate::error::{Error, Result};
use crate::numerics::{Matrix, MlpParams, OutputActivation};

pub const MAGIC: &[u8; 4] = b"LOOA";
pub const FORMAT_VERSION: u16 = 1;

const TAG_MLP: u8 = 1;
const TAG_KNN: u8 = 2;
const TAG_TABLE: u8 = 3;
const TAG_CONSTANT: u8 = 4;
const TAG_SMOOTHED: u8 = 5;

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: usize) {
        self.0.extend_from_slice(&(v as u32).to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64s(&mut self, vs: &[f64]) {
        for &v in vs {
            self.f64(v);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Codec(format!("truncated at byte {}", self.pos)));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }
}

pub fn encode_model(model: &Model) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.0.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    write_body(&mut w, model);
    w.0
}

fn write_body(w: &mut Writer, model: &Model) {
    match model {
        Model::Mlp { params } => {
            w.u8(TAG_MLP);
            w.u32(params.layer_dims.len());
            for &d in &params.layer_dims {
                w.u32(d);
            }
            w.u8(match params.output {
                OutputActivation::Sigmoid => 0,
                OutputActivation::Softmax => 1,
            });
            for (wm, b) in params.weights.iter().zip(&params.biases) {
                w.f64s(wm.data());
                w.f64s(b);
            }
        }
        Model::Knn {
            k,
            features,
            labels,
            num_classes,
        } => {
            w.u8(TAG_KNN);
            w.u32(*k);
            w.u32(*num_classes);
            w.u32(features.rows());
            w.u32(features.cols());
            w.f64s(features.data());
            for &l in labels {
                w.u32(l);
            }
        }
        Model::Table { assignment } => {
            w.u8(TAG_TABLE);
            match *assignment {
                TableAssignment::Threshold { at } => {
                    w.u8(0);
                    w.f64(at);
                }
                TableAssignment::Constant { class } => {
                    w.u8(1);
                    w.u32(class);
                }
            }
        }
        Model::Constant { probs } => {
            w.u8(TAG_CONSTANT);
            w.u32(probs.len());
            w.f64s(probs);
        }
        Model::Smoothed {
            base,
            config,
            noise_stream,
        } => {
            w.u8(TAG_SMOOTHED);
            w.f64(config.sigma_squared);
            w.u32(config.num_samples);
            w.u64(config.noise_seed);
            w.u8(match config.pairing {
                NoisePairing::CommonRandomNumbers => 0,
                NoisePairing::Independent => 1,
            });
            w.u64(*noise_stream);
            write_body(w, base);
        }
    }
}

pub fn decode_model(bytes: &[u8]) -> Result<Model> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Codec("bad magic bytes".into()));
    }
    let version = r.u16()?;
    if version != FORMAT_VERSION {
        return Err(Error::Codec(format!("unsupported format version {version}")));
    }
    let model = read_body(&mut r)?;
    if r.pos != bytes.len() {
        return Err(Error::Codec(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    Ok(model)
}

fn read_body(r: &mut Reader<'_>) -> Result<Model> {
    match r.u8()? {
        TAG_MLP => {
            let n = r.u32()?;
            let dims = (0..n).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
            let mut params = MlpParams::zeros(&dims).map_err(|e| Error::Codec(e.to_string()))?;
            let output = match r.u8()? {
                0 => OutputActivation::Sigmoid,
                1 => OutputActivation::Softmax,
                t => return Err(Error::Codec(format!("unknown activation tag {t}"))),
            };
            if output != params.output {
                return Err(Error::Codec("activation does not match output width".into()));
            }
            for l in 0..params.num_layers() {
                let (rows, cols) = (params.weights[l].rows(), params.weights[l].cols());
                params.weights[l] = Matrix::new(rows, cols, r.f64s(rows * cols)?)?;
                params.biases[l] = r.f64s(rows)?;
            }
            Ok(Model::Mlp { params })
        }
        TAG_KNN => {
            let k = r.u32()?;
            let num_classes = r.u32()?;
            let rows = r.u32()?;
            let cols = r.u32()?;
            let features = Matrix::new(rows, cols, r.f64s(rows * cols)?)?;
            let labels = (0..rows).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
            Ok(Model::Knn {
                k,
                features,
                labels,
                num_classes,
            })
        }
        TAG_TABLE => {
            let assignment = match r.u8()? {
                0 => TableAssignment::Threshold { at: r.f64()? },
                1 => TableAssignment::Constant { class: r.u32()? },
                t => return Err(Error::Codec(format!("unknown table tag {t}"))),
            };
            Ok(Model::Table { assignment })
        }
        TAG_CONSTANT => {
            let n = r.u32()?;
            Ok(Model::Constant { probs: r.f64s(n)? })
        }
        TAG_SMOOTHED => {
            let sigma_squared = r.f64()?;
            let num_samples = r.u32()?;
            let noise_seed = r.u64()?;
            let pairing = match r.u8()? {
                0 => NoisePairing::CommonRandomNumbers,
                1 => NoisePairing::Independent,
                t => return Err(Error::Codec(format!("unknown pairing tag {t}"))),
            };
            let noise_stream = r.u64()?;
            let base = read_body(r)?;
            Ok(Model::Smoothed {
                base: Box::new(base),
                config: SmoothingConfig {
                    sigma_squared,
                    num_samples,
                    noise_seed,
                    pairing,
                },
                noise_stream,
            })
        }
        t => Err(Error::Codec(format!("unknown model kind tag {t}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let bytes = encode_model(&Model::constant(1, 2));
        assert_eq!(&bytes[..4], b"LOOA");
        assert_eq!(u16::from_le_bytes([bytes[4], bytes[5]]), 1);
        assert_eq!(bytes[6], TAG_CONSTANT);
        assert_eq!(bytes.len(), 4 + 2 + 1 + 4 + 16);
    }

    #[test]
    fn rejects_corruption() {
        let mut bytes = encode_model(&Model::constant(1, 2));
        assert!(decode_model(&bytes[..bytes.len() - 1]).is_err());
        bytes.push(0);
        assert!(decode_model(&bytes).is_err());
        let mut bad = encode_model(&Model::constant(1, 2));
        bad[0] = b'X';
        assert!(decode_model(&bad).is_err());
    }
}
