use std::path::Path;

use nalgebra::DMatrix;

use super::{fit_pca, sigmoid, threshold, train_itq, BinaryCodeMap, ItqTrainReport, MAX_CODE_LEN};
use crate::error::{Error, FormatError, FormatErrorKind, Result};
use crate::tensor_io::{read_bytes, write_bytes, ByteReader, FeatureCorpus, FeatureMap};

const MAGIC: &[u8; 4] = b"ITQ1";

/// Magic, `u32` input dimension, `u32` code length, `u32` reserved.
pub const MODEL_HEADER_LEN: usize = 16;

const ORTHO_TOL: f64 = 1e-6;

/// Learned hash: mean `μ` (D), PCA projection `P` (D×c) and rotation `R` (c×c).
///
/// Matrices are stored row-major as `f32`, the same precision as the model file,
/// so save/load is lossless. Encoding runs in `f64` over the effective weights
/// `W = P·R`.
#[derive(Debug, Clone)]
pub struct HashModel {
    input_dim: usize,
    code_len: usize,
    mean: Vec<f32>,
    projection: Vec<f32>,
    rotation: Vec<f32>,
    weights: Vec<f64>,
}

impl PartialEq for HashModel {
    fn eq(&self, other: &Self) -> bool {
        self.input_dim == other.input_dim
            && self.code_len == other.code_len
            && self.mean == other.mean
            && self.projection == other.projection
            && self.rotation == other.rotation
    }
}

impl HashModel {
    pub fn new(
        input_dim: usize,
        code_len: usize,
        mean: Vec<f32>,
        projection: Vec<f32>,
        rotation: Vec<f32>,
    ) -> Result<Self> {
        if code_len == 0 || code_len > MAX_CODE_LEN {
            return Err(Error::invalid(format!("code length {code_len} outside 1..={MAX_CODE_LEN}")));
        }
        if code_len > input_dim {
            return Err(Error::invalid(format!(
                "code length {code_len} exceeds input dimension {input_dim}"
            )));
        }
        for (name, got, want) in [
            ("mean", mean.len(), input_dim),
            ("projection", projection.len(), input_dim * code_len),
            ("rotation", rotation.len(), code_len * code_len),
        ] {
            if got != want {
                return Err(Error::invalid(format!("{name} has {got} values, expected {want}")));
            }
        }
        if mean.iter().chain(&projection).chain(&rotation).any(|v| !v.is_finite()) {
            return Err(Error::invalid("model contains non-finite values"));
        }
        let p = to_matrix(input_dim, code_len, &projection);
        let r = to_matrix(code_len, code_len, &rotation);
        let identity = DMatrix::<f64>::identity(code_len, code_len);
        let p_err = (p.transpose() * &p - &identity).amax();
        if p_err > ORTHO_TOL {
            return Err(Error::invalid(format!("projection columns not orthonormal (error {p_err:.3e})")));
        }
        let r_err = (r.transpose() * &r - &identity).amax();
        if r_err > ORTHO_TOL {
            return Err(Error::invalid(format!("rotation not orthogonal (error {r_err:.3e})")));
        }
        let w = p * r;
        let mut weights = Vec::with_capacity(input_dim * code_len);
        for row in w.row_iter() {
            weights.extend(row.iter());
        }
        Ok(Self {
            input_dim,
            code_len,
            mean,
            projection,
            rotation,
            weights,
        })
    }

    /// Builds from `f64` matrices, rounding to storage precision.
    pub fn from_matrices(mean: &[f64], projection: &DMatrix<f64>, rotation: &DMatrix<f64>) -> Result<Self> {
        let (d, c) = projection.shape();
        Self::new(d, c, mean.iter().map(|&v| v as f32).collect(), row_major(projection), row_major(rotation))
    }

    /// PCA on `samples` (`N × D` row-major) followed by ITQ rotation training.
    pub fn train(
        samples: &[f32],
        input_dim: usize,
        code_len: usize,
        iterations: usize,
        seed: u64,
    ) -> Result<(Self, ItqTrainReport)> {
        if input_dim == 0 || !samples.len().is_multiple_of(input_dim) {
            return Err(Error::invalid("sample buffer is not a whole number of rows"));
        }
        let n = samples.len() / input_dim;
        let x = DMatrix::from_row_iterator(n, input_dim, samples.iter().map(|&v| v as f64));
        let pca = fit_pca(&x, code_len)?;
        let projected = pca.transform(&x);
        let (rotation, report) = train_itq(&projected, iterations, seed)?;
        let model = Self::from_matrices(pca.mean.as_slice(), &pca.projection, &rotation)?;
        Ok((model, report))
    }

    pub fn train_corpus(corpus: &FeatureCorpus, code_len: usize, iterations: usize, seed: u64) -> Result<(Self, ItqTrainReport)> {
        Self::train(corpus.data(), corpus.dim(), code_len, iterations, seed)
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn code_len(&self) -> usize {
        self.code_len
    }

    pub fn mean(&self) -> &[f32] {
        &self.mean
    }

    /// `D × c`, row-major.
    pub fn projection(&self) -> &[f32] {
        &self.projection
    }

    /// `c × c`, row-major.
    pub fn rotation(&self) -> &[f32] {
        &self.rotation
    }

    /// Effective layer weights `W = P·R`, `D × c` row-major.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Layer pre-activations `t_i = (x − μ)·W_i`.
    pub fn pre_activations(&self, x: &[f32]) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        let mut t = vec![0.0; self.code_len];
        self.accumulate(x, &mut t);
        Ok(t)
    }

    /// Sigmoid outputs `υ_i = σ(t_i)`.
    pub fn activations(&self, x: &[f32]) -> Result<Vec<f64>> {
        Ok(self.pre_activations(x)?.into_iter().map(sigmoid).collect())
    }

    /// Code with bit `i` set iff `υ_i > 0.5`; bit 0 is the least significant.
    pub fn encode_vector(&self, x: &[f32]) -> Result<u64> {
        self.check_dim(x.len())?;
        let mut t = vec![0.0; self.code_len];
        self.accumulate(x, &mut t);
        Ok(pack_bits(&t))
    }

    pub fn encode_feature_map(&self, fmap: &FeatureMap) -> Result<BinaryCodeMap> {
        if fmap.channels() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                actual: fmap.channels(),
            });
        }
        let mut x = vec![0.0f32; self.input_dim];
        let mut t = vec![0.0; self.code_len];
        let mut codes = Vec::with_capacity(fmap.height() * fmap.width());
        for y in 0..fmap.height() {
            for col in 0..fmap.width() {
                fmap.vector_into(y, col, &mut x);
                t.iter_mut().for_each(|v| *v = 0.0);
                self.accumulate(&x, &mut t);
                codes.push(pack_bits(&t));
            }
        }
        Ok(BinaryCodeMap::from_parts(
            fmap.height(),
            fmap.width(),
            self.code_len,
            codes,
            fmap.source_height(),
            fmap.source_width(),
        ))
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                actual: len,
            });
        }
        Ok(())
    }

    fn accumulate(&self, x: &[f32], t: &mut [f64]) {
        for (d, (&xd, &mu)) in x.iter().zip(&self.mean).enumerate() {
            let centered = xd as f64 - mu as f64;
            let row = &self.weights[d * self.code_len..(d + 1) * self.code_len];
            for (ti, w) in t.iter_mut().zip(row) {
                *ti += centered * w;
            }
        }
    }
}

fn pack_bits(t: &[f64]) -> u64 {
    t.iter()
        .enumerate()
        .fold(0u64, |code, (i, &ti)| if threshold(sigmoid(ti)) { code | 1 << i } else { code })
}

fn to_matrix(rows: usize, cols: usize, data: &[f32]) -> DMatrix<f64> {
    DMatrix::from_row_iterator(rows, cols, data.iter().map(|&v| v as f64))
}

fn row_major(m: &DMatrix<f64>) -> Vec<f32> {
    m.row_iter().flat_map(|r| r.iter().map(|&v| v as f32).collect::<Vec<_>>()).collect()
}

/// Layout: header, then `μ`, `P` (row-major), `R` (row-major) as `f32` LE.
pub fn encode_model(model: &HashModel) -> Vec<u8> {
    let d = model.input_dim;
    let c = model.code_len;
    let mut out = Vec::with_capacity(MODEL_HEADER_LEN + 4 * (d + d * c + c * c));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(d as u32).to_le_bytes());
    out.extend_from_slice(&(c as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for v in model.mean.iter().chain(&model.projection).chain(&model.rotation) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_model(bytes: &[u8]) -> Result<HashModel> {
    let mut r = ByteReader::new(bytes);
    r.magic(MAGIC)?;
    let d = r.u32()? as usize;
    let c = r.u32()? as usize;
    if d == 0 {
        return Err(FormatError::new(4, FormatErrorKind::ZeroDimension).into());
    }
    if c == 0 || c > MAX_CODE_LEN || c > d {
        return Err(FormatError::new(8, FormatErrorKind::InvalidGeometry(format!("code length {c}"))).into());
    }
    if r.u32()? != 0 {
        return Err(FormatError::new(12, FormatErrorKind::NonZeroReserved).into());
    }
    let floats = (d as u64) * (1 + c as u64) + (c * c) as u64;
    r.expect_payload(4 * floats)?;
    let mean = r.finite_f32s(d)?;
    let projection = r.finite_f32s(d * c)?;
    let rotation = r.finite_f32s(c * c)?;
    HashModel::new(d, c, mean, projection, rotation)
}

pub fn save_model(model: &HashModel, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_model(model))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<HashModel> {
    decode_model(&read_bytes(path.as_ref())?)
}
