//! Iterative-quantization hashing of feature vectors into short binary codes.
//!
//! Training is PCA to `code_len` dimensions followed by an alternating search for
//! the orthogonal rotation that minimises the quantization loss
//! `‖B − V·R‖²_F`. At inference the learned weights act as a single linear
//! layer `t = (x − μ)·P·R`, squashed by a sigmoid and thresholded at 0.5.

mod model;
mod pca;
mod rotation;

pub use model::{load_model, save_model, decode_model, encode_model, HashModel, MODEL_HEADER_LEN};
pub use pca::{fit_pca, fit_pca_with, Pca, PcaRoute};
pub use rotation::{
    initial_rotation, procrustes_rotation, quantization_loss, quantization_loss_with, sign_codes, train_itq,
    train_itq_from, ItqTrainReport,
};

use crate::error::{Error, Result};

pub const DEFAULT_CODE_LEN: usize = 8;
pub const DEFAULT_ITERATIONS: usize = 50;
pub const MAX_CODE_LEN: usize = 64;

/// Logistic sigmoid.
pub fn sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Threshold applied to the sigmoid output: `0` when `υ ≤ 0.5`, `1` otherwise.
pub fn threshold(activation: f64) -> bool {
    activation > 0.5
}

/// A grid of `code_len`-bit codes aligned with a feature map; bit `i` of a code is
/// the output of hash neuron `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryCodeMap {
    height: usize,
    width: usize,
    code_len: usize,
    codes: Vec<u64>,
    source_height: usize,
    source_width: usize,
}

impl BinaryCodeMap {
    pub fn new(
        height: usize,
        width: usize,
        code_len: usize,
        codes: Vec<u64>,
        source_height: usize,
        source_width: usize,
    ) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::invalid("code map dimensions must be positive"));
        }
        if code_len == 0 || code_len > MAX_CODE_LEN {
            return Err(Error::invalid(format!("code length {code_len} outside 1..={MAX_CODE_LEN}")));
        }
        if source_height < height || source_width < width {
            return Err(Error::invalid("code grid is finer than source image"));
        }
        if codes.len() != height * width {
            return Err(Error::DimensionMismatch {
                expected: height * width,
                actual: codes.len(),
            });
        }
        if code_len < 64 {
            if let Some(bad) = codes.iter().find(|&&c| c >> code_len != 0) {
                return Err(Error::invalid(format!("code {bad:#x} exceeds {code_len} bits")));
            }
        }
        Ok(Self::from_parts(height, width, code_len, codes, source_height, source_width))
    }

    pub(crate) fn from_parts(
        height: usize,
        width: usize,
        code_len: usize,
        codes: Vec<u64>,
        source_height: usize,
        source_width: usize,
    ) -> Self {
        Self {
            height,
            width,
            code_len,
            codes,
            source_height,
            source_width,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn code_len(&self) -> usize {
        self.code_len
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    pub fn code_at(&self, y: usize, x: usize) -> u64 {
        self.codes[y * self.width + x]
    }

    pub fn source_height(&self) -> usize {
        self.source_height
    }

    pub fn source_width(&self) -> usize {
        self.source_width
    }
}
