//! Bit-exact file formats: FMAP feature maps, FVEC corpora, BMAP code maps, and
//! binary Netpbm images (P6) and label maps (P5, 16-bit).
//!
//! Every decoder works on an in-memory byte slice and is total: malformed input
//! yields a [`FormatError`](crate::FormatError) carrying the offending byte offset.

mod bmap;
mod fmap;
mod fvec;
mod netpbm;

use std::path::Path;

pub use bmap::{decode_code_map, encode_code_map, read_code_map, write_code_map, BMAP_HEADER_LEN};
pub use fmap::{decode_feature_map, encode_feature_map, read_feature_map, write_feature_map, FeatureMap, FMAP_HEADER_LEN};
pub use fvec::{decode_corpus, encode_corpus, read_corpus, write_corpus, FeatureCorpus, FVEC_HEADER_LEN};
pub use netpbm::{
    decode_ground_truth, decode_image, decode_label_map, encode_image, encode_label_map, read_ground_truth, read_image,
    read_label_map, write_image, write_label_map,
};

use crate::error::{FormatError, FormatErrorKind, Result};

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    Ok(std::fs::read(path)?)
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Little-endian cursor with offset-carrying errors.
pub(crate) struct ByteReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub(crate) fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        if self.remaining() < n {
            return Err(FormatError::new(
                self.pos,
                FormatErrorKind::Truncated {
                    needed: n as u64,
                    available: self.remaining() as u64,
                },
            ));
        }
        let out = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub(crate) fn magic(&mut self, expected: &[u8; 4]) -> Result<(), FormatError> {
        let start = self.pos;
        let found = &self.data[start..self.data.len().min(start + 4)];
        if found != expected {
            return Err(FormatError::new(
                start,
                FormatErrorKind::BadMagic {
                    expected: *expected,
                    found: found.to_vec(),
                },
            ));
        }
        self.pos += 4;
        Ok(())
    }

    pub(crate) fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u32(&mut self) -> Result<u32, FormatError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub(crate) fn u64(&mut self) -> Result<u64, FormatError> {
        let b = self.take(8)?;
        Ok(u64::from_le_bytes(b.try_into().expect("8 bytes")))
    }

    /// Checks the unread tail holds exactly `expected` bytes.
    pub(crate) fn expect_payload(&self, expected: u64) -> Result<(), FormatError> {
        let actual = self.remaining() as u64;
        if actual < expected {
            return Err(FormatError::new(self.pos, FormatErrorKind::SizeMismatch { expected, actual }));
        }
        if actual > expected {
            return Err(FormatError::new(
                self.pos + expected as usize,
                FormatErrorKind::TrailingBytes { extra: actual - expected },
            ));
        }
        Ok(())
    }

    /// Reads `count` finite little-endian f32 values.
    pub(crate) fn finite_f32s(&mut self, count: usize) -> Result<Vec<f32>, FormatError> {
        let start = self.pos;
        let bytes = self.take(count * 4)?;
        bytes
            .chunks_exact(4)
            .enumerate()
            .map(|(i, b)| {
                let v = f32::from_le_bytes([b[0], b[1], b[2], b[3]]);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(FormatError::new(start + 4 * i, FormatErrorKind::NonFinite))
                }
            })
            .collect()
    }
}

/// Product of dimensions and element size, `None` on overflow.
pub(crate) fn payload_len(dims: &[u32], elem: u64) -> Option<u64> {
    dims.iter().try_fold(elem, |acc, &d| acc.checked_mul(d as u64))
}
