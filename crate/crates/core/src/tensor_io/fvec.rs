use std::path::Path;

use super::{payload_len, read_bytes, write_bytes, ByteReader};
use crate::error::{Error, FormatError, FormatErrorKind, Result};

const MAGIC: &[u8; 4] = b"FVEC";

/// Magic, `u32` row count, `u32` dimension, `u32` reserved.
pub const FVEC_HEADER_LEN: usize = 16;

/// A flat `rows × dim` matrix of feature vectors used to train the hash.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureCorpus {
    rows: usize,
    dim: usize,
    data: Vec<f32>,
}

impl FeatureCorpus {
    pub fn new(rows: usize, dim: usize, data: Vec<f32>) -> Result<Self> {
        if rows == 0 || dim == 0 {
            return Err(Error::invalid("corpus must have at least one row and one column"));
        }
        if data.len() != rows * dim {
            return Err(Error::DimensionMismatch {
                expected: rows * dim,
                actual: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("corpus contains non-finite values"));
        }
        Ok(Self { rows, dim, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Stacks every cell vector of the given maps.
    pub fn from_feature_maps<'a>(maps: impl IntoIterator<Item = &'a super::FeatureMap>) -> Result<Self> {
        let mut dim = None;
        let mut data = Vec::new();
        for m in maps {
            match dim {
                None => dim = Some(m.channels()),
                Some(d) if d != m.channels() => {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        actual: m.channels(),
                    })
                }
                _ => {}
            }
            data.extend(m.to_rows());
        }
        let dim = dim.ok_or_else(|| Error::invalid("no feature maps given"))?;
        Self::new(data.len() / dim, dim, data)
    }

    pub fn concat(parts: &[FeatureCorpus]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::invalid("no corpora given"))?;
        let mut data = Vec::new();
        for p in parts {
            if p.dim != first.dim {
                return Err(Error::DimensionMismatch {
                    expected: first.dim,
                    actual: p.dim,
                });
            }
            data.extend_from_slice(&p.data);
        }
        Self::new(data.len() / first.dim, first.dim, data)
    }
}

pub fn encode_corpus(corpus: &FeatureCorpus) -> Vec<u8> {
    let mut out = Vec::with_capacity(FVEC_HEADER_LEN + 4 * corpus.data.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(corpus.rows as u32).to_le_bytes());
    out.extend_from_slice(&(corpus.dim as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for v in &corpus.data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_corpus(bytes: &[u8]) -> Result<FeatureCorpus, FormatError> {
    let mut r = ByteReader::new(bytes);
    r.magic(MAGIC)?;
    let rows = r.u32()?;
    if rows == 0 {
        return Err(FormatError::new(4, FormatErrorKind::ZeroDimension));
    }
    let dim = r.u32()?;
    if dim == 0 {
        return Err(FormatError::new(8, FormatErrorKind::ZeroDimension));
    }
    if r.u32()? != 0 {
        return Err(FormatError::new(12, FormatErrorKind::NonZeroReserved));
    }
    let expected = payload_len(&[rows, dim], 4).unwrap_or(u64::MAX);
    r.expect_payload(expected)?;
    let data = r.finite_f32s((expected / 4) as usize)?;
    Ok(FeatureCorpus {
        rows: rows as usize,
        dim: dim as usize,
        data,
    })
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<FeatureCorpus> {
    Ok(decode_corpus(&read_bytes(path.as_ref())?)?)
}

pub fn write_corpus(corpus: &FeatureCorpus, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_corpus(corpus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let c = FeatureCorpus::new(2, 3, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let bytes = encode_corpus(&c);
        assert_eq!(&bytes[..4], b"FVEC");
        assert_eq!(&bytes[4..8], &2u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &3u32.to_le_bytes());
        assert_eq!(&bytes[12..16], &[0, 0, 0, 0]);
        assert_eq!(bytes.len(), FVEC_HEADER_LEN + 24);
        assert_eq!(decode_corpus(&bytes).unwrap(), c);
    }

    #[test]
    fn truncated_payload() {
        let c = FeatureCorpus::new(2, 2, vec![1.0; 4]).unwrap();
        let bytes = encode_corpus(&c);
        let err = decode_corpus(&bytes[..bytes.len() - 3]).unwrap_err();
        assert!(matches!(err.kind, FormatErrorKind::SizeMismatch { .. }));
        let err = decode_corpus(&bytes[..6]).unwrap_err();
        assert!(matches!(err.kind, FormatErrorKind::Truncated { .. }));
    }

    #[test]
    fn stacks_feature_maps() {
        let a = super::super::FeatureMap::new(2, 1, 2, 1, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let c = FeatureCorpus::from_feature_maps([&a, &a]).unwrap();
        assert_eq!(c.rows(), 4);
        assert_eq!(c.row(1), &[2.0, 4.0]);
    }

    proptest! {
        #[test]
        fn fuzz_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
            let _ = decode_corpus(&bytes);
        }
    }
}
