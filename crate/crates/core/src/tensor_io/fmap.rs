use std::path::Path;

use super::{payload_len, read_bytes, write_bytes, ByteReader};
use crate::error::{Error, FormatError, FormatErrorKind, Result};

const MAGIC: &[u8; 4] = b"FMAP";
const VERSION: u8 = 0x01;
const DTYPE_F32_LE: u8 = 0x00;
const NDIM: u8 = 0x03;

/// Bytes before the payload: magic, version, dtype, ndim, reserved, 3 dims, 2 source dims.
pub const FMAP_HEADER_LEN: usize = 28;

/// A `channels × height × width` grid of activations, channel-major
/// (`index = c·H·W + y·W + x`), plus the pixel size of the image it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    channels: usize,
    height: usize,
    width: usize,
    source_height: usize,
    source_width: usize,
    data: Vec<f32>,
}

impl FeatureMap {
    pub fn new(
        channels: usize,
        height: usize,
        width: usize,
        source_height: usize,
        source_width: usize,
        data: Vec<f32>,
    ) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(Error::invalid("feature map dimensions must be positive"));
        }
        if source_height < height || source_width < width {
            return Err(Error::invalid(format!(
                "feature grid {height}x{width} is finer than source image {source_height}x{source_width}"
            )));
        }
        if data.len() != channels * height * width {
            return Err(Error::DimensionMismatch {
                expected: channels * height * width,
                actual: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite feature value at index {i}")));
        }
        Ok(Self {
            channels,
            height,
            width,
            source_height,
            source_width,
            data,
        })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn source_height(&self) -> usize {
        self.source_height
    }

    pub fn source_width(&self) -> usize {
        self.source_width
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    /// One channel as a row-major `height × width` plane.
    pub fn channel(&self, c: usize) -> &[f32] {
        let plane = self.height * self.width;
        &self.data[c * plane..(c + 1) * plane]
    }

    /// Copies the feature vector at grid cell `(y, x)` into `out`.
    pub fn vector_into(&self, y: usize, x: usize, out: &mut [f32]) {
        let plane = self.height * self.width;
        let offset = y * self.width + x;
        for (c, slot) in out.iter_mut().enumerate().take(self.channels) {
            *slot = self.data[c * plane + offset];
        }
    }

    pub fn vector(&self, y: usize, x: usize) -> Vec<f32> {
        let mut v = vec![0.0; self.channels];
        self.vector_into(y, x, &mut v);
        v
    }

    /// All cell vectors as an `(height·width) × channels` row-major matrix.
    pub fn to_rows(&self) -> Vec<f32> {
        let cells = self.height * self.width;
        let mut rows = vec![0.0; cells * self.channels];
        for c in 0..self.channels {
            for (cell, v) in self.channel(c).iter().enumerate() {
                rows[cell * self.channels + c] = *v;
            }
        }
        rows
    }
}

pub fn encode_feature_map(fmap: &FeatureMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(FMAP_HEADER_LEN + 4 * fmap.data.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[VERSION, DTYPE_F32_LE, NDIM, 0x00]);
    for d in [fmap.channels, fmap.height, fmap.width, fmap.source_height, fmap.source_width] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for v in &fmap.data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_feature_map(bytes: &[u8]) -> Result<FeatureMap, FormatError> {
    let mut r = ByteReader::new(bytes);
    r.magic(MAGIC)?;
    let version = r.u8()?;
    if version != VERSION {
        return Err(FormatError::new(4, FormatErrorKind::UnsupportedVersion(version)));
    }
    let dtype = r.u8()?;
    if dtype != DTYPE_F32_LE {
        return Err(FormatError::new(5, FormatErrorKind::UnsupportedDtype(dtype)));
    }
    let ndim = r.u8()?;
    if ndim != NDIM {
        return Err(FormatError::new(6, FormatErrorKind::UnsupportedNdim(ndim)));
    }
    if r.u8()? != 0 {
        return Err(FormatError::new(7, FormatErrorKind::NonZeroReserved));
    }
    let mut dims = [0u32; 5];
    for (i, d) in dims.iter_mut().enumerate() {
        *d = r.u32()?;
        if *d == 0 {
            return Err(FormatError::new(8 + 4 * i, FormatErrorKind::ZeroDimension));
        }
    }
    let [channels, height, width, source_height, source_width] = dims;
    if source_height < height || source_width < width {
        return Err(FormatError::new(
            20,
            FormatErrorKind::InvalidGeometry(format!(
                "feature grid {height}x{width} is finer than source image {source_height}x{source_width}"
            )),
        ));
    }
    let expected = payload_len(&[channels, height, width], 4).unwrap_or(u64::MAX);
    r.expect_payload(expected)?;
    let data = r.finite_f32s((expected / 4) as usize)?;
    Ok(FeatureMap {
        channels: channels as usize,
        height: height as usize,
        width: width as usize,
        source_height: source_height as usize,
        source_width: source_width as usize,
        data,
    })
}

pub fn read_feature_map(path: impl AsRef<Path>) -> Result<FeatureMap> {
    Ok(decode_feature_map(&read_bytes(path.as_ref())?)?)
}

/// The map's invariants are enforced at construction, so any `FeatureMap` is writable.
pub fn write_feature_map(fmap: &FeatureMap, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_feature_map(fmap))
}
