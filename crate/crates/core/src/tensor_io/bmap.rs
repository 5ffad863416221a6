//! BMAP: per-cell binary codes.
//!
//! Layout: `"BMAP"`, version `0x01`, code length (1..=64), two zero bytes, then
//! `u32` LE height, width, source height, source width, then `height·width`
//! codes as `u64` LE in row-major order.

use std::path::Path;

use super::{payload_len, read_bytes, write_bytes, ByteReader};
use crate::error::{FormatError, FormatErrorKind, Result};
use crate::itq::BinaryCodeMap;

const MAGIC: &[u8; 4] = b"BMAP";
const VERSION: u8 = 0x01;

pub const BMAP_HEADER_LEN: usize = 24;

pub fn encode_code_map(map: &BinaryCodeMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(BMAP_HEADER_LEN + 8 * map.codes().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[VERSION, map.code_len() as u8, 0, 0]);
    for d in [map.height(), map.width(), map.source_height(), map.source_width()] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for c in map.codes() {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out
}

pub fn decode_code_map(bytes: &[u8]) -> Result<BinaryCodeMap, FormatError> {
    let mut r = ByteReader::new(bytes);
    r.magic(MAGIC)?;
    let version = r.u8()?;
    if version != VERSION {
        return Err(FormatError::new(4, FormatErrorKind::UnsupportedVersion(version)));
    }
    let code_len = r.u8()?;
    if code_len == 0 || code_len > 64 {
        return Err(FormatError::new(
            5,
            FormatErrorKind::InvalidGeometry(format!("code length {code_len} outside 1..=64")),
        ));
    }
    if r.u8()? != 0 || r.u8()? != 0 {
        return Err(FormatError::new(6, FormatErrorKind::NonZeroReserved));
    }
    let mut dims = [0u32; 4];
    for (i, d) in dims.iter_mut().enumerate() {
        *d = r.u32()?;
        if *d == 0 {
            return Err(FormatError::new(8 + 4 * i, FormatErrorKind::ZeroDimension));
        }
    }
    let [height, width, source_height, source_width] = dims;
    if source_height < height || source_width < width {
        return Err(FormatError::new(
            16,
            FormatErrorKind::InvalidGeometry("code grid is finer than source image".into()),
        ));
    }
    let expected = payload_len(&[height, width], 8).unwrap_or(u64::MAX);
    r.expect_payload(expected)?;
    let mut codes = Vec::with_capacity((expected / 8) as usize);
    for _ in 0..expected / 8 {
        let at = r.pos();
        let code = r.u64()?;
        if code_len < 64 && code >> code_len != 0 {
            return Err(FormatError::new(
                at,
                FormatErrorKind::InvalidGeometry(format!("code {code:#x} exceeds {code_len} bits")),
            ));
        }
        codes.push(code);
    }
    Ok(BinaryCodeMap::from_parts(
        height as usize,
        width as usize,
        code_len as usize,
        codes,
        source_height as usize,
        source_width as usize,
    ))
}

pub fn read_code_map(path: impl AsRef<Path>) -> Result<BinaryCodeMap> {
    Ok(decode_code_map(&read_bytes(path.as_ref())?)?)
}

pub fn write_code_map(map: &BinaryCodeMap, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_code_map(map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn round_trip_and_bit_bound() {
        let map = BinaryCodeMap::new(1, 3, 2, vec![0, 3, 1], 2, 5).unwrap();
        let bytes = encode_code_map(&map);
        assert_eq!(bytes.len(), BMAP_HEADER_LEN + 24);
        assert_eq!(decode_code_map(&bytes).unwrap(), map);

        let mut bad = bytes.clone();
        bad[BMAP_HEADER_LEN] = 4;
        let err = decode_code_map(&bad).unwrap_err();
        assert_eq!(err.offset, BMAP_HEADER_LEN as u64);
    }

    proptest! {
        #[test]
        fn fuzz_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..80)) {
            let _ = decode_code_map(&bytes);
        }
    }
}
