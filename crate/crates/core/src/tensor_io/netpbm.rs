//! Binary Netpbm: P6 (RGB, maxval 255) images and P5 label maps.
//!
//! Label maps are written with maxval 65535 and big-endian 16-bit samples. The
//! reader also accepts 8-bit P5 (maxval < 256) since that is what most annotation
//! tools emit for small label counts.

use std::path::Path;

use super::{read_bytes, write_bytes};
use crate::error::{Error, FormatError, FormatErrorKind, Result};
use crate::raster::{GroundTruth, LabelMap, RasterImage};

struct Header {
    width: usize,
    height: usize,
    maxval: u32,
    data_offset: usize,
}

fn malformed(offset: usize, msg: impl Into<String>) -> FormatError {
    FormatError::new(offset, FormatErrorKind::Netpbm(msg.into()))
}

fn parse_header(data: &[u8], magic: &[u8; 2]) -> Result<Header, FormatError> {
    if data.len() < 2 || &data[..2] != magic {
        return Err(malformed(
            0,
            format!("expected magic {}", String::from_utf8_lossy(magic)),
        ));
    }
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for field in fields.iter_mut() {
        // whitespace and comments between tokens
        loop {
            match data.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while let Some(&b) = data.get(pos) {
                        pos += 1;
                        if b == b'\n' || b == b'\r' {
                            break;
                        }
                    }
                }
                Some(_) => break,
                None => return Err(malformed(pos, "unexpected end of header")),
            }
        }
        let start = pos;
        let mut value: u32 = 0;
        while let Some(b) = data.get(pos).filter(|b| b.is_ascii_digit()) {
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as u32))
                .ok_or_else(|| malformed(start, "header number overflows"))?;
            pos += 1;
        }
        if pos == start {
            return Err(malformed(start, "expected a decimal number"));
        }
        *field = value;
    }
    match data.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(malformed(pos, "expected a single whitespace after maxval")),
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(FormatError::new(2, FormatErrorKind::ZeroDimension));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(malformed(pos - 1, format!("maxval {maxval} out of range")));
    }
    Ok(Header {
        width: width as usize,
        height: height as usize,
        maxval,
        data_offset: pos,
    })
}

fn check_payload(data: &[u8], header: &Header, bytes_per_pixel: usize) -> Result<(), FormatError> {
    let expected = (header.width as u64) * (header.height as u64) * bytes_per_pixel as u64;
    let actual = (data.len() - header.data_offset) as u64;
    if actual < expected {
        return Err(FormatError::new(
            header.data_offset,
            FormatErrorKind::SizeMismatch { expected, actual },
        ));
    }
    if actual > expected {
        return Err(FormatError::new(
            header.data_offset + expected as usize,
            FormatErrorKind::TrailingBytes { extra: actual - expected },
        ));
    }
    Ok(())
}

pub fn encode_image(image: &RasterImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.reserve(3 * image.len());
    for p in image.pixels() {
        out.extend_from_slice(p);
    }
    out
}

pub fn decode_image(data: &[u8]) -> Result<RasterImage, FormatError> {
    let header = parse_header(data, b"P6")?;
    if header.maxval != 255 {
        return Err(malformed(0, format!("P6 maxval must be 255, got {}", header.maxval)));
    }
    check_payload(data, &header, 3)?;
    let pixels = data[header.data_offset..]
        .chunks_exact(3)
        .map(|c| [c[0], c[1], c[2]])
        .collect();
    RasterImage::new(header.height, header.width, pixels).map_err(|e| malformed(0, e.to_string()))
}

fn decode_raw_labels(data: &[u8]) -> Result<(usize, usize, Vec<u32>), FormatError> {
    let header = parse_header(data, b"P5")?;
    let wide = header.maxval > 255;
    let bpp = if wide { 2 } else { 1 };
    check_payload(data, &header, bpp)?;
    let payload = &data[header.data_offset..];
    let mut raw = Vec::with_capacity(header.width * header.height);
    for (i, chunk) in payload.chunks_exact(bpp).enumerate() {
        let v = if wide {
            u16::from_be_bytes([chunk[0], chunk[1]]) as u32
        } else {
            chunk[0] as u32
        };
        if v > header.maxval {
            return Err(malformed(
                header.data_offset + i * bpp,
                format!("sample {v} exceeds maxval {}", header.maxval),
            ));
        }
        raw.push(v);
    }
    Ok((header.height, header.width, raw))
}

/// Decodes a P5 label map, densifying raw values in sorted order.
pub fn decode_label_map(data: &[u8]) -> Result<LabelMap, FormatError> {
    let (h, w, raw) = decode_raw_labels(data)?;
    LabelMap::from_raw_sorted(h, w, &raw).map_err(|e| malformed(0, e.to_string()))
}

/// Decodes a P5 annotation, keeping [`VOID_LABEL`](crate::VOID_LABEL) pixels as void.
pub fn decode_ground_truth(data: &[u8]) -> Result<GroundTruth, FormatError> {
    let (h, w, raw) = decode_raw_labels(data)?;
    GroundTruth::from_raw(h, w, &raw).map_err(|e| malformed(0, e.to_string()))
}

pub fn encode_label_map(map: &LabelMap) -> Result<Vec<u8>> {
    if map.num_labels() > 65536 {
        return Err(Error::TooManyLabels {
            count: map.num_labels(),
        });
    }
    let mut out = format!("P5\n{} {}\n65535\n", map.width(), map.height()).into_bytes();
    out.reserve(2 * map.len());
    for &l in map.labels() {
        out.extend_from_slice(&(l as u16).to_be_bytes());
    }
    Ok(out)
}

pub fn read_image(path: impl AsRef<Path>) -> Result<RasterImage> {
    Ok(decode_image(&read_bytes(path.as_ref())?)?)
}

pub fn write_image(image: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_image(image))
}

pub fn read_label_map(path: impl AsRef<Path>) -> Result<LabelMap> {
    Ok(decode_label_map(&read_bytes(path.as_ref())?)?)
}

pub fn read_ground_truth(path: impl AsRef<Path>) -> Result<GroundTruth> {
    Ok(decode_ground_truth(&read_bytes(path.as_ref())?)?)
}

pub fn write_label_map(map: &LabelMap, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_label_map(map)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::VOID_LABEL;
    use proptest::prelude::*;

    #[test]
    fn black_2x2_image_bytes() {
        let img = RasterImage::filled(2, 2, [0, 0, 0]).unwrap();
        let bytes = encode_image(&img);
        let header = b"P6\n2 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(&bytes[header.len()..], &[0u8; 12]);
        assert_eq!(decode_image(&bytes).unwrap(), img);
    }

    #[test]
    fn header_comments_and_whitespace() {
        let mut bytes = b"P6 # made by hand\n 1\t1 # size\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3]);
        assert_eq!(decode_image(&bytes).unwrap().get(0, 0), [1, 2, 3]);
    }

    #[test]
    fn label_round_trip_2x2() {
        let m = LabelMap::new(2, 2, vec![0, 1, 2, 3]).unwrap();
        let bytes = encode_label_map(&m).unwrap();
        assert!(bytes.starts_with(b"P5\n2 2\n65535\n"));
        assert_eq!(decode_label_map(&bytes).unwrap(), m);
    }

    #[test]
    fn raw_values_are_densified() {
        let mut bytes = b"P5\n2 2\n65535\n".to_vec();
        for v in [5u16, 5, 9, 9] {
            bytes.extend_from_slice(&v.to_be_bytes());
        }
        assert_eq!(decode_label_map(&bytes).unwrap().labels(), &[0, 0, 1, 1]);
    }

    #[test]
    fn eight_bit_labels_and_void_ground_truth() {
        let mut bytes = b"P5\n3 1\n255\n".to_vec();
        bytes.extend_from_slice(&[4, 4, 1]);
        assert_eq!(decode_label_map(&bytes).unwrap().labels(), &[1, 1, 0]);

        let mut bytes = b"P5\n3 1\n65535\n".to_vec();
        for v in [3u16, 65535, 8] {
            bytes.extend_from_slice(&v.to_be_bytes());
        }
        let gt = decode_ground_truth(&bytes).unwrap();
        assert_eq!(gt.labels(), &[0, VOID_LABEL, 1]);
    }

    #[test]
    fn too_many_labels() {
        let m = LabelMap::new(1, 65537, (0..65537).collect()).unwrap();
        assert!(matches!(encode_label_map(&m), Err(Error::TooManyLabels { count: 65537 })));
    }

    #[test]
    fn malformed_headers() {
        assert!(decode_image(b"P3\n1 1\n255\n").is_err());
        assert!(decode_image(b"P6\n1 1\n65535\n\0\0\0\0\0\0").is_err());
        assert!(decode_image(b"P6\n1 1\n255\n\0\0").is_err());
        assert!(decode_label_map(b"P5\n0 1\n255\n").is_err());
        assert!(decode_label_map(b"P5\n1 1").is_err());
    }

    proptest! {
        #[test]
        fn label_round_trip(h in 1usize..6, w in 1usize..6, seed in proptest::collection::vec(0u32..7, 36)) {
            let raw: Vec<u32> = seed[..h * w].to_vec();
            let m = LabelMap::from_raw_sorted(h, w, &raw).unwrap();
            let back = decode_label_map(&encode_label_map(&m).unwrap()).unwrap();
            prop_assert_eq!(back, m);
        }

        #[test]
        fn fuzz_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
            let _ = decode_image(&bytes);
            let _ = decode_label_map(&bytes);
            let _ = decode_ground_truth(&bytes);
        }

        #[test]
        fn fuzz_after_valid_magic(tail in proptest::collection::vec(any::<u8>(), 0..64)) {
            let mut p5 = b"P5 ".to_vec();
            p5.extend(&tail);
            let _ = decode_label_map(&p5);
            let mut p6 = b"P6 ".to_vec();
            p6.extend(&tail);
            let _ = decode_image(&p6);
        }
    }
}
