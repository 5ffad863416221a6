use crate::error::{Error, Result};
use crate::itq::BinaryCodeMap;
use crate::raster::LabelMap;

/// Nearest-cell upsampling: pixel `(r, c)` takes the code at
/// `(⌊r·H'/H⌋, ⌊c·W'/W⌋)`.
pub fn upsample_codes(binmap: &BinaryCodeMap, height: usize, width: usize) -> Result<Vec<u64>> {
    if height != binmap.source_height() || width != binmap.source_width() {
        return Err(Error::GeometryMismatch {
            expected_height: binmap.source_height(),
            expected_width: binmap.source_width(),
            actual_height: height,
            actual_width: width,
        });
    }
    let cols: Vec<usize> = (0..width).map(|c| c * binmap.width() / width).collect();
    let mut out = Vec::with_capacity(height * width);
    for r in 0..height {
        let cell_row = r * binmap.height() / height;
        out.extend(cols.iter().map(|&cc| binmap.code_at(cell_row, cc)));
    }
    Ok(out)
}

/// Per-bit majority vote over each superpixel's pixels; a tie gives `0`.
pub fn assign_superpixel_codes(superpixels: &LabelMap, pixel_codes: &[u64], code_len: usize) -> Result<Vec<u64>> {
    if pixel_codes.len() != superpixels.len() {
        return Err(Error::DimensionMismatch {
            expected: superpixels.len(),
            actual: pixel_codes.len(),
        });
    }
    if code_len == 0 || code_len > 64 {
        return Err(Error::invalid(format!("code length {code_len} outside 1..=64")));
    }
    let n = superpixels.num_labels();
    let mut ones = vec![0u32; n * code_len];
    let mut members = vec![0u32; n];
    for (&sp, &code) in superpixels.labels().iter().zip(pixel_codes) {
        let sp = sp as usize;
        members[sp] += 1;
        let counts = &mut ones[sp * code_len..(sp + 1) * code_len];
        for (bit, count) in counts.iter_mut().enumerate() {
            *count += (code >> bit & 1) as u32;
        }
    }
    Ok((0..n)
        .map(|sp| {
            ones[sp * code_len..(sp + 1) * code_len]
                .iter()
                .enumerate()
                .fold(0u64, |code, (bit, &count)| {
                    if 2 * count > members[sp] {
                        code | 1 << bit
                    } else {
                        code
                    }
                })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binmap(h: usize, w: usize, sh: usize, sw: usize) -> BinaryCodeMap {
        BinaryCodeMap::new(h, w, 8, (0..(h * w) as u64).collect(), sh, sw).unwrap()
    }

    #[test]
    fn exact_two_by_two_scaling() {
        let codes = upsample_codes(&binmap(2, 2, 4, 4), 4, 4).unwrap();
        assert_eq!(codes, vec![0, 0, 1, 1, 0, 0, 1, 1, 2, 2, 3, 3, 2, 2, 3, 3]);
    }

    #[test]
    fn single_cell_fills_image() {
        let codes = upsample_codes(&binmap(1, 1, 5, 7), 5, 7).unwrap();
        assert!(codes.iter().all(|&c| c == 0));
    }

    #[test]
    fn three_cells_over_ten_pixels() {
        let codes = upsample_codes(&binmap(3, 3, 10, 10), 10, 10).unwrap();
        // ⌊r·3/10⌋ for r = 0..10
        let band = [0, 0, 0, 0, 1, 1, 1, 2, 2, 2];
        for r in 0..10 {
            for c in 0..10 {
                assert_eq!(codes[r * 10 + c], (band[r] * 3 + band[c]) as u64);
            }
        }
    }

    #[test]
    fn geometry_mismatch() {
        assert!(upsample_codes(&binmap(2, 2, 4, 4), 4, 5).is_err());
    }

    #[test]
    fn majority_votes() {
        let sp = LabelMap::new(1, 3, vec![0, 0, 0]).unwrap();
        assert_eq!(assign_superpixel_codes(&sp, &[0b101; 3], 3).unwrap(), vec![0b101]);
        assert_eq!(assign_superpixel_codes(&sp, &[0b1, 0b1, 0b0], 1).unwrap(), vec![0b1]);
        let sp = LabelMap::new(1, 2, vec![0, 0]).unwrap();
        assert_eq!(assign_superpixel_codes(&sp, &[0b1, 0b0], 1).unwrap(), vec![0b0]);
    }

    #[test]
    fn per_bit_not_modal() {
        // codes 0b01, 0b10, 0b11: each bit is set in 2 of 3 pixels
        let sp = LabelMap::new(1, 3, vec![0, 0, 0]).unwrap();
        assert_eq!(assign_superpixel_codes(&sp, &[0b01, 0b10, 0b11], 2).unwrap(), vec![0b11]);
    }
}
