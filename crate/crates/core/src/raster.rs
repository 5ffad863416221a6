//! Pixel grids: RGB images, dense label maps and ground-truth annotations.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Raw label value marking ground-truth pixels that take no part in scoring.
pub const VOID_LABEL: u32 = 65535;

/// 8-bit RGB image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    height: usize,
    width: usize,
    pixels: Vec<[u8; 3]>,
}

impl RasterImage {
    pub fn new(height: usize, width: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::invalid("image dimensions must be positive"));
        }
        if pixels.len() != height * width {
            return Err(Error::DimensionMismatch {
                expected: height * width,
                actual: pixels.len(),
            });
        }
        Ok(Self {
            height,
            width,
            pixels,
        })
    }

    pub fn filled(height: usize, width: usize, rgb: [u8; 3]) -> Result<Self> {
        Self::new(height, width, vec![rgb; height * width])
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Result<Self> {
        let mut pixels = Vec::with_capacity(height * width);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(y, x));
            }
        }
        Self::new(height, width, pixels)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn get(&self, y: usize, x: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }
}

/// A partition of the pixel grid into `num_labels` regions.
///
/// Labels are dense: every value in `0..num_labels` occurs at least once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    height: usize,
    width: usize,
    labels: Vec<u32>,
    num_labels: usize,
}

impl LabelMap {
    /// Wraps already-dense labels, validating density.
    pub fn new(height: usize, width: usize, labels: Vec<u32>) -> Result<Self> {
        check_geometry(height, width, labels.len())?;
        let num_labels = labels.iter().copied().max().map_or(0, |m| m as usize + 1);
        let mut seen = vec![false; num_labels];
        for &l in &labels {
            seen[l as usize] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(format!("label {missing} does not occur; labels must be dense")));
        }
        Ok(Self {
            height,
            width,
            labels,
            num_labels,
        })
    }

    /// Densifies arbitrary raw values by rank: the i-th smallest distinct raw value becomes `i`.
    pub fn from_raw_sorted(height: usize, width: usize, raw: &[u32]) -> Result<Self> {
        check_geometry(height, width, raw.len())?;
        let mut distinct = raw.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let labels = raw
            .iter()
            .map(|v| distinct.binary_search(v).expect("value present") as u32)
            .collect();
        Ok(Self {
            height,
            width,
            labels,
            num_labels: distinct.len(),
        })
    }

    /// Densifies arbitrary raw values in raster order of first occurrence.
    pub fn from_partition(height: usize, width: usize, raw: &[u32]) -> Result<Self> {
        check_geometry(height, width, raw.len())?;
        let mut remap: HashMap<u32, u32> = HashMap::new();
        let labels = raw
            .iter()
            .map(|v| {
                let next = remap.len() as u32;
                *remap.entry(*v).or_insert(next)
            })
            .collect();
        Ok(Self {
            height,
            width,
            labels,
            num_labels: remap.len(),
        })
    }

    pub fn constant(height: usize, width: usize) -> Result<Self> {
        Self::new(height, width, vec![0; height * width])
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn get(&self, y: usize, x: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Pixel count per label.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_labels];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    /// Relabels in raster order of first occurrence, so two maps describing the same
    /// partition compare equal.
    pub fn canonical(&self) -> LabelMap {
        LabelMap::from_partition(self.height, self.width, &self.labels).expect("valid geometry")
    }

    pub fn same_partition(&self, other: &LabelMap) -> bool {
        self.height == other.height && self.width == other.width && self.canonical().labels == other.canonical().labels
    }

    /// Replaces each label `l` with `mapping[l]`, re-densifying the result.
    pub fn remap(&self, mapping: &[u32]) -> Result<LabelMap> {
        if mapping.len() != self.num_labels {
            return Err(Error::DimensionMismatch {
                expected: self.num_labels,
                actual: mapping.len(),
            });
        }
        let raw: Vec<u32> = self.labels.iter().map(|&l| mapping[l as usize]).collect();
        LabelMap::from_partition(self.height, self.width, &raw)
    }

    pub fn same_geometry(&self, height: usize, width: usize) -> Result<()> {
        if self.height != height || self.width != width {
            return Err(Error::GeometryMismatch {
                expected_height: height,
                expected_width: width,
                actual_height: self.height,
                actual_width: self.width,
            });
        }
        Ok(())
    }
}

fn check_geometry(height: usize, width: usize, len: usize) -> Result<()> {
    if height == 0 || width == 0 {
        return Err(Error::invalid("label map dimensions must be positive"));
    }
    if len != height * width {
        return Err(Error::DimensionMismatch {
            expected: height * width,
            actual: len,
        });
    }
    Ok(())
}

/// Ground-truth annotation. Segments are dense in `0..num_segments`; void pixels carry
/// [`VOID_LABEL`] and are excluded from every intersection and union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    height: usize,
    width: usize,
    labels: Vec<u32>,
    num_segments: usize,
}

impl GroundTruth {
    /// Builds from raw annotation values; `VOID_LABEL` marks void, every other value is a
    /// segment id densified by sort order.
    pub fn from_raw(height: usize, width: usize, raw: &[u32]) -> Result<Self> {
        check_geometry(height, width, raw.len())?;
        let mut distinct: Vec<u32> = raw.iter().copied().filter(|&v| v != VOID_LABEL).collect();
        distinct.sort_unstable();
        distinct.dedup();
        let labels = raw
            .iter()
            .map(|v| {
                if *v == VOID_LABEL {
                    VOID_LABEL
                } else {
                    distinct.binary_search(v).expect("value present") as u32
                }
            })
            .collect();
        Ok(Self {
            height,
            width,
            labels,
            num_segments: distinct.len(),
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn num_segments(&self) -> usize {
        self.num_segments
    }

    pub fn is_void(&self, index: usize) -> bool {
        self.labels[index] == VOID_LABEL
    }
}

impl From<&LabelMap> for GroundTruth {
    fn from(map: &LabelMap) -> Self {
        Self {
            height: map.height,
            width: map.width,
            labels: map.labels.clone(),
            num_segments: map.num_labels,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_check_rejects_gaps() {
        assert!(LabelMap::new(1, 3, vec![0, 2, 2]).is_err());
        assert!(LabelMap::new(1, 3, vec![0, 1, 1]).is_ok());
    }

    #[test]
    fn sorted_relabel_matches_sort_unique() {
        let m = LabelMap::from_raw_sorted(2, 2, &[5, 5, 9, 9]).unwrap();
        assert_eq!(m.labels(), &[0, 0, 1, 1]);
        let m = LabelMap::from_raw_sorted(1, 4, &[40, 3, 40, 7]).unwrap();
        assert_eq!(m.labels(), &[2, 0, 2, 1]);
        assert_eq!(m.num_labels(), 3);
    }

    #[test]
    fn partition_equality_ignores_ids() {
        let a = LabelMap::new(1, 4, vec![0, 0, 1, 2]).unwrap();
        let b = LabelMap::new(1, 4, vec![2, 2, 0, 1]).unwrap();
        let c = LabelMap::new(1, 4, vec![0, 1, 1, 2]).unwrap();
        assert!(a.same_partition(&b));
        assert!(!a.same_partition(&c));
    }

    #[test]
    fn ground_truth_keeps_void() {
        let gt = GroundTruth::from_raw(1, 4, &[7, VOID_LABEL, 2, 7]).unwrap();
        assert_eq!(gt.labels(), &[1, VOID_LABEL, 0, 1]);
        assert_eq!(gt.num_segments(), 2);
    }
}
