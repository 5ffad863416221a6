//! From binary code maps to final segments.
//!
//! Each superpixel receives the per-bit majority of the codes under its pixels
//! and adjacent superpixels with identical codes are merged. The k-means
//! baseline clusters mean superpixel features instead and merges the same way,
//! so both produce directly comparable partitions.

mod codes;
mod kmeans;
mod merge;
mod rag;

use std::collections::HashMap;

pub use codes::{assign_superpixel_codes, upsample_codes};
pub use kmeans::{kmeans, KMeans, CONVERGENCE_SHIFT, MAX_LLOYD_ITERATIONS};
pub use merge::{merge_by_key, merge_equal_codes, MergeMode, SegmentationResult};
pub use rag::{build_rag, RegionAdjacencyGraph};

use crate::error::{Error, Result};
use crate::itq::{BinaryCodeMap, HashModel};
use crate::raster::{LabelMap, RasterImage};
use crate::slic::{slic, SlicParams};
use crate::tensor_io::FeatureMap;

/// Default cluster count of the k-means baseline: as many labels as 8-bit codes.
pub const DEFAULT_KMEANS_K: usize = 256;

/// Mean of the per-pixel feature vectors (`pixels × dim`, row-major) over each
/// superpixel, as a `superpixels × dim` row-major buffer.
pub fn superpixel_mean_features(superpixels: &LabelMap, pixel_features: &[f32], dim: usize) -> Result<Vec<f64>> {
    if dim == 0 || pixel_features.len() != superpixels.len() * dim {
        return Err(Error::DimensionMismatch {
            expected: superpixels.len() * dim,
            actual: pixel_features.len(),
        });
    }
    let n = superpixels.num_labels();
    let mut sums = vec![0.0f64; n * dim];
    let mut counts = vec![0usize; n];
    for (i, &sp) in superpixels.labels().iter().enumerate() {
        let sp = sp as usize;
        counts[sp] += 1;
        for (s, &v) in sums[sp * dim..(sp + 1) * dim].iter_mut().zip(&pixel_features[i * dim..(i + 1) * dim]) {
            *s += v as f64;
        }
    }
    for (sp, &count) in counts.iter().enumerate() {
        let inv = 1.0 / count as f64;
        sums[sp * dim..(sp + 1) * dim].iter_mut().for_each(|s| *s *= inv);
    }
    Ok(sums)
}

/// [`superpixel_mean_features`] where each pixel's vector is the feature-map cell
/// it falls in under nearest-cell upsampling; the per-pixel features are never
/// materialised.
pub fn superpixel_mean_fmap_features(superpixels: &LabelMap, fmap: &FeatureMap) -> Result<Vec<f64>> {
    superpixels.same_geometry(fmap.source_height(), fmap.source_width())?;
    let (h, w) = (superpixels.height(), superpixels.width());
    let dim = fmap.channels();
    let n = superpixels.num_labels();
    let mut overlap: HashMap<(u32, usize), usize> = HashMap::new();
    for y in 0..h {
        let cy = y * fmap.height() / h;
        for x in 0..w {
            let cell = cy * fmap.width() + x * fmap.width() / w;
            *overlap.entry((superpixels.get(y, x), cell)).or_default() += 1;
        }
    }
    let mut pairs: Vec<_> = overlap.into_iter().collect();
    pairs.sort_unstable();
    let plane = fmap.height() * fmap.width();
    let data = fmap.data();
    let mut sums = vec![0.0f64; n * dim];
    for ((sp, cell), count) in pairs {
        let row = &mut sums[sp as usize * dim..(sp as usize + 1) * dim];
        for (c, s) in row.iter_mut().enumerate() {
            *s += count as f64 * data[c * plane + cell] as f64;
        }
    }
    for (sp, size) in superpixels.sizes().into_iter().enumerate() {
        let inv = 1.0 / size as f64;
        sums[sp * dim..(sp + 1) * dim].iter_mut().for_each(|s| *s *= inv);
    }
    Ok(sums)
}

/// Clusters superpixel features into `k` groups and merges superpixels sharing a
/// cluster with the same rule as [`merge_by_key`].
pub fn kmeans_merge(
    superpixels: &LabelMap,
    sp_features: &[f64],
    dim: usize,
    k: usize,
    seed: u64,
    adjacency: &RegionAdjacencyGraph,
    mode: MergeMode,
) -> Result<SegmentationResult> {
    let n = superpixels.num_labels();
    if sp_features.len() != n * dim {
        return Err(Error::DimensionMismatch {
            expected: n * dim,
            actual: sp_features.len(),
        });
    }
    if k > n {
        return Err(Error::TooManyClusters { k, available: n });
    }
    let km = kmeans(sp_features, dim, k, seed)?;
    let keys: Vec<u64> = km.assignments.iter().map(|&a| a as u64).collect();
    merge_by_key(superpixels, &keys, adjacency, mode)
}

/// Superpixels → per-superpixel codes → merge.
pub fn segment_superpixels(superpixels: &LabelMap, binmap: &BinaryCodeMap, mode: MergeMode) -> Result<SegmentationResult> {
    let pixel_codes = upsample_codes(binmap, superpixels.height(), superpixels.width())?;
    let sp_codes = assign_superpixel_codes(superpixels, &pixel_codes, binmap.code_len())?;
    merge_by_key(superpixels, &sp_codes, &build_rag(superpixels), mode)
}

/// The full flow for one image: hash the feature map, extract SLIC superpixels,
/// merge superpixels with identical codes.
pub fn segment_image(
    image: &RasterImage,
    fmap: &FeatureMap,
    model: &HashModel,
    slic_params: &SlicParams,
    mode: MergeMode,
) -> Result<SegmentationResult> {
    check_fmap_geometry(image, fmap)?;
    let binmap = model.encode_feature_map(fmap)?;
    let superpixels = slic(image, slic_params)?;
    segment_superpixels(&superpixels, &binmap, mode)
}

/// SLIC superpixels merged by k-means over their mean feature vectors.
pub fn kmeans_baseline(
    image: &RasterImage,
    fmap: &FeatureMap,
    slic_params: &SlicParams,
    k: usize,
    seed: u64,
    mode: MergeMode,
) -> Result<SegmentationResult> {
    check_fmap_geometry(image, fmap)?;
    let superpixels = slic(image, slic_params)?;
    let features = superpixel_mean_fmap_features(&superpixels, fmap)?;
    kmeans_merge(&superpixels, &features, fmap.channels(), k, seed, &build_rag(&superpixels), mode)
}

fn check_fmap_geometry(image: &RasterImage, fmap: &FeatureMap) -> Result<()> {
    if image.height() != fmap.source_height() || image.width() != fmap.source_width() {
        return Err(Error::GeometryMismatch {
            expected_height: fmap.source_height(),
            expected_width: fmap.source_width(),
            actual_height: image.height(),
            actual_width: image.width(),
        });
    }
    Ok(())
}
