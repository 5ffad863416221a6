//! Efficient graph-based segmentation (Felzenszwalb & Huttenlocher).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{LabelMap, RasterImage};
use crate::union_find::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgsParams {
    /// Standard deviation of the Gaussian pre-smoothing; `0` disables it.
    pub sigma: f64,
    /// Scale of the adaptive merge threshold `k / |C|`.
    pub k: f64,
    /// Components smaller than this are merged in a final pass.
    pub min_size: usize,
}

impl Default for EgsParams {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            k: 100.0,
            min_size: 20,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    w: f32,
    a: u32,
    b: u32,
}

/// Separable Gaussian blur of one channel; kernel radius `ceil(4σ)`, clamped borders.
pub fn gaussian_smooth(plane: &[f32], height: usize, width: usize, sigma: f64) -> Vec<f32> {
    if sigma <= 0.0 {
        return plane.to_vec();
    }
    let radius = (4.0 * sigma).ceil() as isize;
    let mut kernel: Vec<f64> = (-radius..=radius)
        .map(|i| (-0.5 * (i as f64 / sigma).powi(2)).exp())
        .collect();
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|v| *v /= total);

    let clamp = |v: isize, hi: usize| v.clamp(0, hi as isize - 1) as usize;
    let mut tmp = vec![0.0f32; plane.len()];
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for (j, kv) in kernel.iter().enumerate() {
                let sx = clamp(x as isize + j as isize - radius, width);
                acc += kv * plane[y * width + sx] as f64;
            }
            tmp[y * width + x] = acc as f32;
        }
    }
    let mut out = vec![0.0f32; plane.len()];
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for (j, kv) in kernel.iter().enumerate() {
                let sy = clamp(y as isize + j as isize - radius, height);
                acc += kv * tmp[sy * width + x] as f64;
            }
            out[y * width + x] = acc as f32;
        }
    }
    out
}

pub fn egs_segment(image: &RasterImage, params: &EgsParams) -> Result<LabelMap> {
    if !(params.sigma >= 0.0 && params.sigma.is_finite()) {
        return Err(Error::invalid("sigma must be a non-negative number"));
    }
    if !(params.k > 0.0 && params.k.is_finite()) {
        return Err(Error::invalid("k must be positive"));
    }
    let (h, w) = (image.height(), image.width());
    let n = h * w;
    let channels: Vec<Vec<f32>> = (0..3)
        .map(|c| {
            let plane: Vec<f32> = image.pixels().iter().map(|p| p[c] as f32).collect();
            gaussian_smooth(&plane, h, w, params.sigma)
        })
        .collect();
    let diff = |i: usize, j: usize| {
        channels
            .iter()
            .map(|ch| (ch[i] - ch[j]).powi(2))
            .sum::<f32>()
            .sqrt()
    };

    let mut edges = Vec::with_capacity(4 * n);
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let mut push = |j: usize| {
                let (a, b) = (i.min(j) as u32, i.max(j) as u32);
                edges.push(Edge { w: diff(i, j), a, b });
            };
            if x + 1 < w {
                push(i + 1);
            }
            if y + 1 < h {
                push(i + w);
                if x + 1 < w {
                    push(i + w + 1);
                }
                if x > 0 {
                    push(i + w - 1);
                }
            }
        }
    }
    edges.sort_by(|e, f| e.w.total_cmp(&f.w).then(e.a.cmp(&f.a)).then(e.b.cmp(&f.b)));

    let mut uf = UnionFind::new(n);
    let mut threshold = vec![params.k as f32; n];
    for e in &edges {
        let (ra, rb) = (uf.find(e.a as usize), uf.find(e.b as usize));
        if ra != rb && e.w <= threshold[ra] && e.w <= threshold[rb] {
            let root = uf.union(ra, rb);
            // edges arrive in ascending order, so `e.w` is the new component's
            // largest internal MST edge
            threshold[root] = e.w + params.k as f32 / uf.size_of(root) as f32;
        }
    }

    for e in &edges {
        let (ra, rb) = (uf.find(e.a as usize), uf.find(e.b as usize));
        if ra != rb && (uf.size_of(ra) < params.min_size || uf.size_of(rb) < params.min_size) {
            uf.union(ra, rb);
        }
    }

    let (ids, _) = uf.component_ids();
    LabelMap::new(h, w, ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_is_one_segment() {
        let img = RasterImage::filled(30, 40, [90, 10, 200]).unwrap();
        assert_eq!(egs_segment(&img, &EgsParams::default()).unwrap().num_labels(), 1);
    }

    #[test]
    fn smoothing_preserves_constants_and_mass() {
        let plane = vec![7.0f32; 12 * 9];
        let out = gaussian_smooth(&plane, 12, 9, 1.5);
        assert!(out.iter().all(|v| (v - 7.0).abs() < 1e-4));
        let mut spike = vec![0.0f32; 21 * 21];
        spike[10 * 21 + 10] = 1.0;
        let out = gaussian_smooth(&spike, 21, 21, 1.0);
        assert!((out.iter().sum::<f32>() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn two_tone_never_merges_across_the_edge() {
        let img = RasterImage::from_fn(64, 64, |_, x| if x < 32 { [0, 0, 0] } else { [255, 255, 255] }).unwrap();
        let labels = egs_segment(&img, &EgsParams::default()).unwrap();
        for y in 0..64 {
            assert_ne!(labels.get(y, 31), labels.get(y, 32));
            assert_eq!(labels.get(y, 0), labels.get(0, 0));
            assert_eq!(labels.get(y, 63), labels.get(0, 63));
        }
        // the flat far halves are each a single segment and every segment is a
        // full-height column band
        for x in 0..64 {
            assert!((0..64).all(|y| labels.get(y, x) == labels.get(0, x)));
        }
    }

    #[test]
    fn min_size_respected() {
        let img = RasterImage::from_fn(24, 24, |y, x| [((x * 37 + y * 91) % 256) as u8, ((x * y) % 256) as u8, 30]).unwrap();
        let params = EgsParams {
            sigma: 0.5,
            k: 50.0,
            min_size: 15,
        };
        let labels = egs_segment(&img, &params).unwrap();
        assert!(labels.sizes().iter().all(|&s| s >= 15));
    }
}
