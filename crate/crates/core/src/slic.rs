//! SLIC superpixels: local k-means in joint CIELAB + image-plane space.

use serde::{Deserialize, Serialize};

use crate::color::rgb_to_lab;
use crate::connectivity::enforce_connectivity;
use crate::error::{Error, Result};
use crate::raster::{LabelMap, RasterImage};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlicParams {
    /// Target superpixel count `K`.
    pub num_superpixels: usize,
    /// Weight `m` of spatial distance against colour distance.
    pub compactness: f64,
    pub iterations: usize,
    /// Regions smaller than this fraction of the nominal area `N/K` are absorbed.
    pub min_region_frac: f64,
}

impl Default for SlicParams {
    fn default() -> Self {
        Self {
            num_superpixels: 200,
            compactness: 10.0,
            iterations: 10,
            min_region_frac: 0.25,
        }
    }
}

impl SlicParams {
    pub fn with_superpixels(num_superpixels: usize) -> Self {
        Self {
            num_superpixels,
            ..Self::default()
        }
    }

    pub fn validate(&self, pixel_count: usize) -> Result<()> {
        if self.num_superpixels == 0 {
            return Err(Error::invalid("superpixel count must be positive"));
        }
        if self.num_superpixels > pixel_count {
            return Err(Error::invalid(format!(
                "{} superpixels requested for {pixel_count} pixels",
                self.num_superpixels
            )));
        }
        if !(self.compactness > 0.0 && self.compactness.is_finite()) {
            return Err(Error::invalid("compactness must be positive"));
        }
        if self.iterations == 0 {
            return Err(Error::invalid("SLIC needs at least one iteration"));
        }
        if !(self.min_region_frac > 0.0 && self.min_region_frac <= 1.0) {
            return Err(Error::invalid("min_region_frac must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Center {
    lab: [f64; 3],
    y: f64,
    x: f64,
}

pub fn slic(image: &RasterImage, params: &SlicParams) -> Result<LabelMap> {
    let (h, w) = (image.height(), image.width());
    let n = h * w;
    params.validate(n)?;
    let lab = rgb_to_lab(image);
    let k = params.num_superpixels;
    let spacing = (n as f64 / k as f64).sqrt();

    let mut centers = seed_centers(&lab, h, w, k);

    // the grid step can exceed S on elongated images; widen the window so every
    // pixel is covered by at least its own seed's search region
    let step_y = h as f64 / grid_rows(h, w, k) as f64;
    let step_x = w as f64 / grid_cols(h, w, k) as f64;
    let reach = spacing.max(step_y).max(step_x).ceil() as isize;

    let spatial_weight = (params.compactness / spacing).powi(2);
    let mut assignment = vec![u32::MAX; n];
    let mut best = vec![f64::INFINITY; n];

    for _ in 0..params.iterations {
        best.iter_mut().for_each(|d| *d = f64::INFINITY);
        assignment.iter_mut().for_each(|a| *a = u32::MAX);
        for (ci, c) in centers.iter().enumerate() {
            let (cy, cx) = (c.y.round() as isize, c.x.round() as isize);
            let y0 = (cy - reach).max(0) as usize;
            let y1 = ((cy + reach) as usize).min(h - 1);
            let x0 = (cx - reach).max(0) as usize;
            let x1 = ((cx + reach) as usize).min(w - 1);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let i = y * w + x;
                    let d = distance(&lab[i], y, x, c, spatial_weight);
                    if d < best[i] {
                        best[i] = d;
                        assignment[i] = ci as u32;
                    }
                }
            }
        }

        let mut sums = vec![[0.0f64; 5]; centers.len()];
        let mut counts = vec![0usize; centers.len()];
        for (i, &a) in assignment.iter().enumerate() {
            if a == u32::MAX {
                continue;
            }
            let s = &mut sums[a as usize];
            s[0] += lab[i][0];
            s[1] += lab[i][1];
            s[2] += lab[i][2];
            s[3] += (i / w) as f64;
            s[4] += (i % w) as f64;
            counts[a as usize] += 1;
        }
        for ((c, s), &count) in centers.iter_mut().zip(&sums).zip(&counts) {
            if count > 0 {
                let inv = 1.0 / count as f64;
                c.lab = [s[0] * inv, s[1] * inv, s[2] * inv];
                c.y = s[3] * inv;
                c.x = s[4] * inv;
            }
        }
    }

    for (i, a) in assignment.iter_mut().enumerate() {
        if *a == u32::MAX {
            let (y, x) = (i / w, i % w);
            let nearest = centers
                .iter()
                .enumerate()
                .map(|(ci, c)| (distance(&lab[i], y, x, c, spatial_weight), ci))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .expect("at least one center");
            *a = nearest.1 as u32;
        }
    }

    let raw = LabelMap::from_partition(h, w, &assignment)?;
    let min_size = ((params.min_region_frac * n as f64 / k as f64).floor() as usize).max(1);
    Ok(enforce_connectivity(&raw, min_size))
}

fn distance(lab: &[f64; 3], y: usize, x: usize, c: &Center, spatial_weight: f64) -> f64 {
    let dl = lab[0] - c.lab[0];
    let da = lab[1] - c.lab[1];
    let db = lab[2] - c.lab[2];
    let dy = y as f64 - c.y;
    let dx = x as f64 - c.x;
    dl * dl + da * da + db * db + (dy * dy + dx * dx) * spatial_weight
}

fn grid_rows(h: usize, w: usize, k: usize) -> usize {
    ((k as f64 * h as f64 / w as f64).sqrt().round() as usize).clamp(1, h)
}

fn grid_cols(h: usize, w: usize, k: usize) -> usize {
    ((k as f64 / grid_rows(h, w, k) as f64).round() as usize).clamp(1, w)
}

/// Regular grid of about `k` seeds, each moved to the lowest-gradient pixel of its
/// 3×3 neighbourhood.
fn seed_centers(lab: &[[f64; 3]], h: usize, w: usize, k: usize) -> Vec<Center> {
    let rows = grid_rows(h, w, k);
    let cols = grid_cols(h, w, k);
    let (step_y, step_x) = (h as f64 / rows as f64, w as f64 / cols as f64);
    let at = |y: usize, x: usize| &lab[y * w + x];
    let gradient = |y: usize, x: usize| {
        let (ym, yp) = (y.saturating_sub(1), (y + 1).min(h - 1));
        let (xm, xp) = (x.saturating_sub(1), (x + 1).min(w - 1));
        let d2 = |a: &[f64; 3], b: &[f64; 3]| (0..3).map(|c| (a[c] - b[c]).powi(2)).sum::<f64>();
        d2(at(y, xp), at(y, xm)) + d2(at(yp, x), at(ym, x))
    };

    let mut centers = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let y = (((r as f64 + 0.5) * step_y) as usize).min(h - 1);
            let x = (((c as f64 + 0.5) * step_x) as usize).min(w - 1);
            let (mut by, mut bx, mut bg) = (y, x, gradient(y, x));
            for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                    let g = gradient(ny, nx);
                    if g < bg {
                        (by, bx, bg) = (ny, nx, g);
                    }
                }
            }
            centers.push(Center {
                lab: *at(by, bx),
                y: by as f64,
                x: bx as f64,
            });
        }
    }
    centers
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_image_quadrants() {
        let img = RasterImage::filled(100, 100, [120, 80, 200]).unwrap();
        let labels = slic(&img, &SlicParams::with_superpixels(4)).unwrap();
        assert_eq!(labels.num_labels(), 4);
        for s in labels.sizes() {
            assert!((1750..=3250).contains(&s), "region size {s}");
        }
    }

    #[test]
    fn boundary_follows_colour_edge() {
        let img = RasterImage::from_fn(20, 20, |_, x| if x < 10 { [0, 0, 0] } else { [255, 255, 255] }).unwrap();
        let labels = slic(&img, &SlicParams::with_superpixels(2)).unwrap();
        assert_eq!(labels.num_labels(), 2);
        let mut boundary = 0;
        let mut on_edge = 0;
        for y in 0..20 {
            for x in 0..19 {
                if labels.get(y, x) != labels.get(y, x + 1) {
                    boundary += 1;
                    if (9..=11).contains(&(x + 1)) {
                        on_edge += 1;
                    }
                }
            }
        }
        assert!(boundary > 0);
        assert!(on_edge * 100 >= boundary * 95);
    }

    #[test]
    fn rejects_bad_params() {
        let img = RasterImage::filled(4, 4, [0, 0, 0]).unwrap();
        assert!(slic(&img, &SlicParams::with_superpixels(17)).is_err());
        assert!(slic(&img, &SlicParams::with_superpixels(0)).is_err());
        let p = SlicParams {
            iterations: 0,
            ..SlicParams::with_superpixels(2)
        };
        assert!(slic(&img, &p).is_err());
    }

    #[test]
    fn every_pixel_covered_on_thin_images() {
        let img = RasterImage::from_fn(3, 200, |_, x| [(x * 7 % 256) as u8, 10, 50]).unwrap();
        let labels = slic(&img, &SlicParams::with_superpixels(20)).unwrap();
        assert!(labels.num_labels() >= 10 && labels.num_labels() <= 30);
    }
}
