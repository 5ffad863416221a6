//! Synthetic scenes for tests and demos: flat-coloured shapes on a contrasting
//! background, with exact ground truth and a pseudo feature map derived from
//! smoothed colour.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::egs::gaussian_smooth;
use crate::eval::Sample;
use crate::raster::{GroundTruth, LabelMap, RasterImage};
use crate::tensor_io::FeatureMap;

/// Channels of the pseudo feature map.
pub const PSEUDO_FEATURE_DIM: usize = 16;
/// Pixels per feature-grid cell along each axis.
pub const PSEUDO_FEATURE_STRIDE: usize = 4;

const ANCHOR_SEED: u64 = 0x5EED_F00D;
const ANCHOR_WIDTH: f64 = 0.35;
const SMOOTHING_SIGMA: f64 = 2.0;

#[derive(Debug, Clone)]
pub struct Scene {
    pub image: RasterImage,
    /// Label 0 is the background, shapes are numbered in drawing order.
    pub ground_truth: LabelMap,
    pub features: FeatureMap,
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Rect { y0: f64, x0: f64, y1: f64, x1: f64 },
    Ellipse { cy: f64, cx: f64, ry: f64, rx: f64 },
}

impl Shape {
    fn contains(&self, y: f64, x: f64) -> bool {
        match *self {
            Shape::Rect { y0, x0, y1, x1 } => y >= y0 && y < y1 && x >= x0 && x < x1,
            Shape::Ellipse { cy, cx, ry, rx } => ((y - cy) / ry).powi(2) + ((x - cx) / rx).powi(2) <= 1.0,
        }
    }

    /// Bounding box grown by `margin`.
    fn bounds(&self, margin: f64) -> (f64, f64, f64, f64) {
        match *self {
            Shape::Rect { y0, x0, y1, x1 } => (y0 - margin, x0 - margin, y1 + margin, x1 + margin),
            Shape::Ellipse { cy, cx, ry, rx } => (cy - ry - margin, cx - rx - margin, cy + ry + margin, cx + rx + margin),
        }
    }
}

fn colour_distance(a: [u8; 3], b: [u8; 3]) -> f64 {
    (0..3).map(|c| (a[c] as f64 - b[c] as f64).powi(2)).sum::<f64>().sqrt()
}

fn distinct_colour(rng: &mut ChaCha8Rng, taken: &[[u8; 3]], min_distance: f64) -> [u8; 3] {
    loop {
        let c = [rng.random::<u8>(), rng.random::<u8>(), rng.random::<u8>()];
        if taken.iter().all(|&t| colour_distance(c, t) >= min_distance) {
            return c;
        }
    }
}

/// A `height × width` scene with 2–4 non-overlapping shapes.
pub fn scene(seed: u64, height: usize, width: usize) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let background = distinct_colour(&mut rng, &[], 0.0);
    let mut colours = vec![background];
    let count = rng.random_range(2..=4);
    let mut shapes: Vec<Shape> = Vec::new();
    let (hf, wf) = (height as f64, width as f64);
    let mut attempts = 0;
    while shapes.len() < count && attempts < 500 {
        attempts += 1;
        let sy = rng.random_range(0.18..0.4) * hf;
        let sx = rng.random_range(0.18..0.4) * wf;
        let cy = rng.random_range(sy / 2.0 + 2.0..hf - sy / 2.0 - 2.0);
        let cx = rng.random_range(sx / 2.0 + 2.0..wf - sx / 2.0 - 2.0);
        let shape = if rng.random_bool(0.5) {
            Shape::Rect {
                y0: cy - sy / 2.0,
                x0: cx - sx / 2.0,
                y1: cy + sy / 2.0,
                x1: cx + sx / 2.0,
            }
        } else {
            Shape::Ellipse {
                cy,
                cx,
                ry: sy / 2.0,
                rx: sx / 2.0,
            }
        };
        let (a0, b0, a1, b1) = shape.bounds(3.0);
        let clear = shapes.iter().all(|s| {
            let (c0, d0, c1, d1) = s.bounds(0.0);
            a1 <= c0 || c1 <= a0 || b1 <= d0 || d1 <= b0
        });
        if clear {
            shapes.push(shape);
            colours.push(distinct_colour(&mut rng, &colours, 120.0));
        }
    }

    let mut labels = Vec::with_capacity(height * width);
    let mut pixels = Vec::with_capacity(height * width);
    for y in 0..height {
        for x in 0..width {
            let (py, px) = (y as f64 + 0.5, x as f64 + 0.5);
            let id = shapes.iter().position(|s| s.contains(py, px)).map_or(0, |i| i + 1);
            labels.push(id as u32);
            pixels.push(colours[id]);
        }
    }
    let image = RasterImage::new(height, width, pixels).expect("dimensions match");
    let ground_truth = LabelMap::from_raw_sorted(height, width, &labels).expect("dimensions match");
    let features = pseudo_features(&image);
    Scene {
        image,
        ground_truth,
        features,
    }
}

fn anchors() -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(ANCHOR_SEED);
    (0..PSEUDO_FEATURE_DIM)
        .map(|_| [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()])
        .collect()
}

/// Smooth each colour channel, sample it at feature-cell centres, and describe the
/// sampled colour by its Gaussian affinity to 16 fixed anchor colours.
pub fn pseudo_features(image: &RasterImage) -> FeatureMap {
    let (h, w) = (image.height(), image.width());
    let gh = (h / PSEUDO_FEATURE_STRIDE).max(1);
    let gw = (w / PSEUDO_FEATURE_STRIDE).max(1);
    let planes: Vec<Vec<f32>> = (0..3)
        .map(|c| {
            let plane: Vec<f32> = image.pixels().iter().map(|p| p[c] as f32 / 255.0).collect();
            gaussian_smooth(&plane, h, w, SMOOTHING_SIGMA)
        })
        .collect();
    let anchors = anchors();
    let mut data = vec![0.0f32; PSEUDO_FEATURE_DIM * gh * gw];
    for cy in 0..gh {
        let y = (((cy as f64 + 0.5) * h as f64 / gh as f64) as usize).min(h - 1);
        for cx in 0..gw {
            let x = (((cx as f64 + 0.5) * w as f64 / gw as f64) as usize).min(w - 1);
            let colour = [planes[0][y * w + x], planes[1][y * w + x], planes[2][y * w + x]];
            for (j, a) in anchors.iter().enumerate() {
                let d2: f64 = (0..3).map(|c| (colour[c] as f64 - a[c]).powi(2)).sum();
                data[j * gh * gw + cy * gw + cx] = (-d2 / (2.0 * ANCHOR_WIDTH * ANCHOR_WIDTH)).exp() as f32;
            }
        }
    }
    FeatureMap::new(PSEUDO_FEATURE_DIM, gh, gw, h, w, data).expect("finite by construction")
}

/// `count` scenes as evaluation samples, named `synthetic-<i>`.
pub fn dataset(count: usize, seed: u64, height: usize, width: usize) -> Vec<Sample> {
    (0..count)
        .map(|i| {
            let s = scene(seed.wrapping_add(i as u64), height, width);
            Sample {
                name: format!("synthetic-{i}"),
                ground_truths: vec![GroundTruth::from(&s.ground_truth)],
                image: s.image,
                fmap: s.features,
            }
        })
        .collect()
}

/// Uniform RGB noise.
pub fn noise_image(seed: u64, height: usize, width: usize) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RasterImage::from_fn(height, width, |_, _| [rng.random(), rng.random(), rng.random()]).expect("positive size")
}
