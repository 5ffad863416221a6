//! Browser demo over a synthetic scene: SLIC superpixels, graph-based
//! segmentation, and binary-code merging scored against the scene's ground truth.
//!
//! Every render returns an RGBA buffer of `height × width × 4` bytes ready for
//! `ImageData`.

use binseg::egs::{egs_segment, EgsParams};
use binseg::eval::match_segments;
use binseg::itq::HashModel;
use binseg::segmenter::{segment_superpixels, MergeMode};
use binseg::slic::{slic, SlicParams};
use binseg::synth::{self, Scene};
use binseg::tensor_io::FeatureCorpus;
use binseg::LabelMap;
use wasm_bindgen::prelude::*;

const TRAINING_SCENES: u64 = 6;
const CODE_LEN: usize = 8;
const ITQ_ITERATIONS: usize = 50;

/// Summary of the most recent render.
#[wasm_bindgen]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderStats {
    /// Regions in the rendered partition.
    pub regions: u32,
    /// Mean IoU against the scene's ground truth, in [0, 1].
    pub mean_iou: f64,
    /// Superpixels before merging (equals `regions` for unmerged methods).
    pub superpixels: u32,
}

#[wasm_bindgen]
pub struct Demo {
    scene: Scene,
    model: HashModel,
    stats: RenderStats,
}

impl Demo {
    /// Scene `seed` at `height × width`, with a hash trained on it and its
    /// neighbouring seeds.
    pub fn try_new(seed: u64, height: usize, width: usize) -> binseg::Result<Demo> {
        let scenes: Vec<Scene> = (0..TRAINING_SCENES).map(|i| synth::scene(seed.wrapping_add(i), height, width)).collect();
        let corpus = FeatureCorpus::from_feature_maps(scenes.iter().map(|s| &s.features))?;
        let (model, _) = HashModel::train_corpus(&corpus, CODE_LEN, ITQ_ITERATIONS, seed)?;
        let scene = scenes.into_iter().next().expect("at least one scene");
        Ok(Demo {
            scene,
            model,
            stats: RenderStats {
                regions: 0,
                mean_iou: 0.0,
                superpixels: 0,
            },
        })
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    fn score(&mut self, labels: &LabelMap, superpixels: usize) -> binseg::Result<()> {
        let report = match_segments(labels, &self.scene.ground_truth)?;
        self.stats = RenderStats {
            regions: labels.num_labels() as u32,
            mean_iou: report.mean_iou,
            superpixels: superpixels as u32,
        };
        Ok(())
    }

    pub fn superpixel_labels(&mut self, superpixels: usize, compactness: f64) -> binseg::Result<LabelMap> {
        let params = SlicParams {
            compactness,
            ..SlicParams::with_superpixels(superpixels)
        };
        let labels = slic(&self.scene.image, &params)?;
        self.score(&labels, labels.num_labels())?;
        Ok(labels)
    }

    pub fn egs_labels(&mut self, sigma: f64, k: f64, min_size: usize) -> binseg::Result<LabelMap> {
        let labels = egs_segment(&self.scene.image, &EgsParams { sigma, k, min_size })?;
        self.score(&labels, labels.num_labels())?;
        Ok(labels)
    }

    pub fn merged_labels(&mut self, superpixels: usize, global: bool) -> binseg::Result<LabelMap> {
        let sp = slic(&self.scene.image, &SlicParams::with_superpixels(superpixels))?;
        let codes = self.model.encode_feature_map(&self.scene.features)?;
        let mode = if global { MergeMode::Global } else { MergeMode::Adjacency };
        let merged = segment_superpixels(&sp, &codes, mode)?;
        self.score(&merged.labels, sp.num_labels())?;
        Ok(merged.labels)
    }
}

/// Image pixels with region boundaries drawn in `edge`.
pub fn boundary_overlay(scene: &Scene, labels: &LabelMap, edge: [u8; 3]) -> Vec<u8> {
    let (h, w) = (labels.height(), labels.width());
    let mut out = Vec::with_capacity(h * w * 4);
    for y in 0..h {
        for x in 0..w {
            let l = labels.get(y, x);
            let on_edge = (x + 1 < w && labels.get(y, x + 1) != l) || (y + 1 < h && labels.get(y + 1, x) != l);
            let rgb = if on_edge { edge } else { scene.image.get(y, x) };
            out.extend_from_slice(&[rgb[0], rgb[1], rgb[2], 255]);
        }
    }
    out
}

/// Each region filled with the mean colour of its pixels.
pub fn mean_colour_fill(scene: &Scene, labels: &LabelMap) -> Vec<u8> {
    let mut sums = vec![[0u64; 3]; labels.num_labels()];
    for (&l, p) in labels.labels().iter().zip(scene.image.pixels()) {
        for c in 0..3 {
            sums[l as usize][c] += p[c] as u64;
        }
    }
    let sizes = labels.sizes();
    let means: Vec<[u8; 3]> = sums
        .iter()
        .zip(&sizes)
        .map(|(s, &n)| [0, 1, 2].map(|c| ((s[c] + n as u64 / 2) / n as u64) as u8))
        .collect();
    labels
        .labels()
        .iter()
        .flat_map(|&l| {
            let m = means[l as usize];
            [m[0], m[1], m[2], 255]
        })
        .collect()
}

fn js_err(e: binseg::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32, height: u32, width: u32) -> Result<Demo, JsError> {
        Demo::try_new(seed as u64, height as usize, width as usize).map_err(js_err)
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> u32 {
        self.scene.image.height() as u32
    }

    #[wasm_bindgen(getter)]
    pub fn width(&self) -> u32 {
        self.scene.image.width() as u32
    }

    #[wasm_bindgen(getter)]
    pub fn stats(&self) -> RenderStats {
        self.stats
    }

    pub fn image(&self) -> Vec<u8> {
        self.scene.image.pixels().iter().flat_map(|p| [p[0], p[1], p[2], 255]).collect()
    }

    /// SLIC boundaries over the image.
    pub fn superpixels(&mut self, superpixels: u32, compactness: f64) -> Result<Vec<u8>, JsError> {
        let labels = self.superpixel_labels(superpixels as usize, compactness).map_err(js_err)?;
        Ok(boundary_overlay(&self.scene, &labels, [255, 40, 40]))
    }

    /// Graph-based segments filled with their mean colour.
    pub fn egs(&mut self, sigma: f64, k: f64, min_size: u32) -> Result<Vec<u8>, JsError> {
        let labels = self.egs_labels(sigma, k, min_size as usize).map_err(js_err)?;
        Ok(mean_colour_fill(&self.scene, &labels))
    }

    /// Superpixels merged by binary code, boundaries drawn over the image.
    pub fn merged(&mut self, superpixels: u32, global: bool) -> Result<Vec<u8>, JsError> {
        let labels = self.merged_labels(superpixels as usize, global).map_err(js_err)?;
        Ok(boundary_overlay(&self.scene, &labels, [255, 230, 0]))
    }
}
