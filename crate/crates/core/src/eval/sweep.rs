use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::iou::{dataset_iou, match_ground_truth, IoUReport};
use crate::egs::{egs_segment, EgsParams};
use crate::error::{Error, Result};
use crate::itq::HashModel;
use crate::raster::{GroundTruth, LabelMap, RasterImage};
use crate::segmenter::{build_rag, kmeans_merge, segment_superpixels, superpixel_mean_fmap_features, MergeMode, DEFAULT_KMEANS_K};
use crate::slic::{slic, SlicParams};
use crate::tensor_io::FeatureMap;

/// Superpixel counts on the sweep axis by default.
pub const DEFAULT_COUNTS: [usize; 5] = [100, 200, 300, 400, 500];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// SLIC superpixels merged by identical binary codes.
    Binmap,
    /// Felzenszwalb–Huttenlocher; independent of the superpixel count.
    Egs,
    /// SLIC superpixels merged by k-means over mean features.
    Kmeans,
    /// Raw SLIC superpixels taken as segments.
    Slic,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Binmap, Method::Egs, Method::Kmeans, Method::Slic];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Binmap => "binmap",
            Method::Egs => "egs",
            Method::Kmeans => "kmeans",
            Method::Slic => "slic",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub methods: Vec<Method>,
    pub counts: Vec<usize>,
    /// SLIC settings; `num_superpixels` is overridden by each sweep count.
    pub slic: SlicParams,
    pub egs: EgsParams,
    pub kmeans_k: usize,
    pub merge_mode: MergeMode,
    pub seed: u64,
    pub jobs: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            counts: DEFAULT_COUNTS.to_vec(),
            slic: SlicParams::default(),
            egs: EgsParams::default(),
            kmeans_k: DEFAULT_KMEANS_K,
            merge_mode: MergeMode::Adjacency,
            seed: 0,
            jobs: 1,
        }
    }
}

/// One image with its features and every available annotation.
#[derive(Debug, Clone)]
pub struct Sample {
    pub name: String,
    pub image: RasterImage,
    pub fmap: FeatureMap,
    /// Empty when the annotation is missing; such samples are skipped.
    pub ground_truths: Vec<GroundTruth>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub count: usize,
    pub method: Method,
    pub mean_iou_percent: f64,
}

/// Per-image outcome, one JSON object per line in the detail log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageDetail {
    pub path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub ious: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Sorted by count, then method.
    pub rows: Vec<SweepRow>,
    /// Sorted by count, method, then dataset order; skipped images come last.
    pub details: Vec<ImageDetail>,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("count,method,mean_iou_percent\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{:.2}", r.count, r.method, r.mean_iou_percent);
        }
        out
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for d in &self.details {
            out.push_str(&serde_json::to_string(d).expect("detail serialises"));
            out.push('\n');
        }
        out
    }

    /// Best row per method over the swept counts (lowest count on ties).
    pub fn best_by_method(&self) -> BTreeMap<Method, SweepRow> {
        let mut best: BTreeMap<Method, SweepRow> = BTreeMap::new();
        for r in &self.rows {
            match best.get(&r.method) {
                Some(b) if b.mean_iou_percent >= r.mean_iou_percent => {}
                _ => {
                    best.insert(r.method, r.clone());
                }
            }
        }
        best
    }

    pub fn get(&self, count: usize, method: Method) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.count == count && r.method == method)
            .map(|r| r.mean_iou_percent)
    }
}

/// Segmentations of one image for every requested (count, method) cell.
fn run_sample(
    index: usize,
    sample: &Sample,
    model: &HashModel,
    config: &SweepConfig,
) -> Result<Vec<(usize, Method, LabelMap)>> {
    let binmap = if config.methods.contains(&Method::Binmap) {
        Some(model.encode_feature_map(&sample.fmap)?)
    } else {
        None
    };
    let egs = if config.methods.contains(&Method::Egs) {
        Some(egs_segment(&sample.image, &config.egs)?)
    } else {
        None
    };
    let mut out = Vec::new();
    for &count in &config.counts {
        let params = SlicParams {
            num_superpixels: count,
            ..config.slic
        };
        let needs_slic = config.methods.iter().any(|m| *m != Method::Egs);
        let superpixels = if needs_slic { Some(slic(&sample.image, &params)?) } else { None };
        for &method in &config.methods {
            let labels = match method {
                Method::Egs => egs.clone().expect("computed above"),
                Method::Slic => superpixels.clone().expect("computed above"),
                Method::Binmap => {
                    let sp = superpixels.as_ref().expect("computed above");
                    segment_superpixels(sp, binmap.as_ref().expect("computed above"), config.merge_mode)?.labels
                }
                Method::Kmeans => {
                    let sp = superpixels.as_ref().expect("computed above");
                    let features = superpixel_mean_fmap_features(sp, &sample.fmap)?;
                    let k = config.kmeans_k.min(sp.num_labels());
                    let seed = config.seed ^ ((index as u64) << 32 | count as u64);
                    kmeans_merge(sp, &features, sample.fmap.channels(), k, seed, &build_rag(sp), config.merge_mode)?.labels
                }
            };
            out.push((count, method, labels));
        }
    }
    Ok(out)
}

/// Runs every (count, method) cell over the dataset and aggregates Segmentation-IoU.
///
/// Up to `config.jobs` images are processed concurrently; the result does not
/// depend on the job count.
pub fn sweep_samples(samples: &[Sample], model: &HashModel, config: &SweepConfig) -> Result<SweepResult> {
    if samples.is_empty() {
        return Err(Error::invalid("dataset is empty"));
    }
    if config.counts.is_empty() || config.methods.is_empty() {
        return Err(Error::invalid("sweep needs at least one count and one method"));
    }

    type Outcome = Result<Option<Vec<(usize, Method, IoUReport)>>>;
    let evaluate = |i: usize| -> Outcome {
        let sample = &samples[i];
        if sample.ground_truths.is_empty() {
            log::warn!("{}: no ground truth, skipping", sample.name);
            return Ok(None);
        }
        let mut reports = Vec::new();
        for (count, method, labels) in run_sample(i, sample, model, config)? {
            for gt in &sample.ground_truths {
                reports.push((count, method, match_ground_truth(&labels, gt)?));
            }
        }
        log::info!("{}: evaluated", sample.name);
        Ok(Some(reports))
    };

    let jobs = config.jobs.max(1).min(samples.len());
    let outcomes: Vec<Outcome> = if jobs == 1 {
        (0..samples.len()).map(evaluate).collect()
    } else {
        let slots: Vec<Mutex<Option<Outcome>>> = (0..samples.len()).map(|_| Mutex::new(None)).collect();
        let next = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= samples.len() {
                        break;
                    }
                    let outcome = evaluate(i);
                    *slots[i].lock().expect("slot lock") = Some(outcome);
                });
            }
        });
        slots
            .into_iter()
            .map(|s| s.into_inner().expect("slot lock").expect("every slot filled"))
            .collect()
    };

    let mut cells: BTreeMap<(usize, Method), Vec<(usize, IoUReport)>> = BTreeMap::new();
    let mut skipped = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome? {
            None => skipped.push(ImageDetail {
                path: samples[i].name.clone(),
                method: None,
                count: None,
                ious: Vec::new(),
                skipped: Some("missing ground truth".into()),
            }),
            Some(reports) => {
                for (count, method, report) in reports {
                    cells.entry((count, method)).or_default().push((i, report));
                }
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::invalid("no image in the dataset has ground truth"));
    }

    let mut rows = Vec::new();
    let mut details = Vec::new();
    for ((count, method), reports) in &cells {
        let only: Vec<IoUReport> = reports.iter().map(|(_, r)| r.clone()).collect();
        rows.push(SweepRow {
            count: *count,
            method: *method,
            mean_iou_percent: 100.0 * dataset_iou(&only)?,
        });
        for (i, r) in reports {
            details.push(ImageDetail {
                path: samples[*i].name.clone(),
                method: Some(*method),
                count: Some(*count),
                ious: r.ious(),
                skipped: None,
            });
        }
    }
    details.extend(skipped);
    Ok(SweepResult { rows, details })
}

/// One manifest line: an image, its feature map, and zero or more annotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetRecord {
    pub image: PathBuf,
    pub fmap: PathBuf,
    pub ground_truths: Vec<PathBuf>,
}

/// Parses `image<TAB>fmap<TAB>gt[<TAB>gt...]` lines. Blank lines and lines starting
/// with `#` are ignored; relative paths resolve against `base`.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<DatasetRecord>> {
    let mut records = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 2 {
            return Err(Error::invalid(format!(
                "manifest line {}: expected image and feature-map paths",
                n + 1
            )));
        }
        let resolve = |p: &str| base.join(p);
        records.push(DatasetRecord {
            image: resolve(fields[0]),
            fmap: resolve(fields[1]),
            ground_truths: fields[2..].iter().filter(|f| !f.is_empty()).map(|f| resolve(f)).collect(),
        });
    }
    Ok(records)
}

/// Loads a record's files. A missing annotation file yields a sample without
/// ground truth, which the sweep skips; any other failure is an error.
pub fn load_record(record: &DatasetRecord) -> Result<Sample> {
    let image = crate::tensor_io::read_image(&record.image)?;
    let fmap = crate::tensor_io::read_feature_map(&record.fmap)?;
    let mut ground_truths = Vec::new();
    let mut missing = false;
    for path in &record.ground_truths {
        if !path.exists() {
            log::warn!("{}: ground truth {} not found", record.image.display(), path.display());
            missing = true;
            continue;
        }
        ground_truths.push(crate::tensor_io::read_ground_truth(path)?);
    }
    if missing || record.ground_truths.is_empty() {
        ground_truths.clear();
    }
    Ok(Sample {
        name: record.image.display().to_string(),
        image,
        fmap,
        ground_truths,
    })
}
