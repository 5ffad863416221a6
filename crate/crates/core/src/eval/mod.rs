//! Segmentation-IoU: each ground-truth segment is scored by its best-overlapping
//! predicted segment, and scores are averaged over all segments of all images.

mod iou;
mod sweep;

pub use iou::{dataset_iou, iou, iou_ratio, match_ground_truth, match_segments, IoUReport, IouRatio, SegmentMatch};
pub use sweep::{
    load_record, parse_manifest, sweep_samples, DatasetRecord, ImageDetail, Method, Sample, SweepConfig, SweepResult,
    SweepRow, DEFAULT_COUNTS,
};
