use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{GroundTruth, LabelMap, VOID_LABEL};

/// `|P ∩ G| / |P ∪ G|` from exact pixel counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IouRatio {
    pub intersection: u64,
    pub union: u64,
}

impl IouRatio {
    pub fn value(&self) -> f64 {
        if self.union == 0 {
            0.0
        } else {
            self.intersection as f64 / self.union as f64
        }
    }

    /// Exact comparison by cross-multiplication.
    pub fn cmp_exact(&self, other: &IouRatio) -> Ordering {
        let lhs = self.intersection as u128 * other.union as u128;
        let rhs = other.intersection as u128 * self.union as u128;
        lhs.cmp(&rhs)
    }
}

/// IoU of two boolean masks over the same pixel grid.
pub fn iou(pred_mask: &[bool], gt_mask: &[bool]) -> Result<f64> {
    Ok(iou_ratio(pred_mask, gt_mask)?.value())
}

pub fn iou_ratio(pred_mask: &[bool], gt_mask: &[bool]) -> Result<IouRatio> {
    if pred_mask.len() != gt_mask.len() {
        return Err(Error::DimensionMismatch {
            expected: gt_mask.len(),
            actual: pred_mask.len(),
        });
    }
    let (mut inter, mut union) = (0u64, 0u64);
    for (&p, &g) in pred_mask.iter().zip(gt_mask) {
        inter += (p && g) as u64;
        union += (p || g) as u64;
    }
    if union == 0 {
        return Err(Error::EmptyMasks);
    }
    Ok(IouRatio {
        intersection: inter,
        union,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentMatch {
    pub gt: u32,
    /// Predicted segment with the highest IoU (lowest id on ties).
    pub pred: u32,
    pub ratio: IouRatio,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IoUReport {
    pub per_gt_segment: Vec<SegmentMatch>,
    pub mean_iou: f64,
    pub num_gt_segments: usize,
}

impl IoUReport {
    pub fn ious(&self) -> Vec<f64> {
        self.per_gt_segment.iter().map(|m| m.iou).collect()
    }
}

pub fn match_segments(pred: &LabelMap, gt: &LabelMap) -> Result<IoUReport> {
    match_ground_truth(pred, &GroundTruth::from(gt))
}

/// For every ground-truth segment, the predicted segment of maximum IoU. Void
/// ground-truth pixels count toward neither intersections nor unions.
pub fn match_ground_truth(pred: &LabelMap, gt: &GroundTruth) -> Result<IoUReport> {
    pred.same_geometry(gt.height(), gt.width())?;
    let mut pred_size = vec![0u64; pred.num_labels()];
    let mut gt_size = vec![0u64; gt.num_segments()];
    let mut overlap: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for (&p, &g) in pred.labels().iter().zip(gt.labels()) {
        if g == VOID_LABEL {
            continue;
        }
        pred_size[p as usize] += 1;
        gt_size[g as usize] += 1;
        *overlap.entry((g, p)).or_default() += 1;
    }

    let mut best: Vec<Option<(u32, IouRatio)>> = vec![None; gt.num_segments()];
    // keys iterate in (gt, pred) order so the first maximum seen has the lowest id
    for (&(g, p), &inter) in &overlap {
        let ratio = IouRatio {
            intersection: inter,
            union: gt_size[g as usize] + pred_size[p as usize] - inter,
        };
        let slot = &mut best[g as usize];
        if slot.is_none_or(|(_, b)| ratio.cmp_exact(&b) == Ordering::Greater) {
            *slot = Some((p, ratio));
        }
    }

    let per_gt_segment: Vec<SegmentMatch> = best
        .into_iter()
        .enumerate()
        .map(|(g, b)| {
            let (pred, ratio) = b.expect("every ground-truth segment has at least one pixel");
            SegmentMatch {
                gt: g as u32,
                pred,
                ratio,
                iou: ratio.value(),
            }
        })
        .collect();
    let num = per_gt_segment.len();
    let mean_iou = if num == 0 {
        0.0
    } else {
        per_gt_segment.iter().map(|m| m.iou).sum::<f64>() / num as f64
    };
    Ok(IoUReport {
        per_gt_segment,
        mean_iou,
        num_gt_segments: num,
    })
}

/// Mean over every ground-truth segment of every report (segment-weighted, not a
/// mean of per-image means).
pub fn dataset_iou(reports: &[IoUReport]) -> Result<f64> {
    if reports.is_empty() {
        return Err(Error::invalid("no reports to aggregate"));
    }
    let (sum, count) = reports
        .iter()
        .flat_map(|r| &r.per_gt_segment)
        .fold((0.0, 0usize), |(s, c), m| (s + m.iou, c + 1));
    if count == 0 {
        return Err(Error::invalid("reports contain no ground-truth segments"));
    }
    Ok(sum / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(h: usize, w: usize, cells: &[(usize, usize)]) -> Vec<bool> {
        let mut m = vec![false; h * w];
        for &(y, x) in cells {
            m[y * w + x] = true;
        }
        m
    }

    #[test]
    fn spot_values() {
        let a = mask(2, 2, &[(0, 0), (0, 1)]);
        let b = mask(2, 2, &[(0, 1), (1, 1)]);
        assert_eq!(iou_ratio(&a, &b).unwrap(), IouRatio { intersection: 1, union: 3 });
        assert_eq!(iou(&a, &b).unwrap(), 1.0 / 3.0);
        assert_eq!(iou(&a, &a).unwrap(), 1.0);
        assert_eq!(iou(&a, &mask(2, 2, &[(1, 0)])).unwrap(), 0.0);
        assert!(matches!(iou(&[false; 4], &[false; 4]), Err(Error::EmptyMasks)));
    }

    #[test]
    fn perfect_prediction() {
        let m = LabelMap::new(2, 3, vec![0, 0, 1, 2, 2, 1]).unwrap();
        let r = match_segments(&m, &m).unwrap();
        assert_eq!(r.mean_iou, 1.0);
        assert!(r.per_gt_segment.iter().all(|s| s.iou == 1.0 && s.pred == s.gt));
    }

    #[test]
    fn single_segment_against_two_halves() {
        let pred = LabelMap::constant(4, 4).unwrap();
        let gt = LabelMap::new(4, 4, (0..16).map(|i| (i % 4 >= 2) as u32).collect()).unwrap();
        let r = match_segments(&pred, &gt).unwrap();
        assert_eq!(r.ious(), vec![0.5, 0.5]);
        assert_eq!(r.mean_iou, 0.5);
    }

    #[test]
    fn ties_go_to_lowest_pred_id() {
        // gt segment 0 covers two pixels, each predicted separately
        let pred = LabelMap::new(1, 3, vec![0, 1, 2]).unwrap();
        let gt = LabelMap::new(1, 3, vec![0, 0, 1]).unwrap();
        let r = match_segments(&pred, &gt).unwrap();
        assert_eq!(r.per_gt_segment[0].pred, 0);
        assert_eq!(r.per_gt_segment[0].ratio, IouRatio { intersection: 1, union: 2 });
    }

    #[test]
    fn void_pixels_are_ignored() {
        let pred = LabelMap::new(1, 4, vec![0, 0, 0, 1]).unwrap();
        let gt = GroundTruth::from_raw(1, 4, &[3, 3, VOID_LABEL, 4]).unwrap();
        let r = match_ground_truth(&pred, &gt).unwrap();
        assert_eq!(r.ious(), vec![1.0, 1.0]);
    }

    #[test]
    fn segment_weighted_dataset_mean() {
        let one = IoUReport {
            per_gt_segment: vec![SegmentMatch {
                gt: 0,
                pred: 0,
                ratio: IouRatio { intersection: 1, union: 1 },
                iou: 1.0,
            }],
            mean_iou: 1.0,
            num_gt_segments: 1,
        };
        let zero = |gt| SegmentMatch {
            gt,
            pred: 0,
            ratio: IouRatio { intersection: 0, union: 1 },
            iou: 0.0,
        };
        let two = IoUReport {
            per_gt_segment: vec![zero(0), zero(1)],
            mean_iou: 0.0,
            num_gt_segments: 2,
        };
        assert_eq!(dataset_iou(std::slice::from_ref(&one)).unwrap(), 1.0);
        assert_eq!(dataset_iou(&[one, two]).unwrap(), 1.0 / 3.0);
        assert!(dataset_iou(&[]).is_err());
    }

    #[test]
    fn geometry_mismatch() {
        let a = LabelMap::constant(2, 2).unwrap();
        let b = LabelMap::constant(2, 3).unwrap();
        assert!(matches!(match_segments(&a, &b), Err(Error::GeometryMismatch { .. })));
    }
}
