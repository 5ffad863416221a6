use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::rag::RegionAdjacencyGraph;
use crate::error::{Error, Result};
use crate::raster::LabelMap;
use crate::union_find::UnionFind;

/// Which superpixels sharing a code end up in one segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MergeMode {
    /// Connected components of the adjacency graph restricted to equal-code edges.
    #[default]
    Adjacency,
    /// Every superpixel with a given code, adjacent or not.
    Global,
}

impl std::str::FromStr for MergeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adjacency" => Ok(MergeMode::Adjacency),
            "global" => Ok(MergeMode::Global),
            other => Err(Error::invalid(format!("unknown merge mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentationResult {
    /// Final segments.
    pub labels: LabelMap,
    /// Merge key per input superpixel: its binary code, or its cluster id for the
    /// k-means baseline.
    pub superpixel_codes: Vec<u64>,
    /// Input superpixel ids (ascending) making up each final segment.
    pub merged_from: Vec<Vec<u32>>,
}

impl SegmentationResult {
    pub fn num_segments(&self) -> usize {
        self.labels.num_labels()
    }

    /// The shared key of each final segment.
    pub fn segment_codes(&self) -> Vec<u64> {
        self.merged_from
            .iter()
            .map(|sps| self.superpixel_codes[sps[0] as usize])
            .collect()
    }

    /// One line per segment: id, key in hex (zero-padded to `code_len` bits),
    /// comma-separated superpixel ids.
    pub fn sidecar(&self, code_len: usize) -> String {
        let digits = code_len.div_ceil(4).max(1);
        let mut out = String::from("# segment\tcode\tsuperpixels\n");
        for (seg, (sps, code)) in self.merged_from.iter().zip(self.segment_codes()).enumerate() {
            let ids: Vec<String> = sps.iter().map(|s| s.to_string()).collect();
            let _ = writeln!(out, "{seg}\t{code:0digits$x}\t{}", ids.join(","));
        }
        out
    }
}

/// Merges superpixels whose keys are identical (Hamming distance zero).
pub fn merge_equal_codes(
    superpixels: &LabelMap,
    codes: &[u64],
    adjacency: &RegionAdjacencyGraph,
) -> Result<SegmentationResult> {
    merge_by_key(superpixels, codes, adjacency, MergeMode::Adjacency)
}

pub fn merge_by_key(
    superpixels: &LabelMap,
    codes: &[u64],
    adjacency: &RegionAdjacencyGraph,
    mode: MergeMode,
) -> Result<SegmentationResult> {
    let n = superpixels.num_labels();
    if codes.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: codes.len(),
        });
    }
    if adjacency.num_regions() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: adjacency.num_regions(),
        });
    }
    let mut uf = UnionFind::new(n);
    match mode {
        MergeMode::Adjacency => {
            for &(a, b) in adjacency.edges() {
                if codes[a as usize] == codes[b as usize] {
                    uf.union(a as usize, b as usize);
                }
            }
        }
        MergeMode::Global => {
            let mut first: HashMap<u64, usize> = HashMap::new();
            for (sp, &code) in codes.iter().enumerate() {
                let rep = *first.entry(code).or_insert(sp);
                uf.union(rep, sp);
            }
        }
    }
    let (component, _) = uf.component_ids();
    let labels = superpixels.remap(&component)?;

    let mut final_of = vec![u32::MAX; n];
    for (&sp, &seg) in superpixels.labels().iter().zip(labels.labels()) {
        final_of[sp as usize] = seg;
    }
    let mut merged_from = vec![Vec::new(); labels.num_labels()];
    for (sp, &seg) in final_of.iter().enumerate() {
        merged_from[seg as usize].push(sp as u32);
    }
    Ok(SegmentationResult {
        labels,
        superpixel_codes: codes.to_vec(),
        merged_from,
    })
}
