use std::collections::BTreeSet;

use crate::raster::LabelMap;

/// Regions as nodes, 4-adjacency in the pixel grid as undirected edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionAdjacencyGraph {
    num_regions: usize,
    edges: BTreeSet<(u32, u32)>,
    neighbours: Vec<Vec<u32>>,
}

impl RegionAdjacencyGraph {
    /// Edges are normalised to `(low, high)`; self-loops and out-of-range ids are dropped.
    pub fn from_edges(num_regions: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let edges: BTreeSet<(u32, u32)> = edges
            .into_iter()
            .filter(|&(a, b)| a != b && (a as usize) < num_regions && (b as usize) < num_regions)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        let mut neighbours = vec![Vec::new(); num_regions];
        for &(a, b) in &edges {
            neighbours[a as usize].push(b);
            neighbours[b as usize].push(a);
        }
        for n in &mut neighbours {
            n.sort_unstable();
        }
        Self {
            num_regions,
            edges,
            neighbours,
        }
    }

    pub fn num_regions(&self) -> usize {
        self.num_regions
    }

    pub fn edges(&self) -> &BTreeSet<(u32, u32)> {
        &self.edges
    }

    pub fn neighbours(&self, region: u32) -> &[u32] {
        &self.neighbours[region as usize]
    }

    pub fn contains(&self, a: u32, b: u32) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }
}

pub fn build_rag(superpixels: &LabelMap) -> RegionAdjacencyGraph {
    let (h, w) = (superpixels.height(), superpixels.width());
    let mut edges = BTreeSet::new();
    for y in 0..h {
        for x in 0..w {
            let a = superpixels.get(y, x);
            if x + 1 < w {
                let b = superpixels.get(y, x + 1);
                if a != b {
                    edges.insert((a.min(b), a.max(b)));
                }
            }
            if y + 1 < h {
                let b = superpixels.get(y + 1, x);
                if a != b {
                    edges.insert((a.min(b), a.max(b)));
                }
            }
        }
    }
    RegionAdjacencyGraph::from_edges(superpixels.num_labels(), edges)
}
