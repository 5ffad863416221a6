//! 4-connected component labelling and small-region absorption.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::raster::LabelMap;

/// Splits every label into its 4-connected components. Component ids follow raster
/// order of first appearance.
pub fn connected_components(labels: &LabelMap) -> LabelMap {
    let (h, w) = (labels.height(), labels.width());
    let src = labels.labels();
    let mut out = vec![u32::MAX; src.len()];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..src.len() {
        if out[start] != u32::MAX {
            continue;
        }
        out[start] = next;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (y, x) = (i / w, i % w);
            let mut visit = |j: usize| {
                if out[j] == u32::MAX && src[j] == src[i] {
                    out[j] = next;
                    queue.push_back(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        next += 1;
    }
    LabelMap::new(h, w, out).expect("component ids are dense")
}

/// Makes every region a single 4-connected component, then repeatedly absorbs the
/// smallest component below `min_size` into the neighbour sharing the most boundary
/// (ties: lowest neighbour id). Output labels are re-densified in raster order.
pub fn enforce_connectivity(labels: &LabelMap, min_size: usize) -> LabelMap {
    let comps = connected_components(labels);
    let n = comps.num_labels();
    let (h, w) = (comps.height(), comps.width());
    let ids = comps.labels();

    let mut size = comps.sizes();
    let mut shared: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
    for y in 0..h {
        for x in 0..w {
            let a = ids[y * w + x] as usize;
            let mut touch = |b: usize| {
                if a != b {
                    *shared[a].entry(b).or_default() += 1;
                    *shared[b].entry(a).or_default() += 1;
                }
            };
            if x + 1 < w {
                touch(ids[y * w + x + 1] as usize);
            }
            if y + 1 < h {
                touch(ids[(y + 1) * w + x] as usize);
            }
        }
    }

    let mut absorbed_into: Vec<usize> = (0..n).collect();
    let mut alive = n;
    let mut small: BTreeSet<(usize, usize)> = (0..n).filter(|&c| size[c] < min_size).map(|c| (size[c], c)).collect();

    while alive > 1 {
        let Some((_, c)) = small.pop_first() else { break };
        let Some(target) = shared[c]
            .iter()
            .max_by(|(ia, ca), (ib, cb)| ca.cmp(cb).then(ib.cmp(ia)))
            .map(|(&t, _)| t)
        else {
            continue;
        };

        let neighbours = std::mem::take(&mut shared[c]);
        for (&nb, &count) in &neighbours {
            shared[nb].remove(&c);
            if nb != target {
                *shared[nb].entry(target).or_default() += count;
                *shared[target].entry(nb).or_default() += count;
            }
        }
        if size[target] < min_size {
            small.remove(&(size[target], target));
        }
        size[target] += size[c];
        size[c] = 0;
        if size[target] < min_size {
            small.insert((size[target], target));
        }
        absorbed_into[c] = target;
        alive -= 1;
    }

    let resolve = |mut c: usize| {
        while absorbed_into[c] != c {
            c = absorbed_into[c];
        }
        c as u32
    };
    let mapping: Vec<u32> = (0..n).map(resolve).collect();
    comps.remap(&mapping).expect("mapping covers every component")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(h: usize, w: usize, raw: &[u32]) -> LabelMap {
        LabelMap::from_partition(h, w, raw).unwrap()
    }

    #[test]
    fn connected_map_is_unchanged() {
        let m = map(3, 4, &[0, 0, 1, 1, 0, 0, 1, 1, 2, 2, 2, 2]);
        assert!(enforce_connectivity(&m, 1).same_partition(&m));
        assert!(enforce_connectivity(&m, 4).same_partition(&m));
    }

    #[test]
    fn stray_pixel_absorbed() {
        let m = map(3, 3, &[1, 1, 1, 1, 0, 1, 1, 1, 1]);
        let out = enforce_connectivity(&m, 2);
        assert_eq!(out.num_labels(), 1);
    }

    #[test]
    fn islands_split() {
        let m = map(1, 5, &[0, 0, 1, 0, 0]);
        let out = enforce_connectivity(&m, 1);
        assert_eq!(out.labels(), &[0, 0, 1, 2, 2]);
    }

    #[test]
    fn small_region_goes_to_longest_shared_boundary() {
        // region 2 (single pixel at (1,1)) touches label 0 on three sides and label 1 on one
        let m = map(3, 3, &[0, 0, 0, 0, 2, 1, 0, 0, 1]);
        let out = enforce_connectivity(&m, 2);
        assert_eq!(out.get(1, 1), out.get(0, 0));
        assert_ne!(out.get(1, 2), out.get(0, 0));
    }

    #[test]
    fn tie_goes_to_lowest_id() {
        // middle pixel touches left and right regions once each
        let m = map(1, 5, &[0, 0, 1, 2, 2]);
        let out = enforce_connectivity(&m, 2);
        assert_eq!(out.labels(), &[0, 0, 0, 1, 1]);
    }

    #[test]
    fn brute_force_component_count() {
        // two same-label islands separated by a column of another label
        let m = map(3, 3, &[0, 1, 0, 0, 1, 0, 0, 1, 0]);
        let cc = connected_components(&m);
        assert_eq!(cc.num_labels(), 3);
        assert_ne!(cc.get(0, 0), cc.get(0, 2));
    }
}
