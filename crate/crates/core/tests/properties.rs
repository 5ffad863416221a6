use std::collections::BTreeSet;

use binseg::connectivity::connected_components;
use binseg::egs::{egs_segment, EgsParams};
use binseg::eval::match_segments;
use binseg::segmenter::{build_rag, merge_by_key, merge_equal_codes, MergeMode};
use binseg::slic::{slic, SlicParams};
use binseg::synth;
use binseg::{LabelMap, RasterImage};
use proptest::prelude::*;

fn label_map(max_side: usize, max_labels: u32) -> impl Strategy<Value = LabelMap> {
    (1..=max_side, 1..=max_side, 1..=max_labels).prop_flat_map(|(h, w, k)| {
        prop::collection::vec(0..k, h * w).prop_map(move |raw| LabelMap::from_raw_sorted(h, w, &raw).unwrap())
    })
}

fn same_grid_pair() -> impl Strategy<Value = (LabelMap, LabelMap)> {
    (1..=12usize, 1..=12usize, 1..=6u32, 1..=6u32).prop_flat_map(|(h, w, a, b)| {
        (prop::collection::vec(0..a, h * w), prop::collection::vec(0..b, h * w)).prop_map(move |(p, g)| {
            (LabelMap::from_raw_sorted(h, w, &p).unwrap(), LabelMap::from_raw_sorted(h, w, &g).unwrap())
        })
    })
}

/// Superpixels (made 4-connected) plus one code in `0..alphabet` per superpixel.
fn instance(alphabet: u64) -> impl Strategy<Value = (LabelMap, Vec<u64>)> {
    label_map(10, 8).prop_flat_map(move |m| {
        let sp = connected_components(&m);
        let n = sp.num_labels();
        (Just(sp), prop::collection::vec(0..alphabet, n))
    })
}

fn partition_of(m: &LabelMap) -> BTreeSet<Vec<usize>> {
    let mut groups = vec![Vec::new(); m.num_labels()];
    for (i, &l) in m.labels().iter().enumerate() {
        groups[l as usize].push(i);
    }
    groups.into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn merging_never_adds_regions((sp, codes) in instance(3)) {
        let r = merge_equal_codes(&sp, &codes, &build_rag(&sp)).unwrap();
        prop_assert!(r.num_segments() <= sp.num_labels());
        let g = merge_by_key(&sp, &codes, &build_rag(&sp), MergeMode::Global).unwrap();
        prop_assert!(g.num_segments() <= r.num_segments());
    }

    #[test]
    fn merging_is_idempotent((sp, codes) in instance(3)) {
        let once = merge_equal_codes(&sp, &codes, &build_rag(&sp)).unwrap();
        let twice = merge_equal_codes(&once.labels, &once.segment_codes(), &build_rag(&once.labels)).unwrap();
        prop_assert_eq!(partition_of(&once.labels), partition_of(&twice.labels));
    }

    #[test]
    fn merging_ignores_superpixel_numbering((sp, codes) in instance(3), shift in 1u32..50) {
        let n = sp.num_labels() as u32;
        // reverse the ids, carrying each code along
        let mapping: Vec<u32> = (0..n).map(|i| n - 1 - i).collect();
        let renamed = LabelMap::new(sp.height(), sp.width(), sp.labels().iter().map(|&l| mapping[l as usize]).collect()).unwrap();
        let mut moved = vec![0; codes.len()];
        for (i, &c) in codes.iter().enumerate() {
            moved[mapping[i] as usize] = c + shift as u64;
        }
        let a = merge_equal_codes(&sp, &codes, &build_rag(&sp)).unwrap();
        let b = merge_equal_codes(&renamed, &moved, &build_rag(&renamed)).unwrap();
        prop_assert_eq!(partition_of(&a.labels), partition_of(&b.labels));
    }

    #[test]
    fn segments_share_one_code((sp, codes) in instance(4)) {
        let r = merge_equal_codes(&sp, &codes, &build_rag(&sp)).unwrap();
        for group in &r.merged_from {
            prop_assert!(group.iter().all(|&s| codes[s as usize] == codes[group[0] as usize]));
        }
        // adjacent superpixels with equal codes always end up together
        for &(a, b) in build_rag(&sp).edges() {
            if codes[a as usize] == codes[b as usize] {
                let seg = |s: u32| r.merged_from.iter().position(|g| g.contains(&s));
                prop_assert_eq!(seg(a), seg(b));
            }
        }
    }

    #[test]
    fn matching_covers_every_gt_segment((pred, gt) in same_grid_pair()) {
        let r = match_segments(&pred, &gt).unwrap();
        prop_assert_eq!(r.num_gt_segments, gt.num_labels());
        prop_assert!(r.per_gt_segment.iter().all(|m| m.iou > 0.0 && m.iou <= 1.0));
    }

    #[test]
    fn refinements_stay_total(gt in label_map(12, 5), cut in 1usize..6) {
        // split every gt segment by column band; the result refines gt
        let raw: Vec<u32> = gt.labels().iter().enumerate()
            .map(|(i, &l)| l * 16 + ((i % gt.width()) / cut) as u32)
            .collect();
        let refined = LabelMap::from_raw_sorted(gt.height(), gt.width(), &raw).unwrap();
        let r = match_segments(&refined, &gt).unwrap();
        prop_assert!(r.per_gt_segment.iter().all(|m| m.iou > 0.0 && m.iou <= 1.0));
        let exact = match_segments(&gt, &gt).unwrap();
        prop_assert_eq!(exact.mean_iou, 1.0);
    }
}

#[test]
fn slic_compactness_regularises_boundaries() {
    let image = synth::noise_image(12, 64, 64);
    let perimeter = |m: f64| {
        let params = SlicParams {
            compactness: m,
            ..SlicParams::with_superpixels(64)
        };
        let labels = slic(&image, &params).unwrap();
        let mut boundary = 0usize;
        for y in 0..64 {
            for x in 0..64 {
                let l = labels.get(y, x);
                boundary += (x + 1 < 64 && labels.get(y, x + 1) != l) as usize;
                boundary += (y + 1 < 64 && labels.get(y + 1, x) != l) as usize;
            }
        }
        boundary
    };
    let (loose, tight) = (perimeter(1.0), perimeter(1000.0));
    assert!(tight <= loose, "boundary length {tight} at m=1000 vs {loose} at m=1");
}

#[test]
fn egs_segment_count_falls_with_k() {
    for seed in 0..5 {
        let image = synth::noise_image(seed, 40, 48);
        let count = |k: f64| {
            egs_segment(
                &image,
                &EgsParams {
                    k,
                    min_size: 0,
                    ..EgsParams::default()
                },
            )
            .unwrap()
            .num_labels()
        };
        assert!(count(1000.0) <= count(10.0), "seed {seed}");
    }
}

#[test]
fn segmenters_emit_valid_partitions() {
    for seed in 0..10 {
        let scene = synth::scene(seed, 40, 56);
        for labels in [
            slic(&scene.image, &SlicParams::with_superpixels(50)).unwrap(),
            egs_segment(&scene.image, &EgsParams::default()).unwrap(),
        ] {
            let sizes = labels.sizes();
            assert_eq!(sizes.iter().sum::<usize>(), 40 * 56);
            assert!(sizes.iter().all(|&s| s > 0));
        }
    }
    let flat = RasterImage::filled(30, 30, [9, 9, 9]).unwrap();
    assert_eq!(egs_segment(&flat, &EgsParams::default()).unwrap().num_labels(), 1);
}
