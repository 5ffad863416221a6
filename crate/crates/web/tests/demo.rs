use binseg_web::{boundary_overlay, mean_colour_fill, Demo};

#[test]
fn renders_have_rgba_geometry() {
    let mut demo = Demo::try_new(3, 60, 80).unwrap();
    let sp = demo.superpixel_labels(50, 10.0).unwrap();
    assert_eq!(demo.stats().regions as usize, sp.num_labels());
    let overlay = boundary_overlay(demo.scene(), &sp, [255, 0, 0]);
    assert_eq!(overlay.len(), 60 * 80 * 4);
    assert!(overlay.chunks(4).all(|p| p[3] == 255));
    assert_eq!(demo.image().len(), 60 * 80 * 4);
}

#[test]
fn merging_beats_raw_superpixels() {
    let mut demo = Demo::try_new(11, 72, 96).unwrap();
    demo.superpixel_labels(150, 10.0).unwrap();
    let raw = demo.stats();
    demo.merged_labels(150, false).unwrap();
    let stats = demo.stats();
    assert_eq!(stats.superpixels, raw.regions);
    assert!(stats.regions < stats.superpixels);
    assert!(stats.mean_iou > raw.mean_iou);
}

#[test]
fn egs_fill_is_flat_per_region() {
    let mut demo = Demo::try_new(5, 40, 40).unwrap();
    let labels = demo.egs_labels(1.0, 300.0, 20).unwrap();
    let fill = mean_colour_fill(demo.scene(), &labels);
    for (i, &l) in labels.labels().iter().enumerate() {
        let first = labels.labels().iter().position(|&m| m == l).unwrap();
        assert_eq!(fill[i * 4..i * 4 + 4], fill[first * 4..first * 4 + 4]);
    }
}
