use std::path::Path;
use std::process::{Command, Output};

use binseg::itq::{save_model, HashModel};
use binseg::segmenter::{assign_superpixel_codes, build_rag, merge_equal_codes, upsample_codes};
use binseg::synth;
use binseg::tensor_io as tio;

fn binseg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_binseg")).args(args).output().expect("spawn binseg")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn usage_errors_exit_one() {
    let o = binseg(&["slic", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--bogus"));
    assert_eq!(binseg(&[]).status.code(), Some(1));
    assert_eq!(binseg(&["sweep", "--jobs", "0", "--manifest", "m", "--model", "x", "--out", "o"]).status.code(), Some(1));
}

#[test]
fn help_documents_formats() {
    for sub in ["train-itq", "encode", "slic", "egs", "segment", "kmeans-baseline", "eval", "sweep"] {
        let o = binseg(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{sub}");
        let text = stdout(&o);
        for needle in ["FMAP", "FVEC", "BMAP", "ITQ1", "--seed"] {
            assert!(text.contains(needle), "{sub} --help lacks {needle}");
        }
    }
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ppm");
    std::fs::write(&bad, b"P3\n1 1\n255\n0 0 0\n").unwrap();
    let o = binseg(&["slic", "--image", s(&bad), "--out", s(&dir.path().join("o.pgm"))]);
    assert_eq!(o.status.code(), Some(2));
    let missing = dir.path().join("missing.ppm");
    let o = binseg(&["egs", "--image", s(&missing), "--out", s(&dir.path().join("o.pgm"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_identical_maps() {
    let dir = tempfile::tempdir().unwrap();
    let gt = dir.path().join("gt.pgm");
    tio::write_label_map(&synth::scene(1, 32, 40).ground_truth, &gt).unwrap();
    let o = binseg(&["eval", "--pred", s(&gt), "--gt", s(&gt)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "mean_iou=1.0000"));
}

#[test]
fn segment_matches_individual_stages() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let scene = synth::scene(8, 48, 64);
    let (model, _) = HashModel::train(&scene.features.to_rows(), scene.features.channels(), 8, 20, 3).unwrap();
    tio::write_image(&scene.image, d.join("img.ppm")).unwrap();
    tio::write_feature_map(&scene.features, d.join("img.fmap")).unwrap();
    save_model(&model, d.join("m.itq")).unwrap();

    let common = ["--superpixels", "60"];
    let run = |args: &[&str]| {
        let mut full = args.to_vec();
        full.extend(common);
        let o = binseg(&full);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    };
    run(&["slic", "--image", s(&d.join("img.ppm")), "--out", s(&d.join("sp.pgm"))]);
    run(&[
        "segment",
        "--image",
        s(&d.join("img.ppm")),
        "--fmap",
        s(&d.join("img.fmap")),
        "--model",
        s(&d.join("m.itq")),
        "--out",
        s(&d.join("seg.pgm")),
    ]);
    let o = binseg(&["encode", "--model", s(&d.join("m.itq")), "--fmap", s(&d.join("img.fmap")), "--out", s(&d.join("c.bmap"))]);
    assert!(o.status.success());

    let sp = tio::read_label_map(d.join("sp.pgm")).unwrap();
    let codes = tio::read_code_map(d.join("c.bmap")).unwrap();
    let pixel_codes = upsample_codes(&codes, sp.height(), sp.width()).unwrap();
    let sp_codes = assign_superpixel_codes(&sp, &pixel_codes, codes.code_len()).unwrap();
    let merged = merge_equal_codes(&sp, &sp_codes, &build_rag(&sp)).unwrap();

    let seg = tio::read_label_map(d.join("seg.pgm")).unwrap();
    assert_eq!(seg, merged.labels);
    let sidecar = std::fs::read_to_string(d.join("seg.pgm.segments.txt")).unwrap();
    assert_eq!(sidecar, merged.sidecar(8));
}

#[test]
fn sweep_has_five_rows_per_method() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let samples = synth::dataset(2, 31, 48, 64);
    let mut manifest = String::from("# image\tfmap\tgt\n");
    for (i, sample) in samples.iter().enumerate() {
        tio::write_image(&sample.image, d.join(format!("{i}.ppm"))).unwrap();
        tio::write_feature_map(&sample.fmap, d.join(format!("{i}.fmap"))).unwrap();
        tio::write_label_map(&synth::scene(31 + i as u64, 48, 64).ground_truth, d.join(format!("{i}.pgm"))).unwrap();
        manifest.push_str(&format!("{i}.ppm\t{i}.fmap\t{i}.pgm\n"));
    }
    // an image whose annotation is missing is skipped, not fatal
    manifest.push_str("0.ppm\t0.fmap\tnope.pgm\n");
    std::fs::write(d.join("m.tsv"), manifest).unwrap();
    let corpus = tio::FeatureCorpus::from_feature_maps(samples.iter().map(|s| &s.fmap)).unwrap();
    let (model, _) = HashModel::train_corpus(&corpus, 8, 20, 0).unwrap();
    save_model(&model, d.join("m.itq")).unwrap();

    let out = d.join("sweep.csv");
    let o = binseg(&[
        "sweep",
        "--manifest",
        s(&d.join("m.tsv")),
        "--model",
        s(&d.join("m.itq")),
        "--counts",
        "100,200,300,400,500",
        "--kmeans-k",
        "32",
        "--jobs",
        "2",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("count,method,mean_iou_percent"));
    let rows: Vec<&str> = lines.collect();
    for method in ["binmap", "egs", "kmeans", "slic"] {
        assert_eq!(rows.iter().filter(|r| r.split(',').nth(1) == Some(method)).count(), 5, "{method}");
    }
    let details = std::fs::read_to_string(d.join("sweep.csv.jsonl")).unwrap();
    assert!(details.lines().any(|l| l.contains("skipped")));
}
