//! `binseg`: train ITQ hashes, encode feature maps, extract superpixels, merge
//! them by binary code, and benchmark the result.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use binseg::egs::{egs_segment, EgsParams};
use binseg::eval::{load_record, match_ground_truth, parse_manifest, sweep_samples, Method, SweepConfig, DEFAULT_COUNTS};
use binseg::itq::{load_model, save_model, HashModel, DEFAULT_CODE_LEN, DEFAULT_ITERATIONS};
use binseg::segmenter::{
    build_rag, kmeans_merge, segment_image, superpixel_mean_fmap_features, MergeMode, SegmentationResult, DEFAULT_KMEANS_K,
};
use binseg::slic::{slic, SlicParams};
use binseg::tensor_io::{self as tio, FeatureCorpus};
use clap::{Args, Parser, Subcommand};

const FORMATS: &str = "\
File formats (all integers little-endian unless noted):
  FVEC   feature corpus: \"FVEC\", u32 rows N, u32 dim D, u32 0, then N*D f32 row-major.
  FMAP   feature map: \"FMAP\", u8 version=1, u8 dtype=0 (f32), u8 ndim=3, u8 0,
         u32 C, u32 H', u32 W', u32 source height, u32 source width,
         then C*H'*W' f32 in channel-major order.
  ITQ1   hash model: \"ITQ1\", u32 D, u32 code length c, u32 0, then f32 mean (D),
         projection (D*c, row-major), rotation (c*c, row-major).
  BMAP   code map: \"BMAP\", u8 version=1, u8 code length, u16 0, u32 H', u32 W',
         u32 source height, u32 source width, then H'*W' u64 codes row-major
         (bit i of a code is hash bit i).
  PPM    images: binary P6, maxval 255.
  PGM    label maps: binary P5; written with maxval 65535 (16-bit big-endian
         samples), read at maxval 255 or 65535. Ground truth value 65535 is void.
  sidecar  `<out>.segments.txt`, written next to segment and kmeans-baseline
         outputs: a `#` header, then `segment<TAB>code-hex<TAB>superpixel,ids`.
  manifest  one record per line: image<TAB>fmap<TAB>gt[<TAB>gt...]; `#` starts a
         comment; relative paths resolve against the manifest's directory.";

#[derive(Debug, Parser)]
#[command(name = "binseg", version, about = "Binary-code superpixel merging for image segmentation")]
#[command(after_long_help = FORMATS)]
struct Cli {
    /// Seed for every randomised step (ITQ rotation, k-means++).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for `sweep`; outputs do not depend on it.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit PCA + ITQ on FVEC corpora and/or FMAP feature maps and write an ITQ1 model.
    #[command(after_long_help = FORMATS)]
    TrainItq {
        /// Training inputs, FVEC or FMAP (detected by magic); rows are pooled.
        #[arg(long = "input", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        /// Bits per code.
        #[arg(long, default_value_t = DEFAULT_CODE_LEN)]
        code_len: usize,
        /// Rotation updates.
        #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
        iters: usize,
        /// Model file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Hash every cell of an FMAP into a BMAP code map.
    #[command(after_long_help = FORMATS)]
    Encode {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        fmap: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// SLIC superpixels of a PPM image, written as a PGM label map.
    #[command(after_long_help = FORMATS)]
    Slic {
        #[arg(long)]
        image: PathBuf,
        #[command(flatten)]
        slic: SlicArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Efficient graph-based segmentation of a PPM image, written as a PGM label map.
    #[command(after_long_help = FORMATS)]
    Egs {
        #[arg(long)]
        image: PathBuf,
        #[command(flatten)]
        egs: EgsArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encode the feature map, extract SLIC superpixels and merge those with equal codes.
    #[command(after_long_help = FORMATS)]
    Segment {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        fmap: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        slic: SlicArgs,
        #[arg(long, default_value = "adjacency")]
        merge_mode: MergeMode,
        /// Label map to write; the sidecar goes to `<out>.segments.txt`.
        #[arg(long)]
        out: PathBuf,
    },
    /// SLIC superpixels merged by k-means over their mean feature vectors.
    #[command(after_long_help = FORMATS)]
    KmeansBaseline {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        fmap: PathBuf,
        #[command(flatten)]
        slic: SlicArgs,
        /// Cluster count; lowered to the superpixel count when larger.
        #[arg(long, default_value_t = DEFAULT_KMEANS_K)]
        kmeans_k: usize,
        #[arg(long, default_value = "adjacency")]
        merge_mode: MergeMode,
        /// Label map to write; the sidecar goes to `<out>.segments.txt`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Segmentation-IoU of a predicted label map against a ground truth.
    /// Prints `mean_iou=<value>`.
    #[command(after_long_help = FORMATS)]
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        /// Optional JSON file receiving the per-segment report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate every method at every superpixel count over a dataset manifest.
    #[command(after_long_help = FORMATS)]
    Sweep {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Superpixel counts, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_COUNTS)]
        counts: Vec<usize>,
        /// Methods to run, comma separated: binmap, egs, kmeans, slic.
        #[arg(long, value_delimiter = ',', default_values_t = Method::ALL)]
        methods: Vec<Method>,
        #[arg(long, default_value_t = SlicParams::default().compactness)]
        compactness: f64,
        #[arg(long = "slic-iters", default_value_t = SlicParams::default().iterations)]
        slic_iters: usize,
        #[arg(long, default_value_t = SlicParams::default().min_region_frac)]
        min_region_frac: f64,
        #[command(flatten)]
        egs: EgsArgs,
        /// k-means cluster count, lowered per image to its superpixel count.
        #[arg(long, default_value_t = DEFAULT_KMEANS_K)]
        kmeans_k: usize,
        #[arg(long, default_value = "adjacency")]
        merge_mode: MergeMode,
        /// CSV with header `count,method,mean_iou_percent`.
        #[arg(long)]
        out: PathBuf,
        /// Per-image JSON lines; defaults to `<out>.jsonl`.
        #[arg(long)]
        details: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SlicArgs {
    /// Target superpixel count K.
    #[arg(long, default_value_t = SlicParams::default().num_superpixels)]
    superpixels: usize,
    /// Spatial weight m.
    #[arg(long, default_value_t = SlicParams::default().compactness)]
    compactness: f64,
    /// SLIC assignment/update rounds.
    #[arg(long = "slic-iters", default_value_t = SlicParams::default().iterations)]
    slic_iters: usize,
    /// Regions under this fraction of N/K pixels are absorbed by a neighbour.
    #[arg(long, default_value_t = SlicParams::default().min_region_frac)]
    min_region_frac: f64,
}

impl SlicArgs {
    fn params(&self) -> SlicParams {
        SlicParams {
            num_superpixels: self.superpixels,
            compactness: self.compactness,
            iterations: self.slic_iters,
            min_region_frac: self.min_region_frac,
        }
    }
}

#[derive(Debug, Args)]
struct EgsArgs {
    /// Gaussian pre-smoothing sigma.
    #[arg(long, default_value_t = EgsParams::default().sigma)]
    sigma: f64,
    /// Merge threshold scale k.
    #[arg(long, default_value_t = EgsParams::default().k)]
    k: f64,
    /// Smallest component kept.
    #[arg(long, default_value_t = EgsParams::default().min_size)]
    min_size: usize,
}

impl EgsArgs {
    fn params(&self) -> EgsParams {
        EgsParams {
            sigma: self.sigma,
            k: self.k,
            min_size: self.min_size,
        }
    }
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".segments.txt");
    PathBuf::from(name)
}

fn write_text(path: &Path, text: &str) -> binseg::Result<()> {
    std::fs::write(path, text).map_err(binseg::Error::from)
}

fn write_segmentation(result: &SegmentationResult, code_len: usize, out: &Path) -> binseg::Result<()> {
    tio::write_label_map(&result.labels, out)?;
    write_text(&sidecar_path(out), &result.sidecar(code_len))?;
    println!("{} segments -> {}", result.num_segments(), out.display());
    Ok(())
}

fn load_training_rows(path: &Path) -> binseg::Result<FeatureCorpus> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(b"FMAP") {
        let fmap = tio::decode_feature_map(&bytes)?;
        FeatureCorpus::from_feature_maps([&fmap])
    } else {
        Ok(tio::decode_corpus(&bytes)?)
    }
}

fn bits_for(k: usize) -> usize {
    (usize::BITS - k.saturating_sub(1).leading_zeros()).max(1) as usize
}

fn run(cli: Cli) -> binseg::Result<()> {
    match cli.command {
        Command::TrainItq {
            inputs,
            code_len,
            iters,
            out,
        } => {
            let parts = inputs.iter().map(|p| load_training_rows(p)).collect::<binseg::Result<Vec<_>>>()?;
            let corpus = FeatureCorpus::concat(&parts)?;
            log::info!("training on {} vectors of dimension {}", corpus.rows(), corpus.dim());
            let (model, report) = HashModel::train_corpus(&corpus, code_len, iters, cli.seed)?;
            log::info!(
                "quantization loss {:.6} -> {:.6} over {} iterations",
                report.initial_loss,
                report.final_loss(),
                report.iterations
            );
            save_model(&model, &out)?;
            println!("final_loss={:.6}", report.final_loss());
        }
        Command::Encode { model, fmap, out } => {
            let model = load_model(model)?;
            let codes = model.encode_feature_map(&tio::read_feature_map(fmap)?)?;
            tio::write_code_map(&codes, &out)?;
            println!("{}x{} codes -> {}", codes.height(), codes.width(), out.display());
        }
        Command::Slic { image, slic: args, out } => {
            let labels = slic(&tio::read_image(image)?, &args.params())?;
            tio::write_label_map(&labels, &out)?;
            println!("{} superpixels -> {}", labels.num_labels(), out.display());
        }
        Command::Egs { image, egs, out } => {
            let labels = egs_segment(&tio::read_image(image)?, &egs.params())?;
            tio::write_label_map(&labels, &out)?;
            println!("{} segments -> {}", labels.num_labels(), out.display());
        }
        Command::Segment {
            image,
            fmap,
            model,
            slic: args,
            merge_mode,
            out,
        } => {
            let model = load_model(model)?;
            let result = segment_image(
                &tio::read_image(image)?,
                &tio::read_feature_map(fmap)?,
                &model,
                &args.params(),
                merge_mode,
            )?;
            write_segmentation(&result, model.code_len(), &out)?;
        }
        Command::KmeansBaseline {
            image,
            fmap,
            slic: args,
            kmeans_k,
            merge_mode,
            out,
        } => {
            let image = tio::read_image(image)?;
            let fmap = tio::read_feature_map(fmap)?;
            let superpixels = slic(&image, &args.params())?;
            let features = superpixel_mean_fmap_features(&superpixels, &fmap)?;
            let k = kmeans_k.min(superpixels.num_labels());
            if k < kmeans_k {
                log::warn!("--kmeans-k {kmeans_k} exceeds the {k} superpixels; using {k}");
            }
            let rag = build_rag(&superpixels);
            let result = kmeans_merge(&superpixels, &features, fmap.channels(), k, cli.seed, &rag, merge_mode)?;
            write_segmentation(&result, bits_for(k), &out)?;
        }
        Command::Eval { pred, gt, out } => {
            let report = match_ground_truth(&tio::read_label_map(pred)?, &tio::read_ground_truth(gt)?)?;
            if let Some(out) = out {
                let json = serde_json::to_string_pretty(&report).map_err(|e| binseg::Error::InvalidInput(e.to_string()))?;
                write_text(&out, &(json + "\n"))?;
            }
            println!("mean_iou={:.4}", report.mean_iou);
            println!("num_gt_segments={}", report.num_gt_segments);
        }
        Command::Sweep {
            manifest,
            model,
            counts,
            methods,
            compactness,
            slic_iters,
            min_region_frac,
            egs,
            kmeans_k,
            merge_mode,
            out,
            details,
        } => {
            let text = std::fs::read_to_string(&manifest)?;
            let base = manifest.parent().unwrap_or(Path::new("."));
            let samples = parse_manifest(&text, base)?
                .iter()
                .map(load_record)
                .collect::<binseg::Result<Vec<_>>>()?;
            let config = SweepConfig {
                methods,
                counts,
                slic: SlicParams {
                    compactness,
                    iterations: slic_iters,
                    min_region_frac,
                    ..SlicParams::default()
                },
                egs: egs.params(),
                kmeans_k,
                merge_mode,
                seed: cli.seed,
                jobs: cli.jobs as usize,
            };
            let result = sweep_samples(&samples, &load_model(model)?, &config)?;
            write_text(&out, &result.to_csv())?;
            let details = details.unwrap_or_else(|| {
                let mut name = out.as_os_str().to_owned();
                name.push(".jsonl");
                PathBuf::from(name)
            });
            write_text(&details, &result.to_jsonl())?;
            for (method, row) in result.best_by_method() {
                println!("best {}: {:.2}% at {} superpixels", method.name(), row.mean_iou_percent, row.count);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BINSEG_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
