//! Image segmentation by merging superpixels whose hashed CNN features agree.
//!
//! The pipeline has three stages:
//!
//! 1. A spatial feature map (`C × H' × W'`, read from an FMAP file) is turned into
//!    a grid of short binary codes by an ITQ hash ([`itq`]): PCA projection, a
//!    learned orthogonal rotation, a sigmoid and a 0.5 threshold.
//! 2. The image is over-segmented into superpixels ([`slic`]).
//! 3. Each superpixel takes the per-bit majority code of the pixels it covers and
//!    adjacent superpixels with identical codes are merged ([`segmenter`]).
//!
//! Baselines ([`egs`], raw SLIC, k-means over superpixel features) and the
//! Segmentation-IoU harness ([`eval`]) are included so the whole comparison can be
//! run from one crate.

pub mod color;
pub mod connectivity;
pub mod egs;
pub mod error;
pub mod eval;
pub mod itq;
pub mod raster;
pub mod segmenter;
pub mod slic;
pub mod synth;
pub mod tensor_io;
mod union_find;

pub use error::{Error, FormatError, FormatErrorKind, Result};
pub use raster::{GroundTruth, LabelMap, RasterImage, VOID_LABEL};
pub use tensor_io::FeatureMap;
