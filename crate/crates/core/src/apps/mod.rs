//! Application pipelines built on the spectrum: compression, spectral
//! clustering, semi-supervised classification and denoising.

pub mod classify;
pub mod cluster;
pub mod compression;
pub mod denoising;
pub mod kmeans;
pub mod metrics;

pub use classify::{lp_hgsp_classify, lp_hgsp_train, ClassifierModel, TrainOptions};
pub use cluster::{spectral_cluster, ClusterOptions, ClusterResult};
pub use compression::{compress, decompress, CompressedSignal, CompressionMode};
pub use denoising::{denoise_pipeline, denoise_sweep, DenoiseReport, GammaSelection};
