//! Representation-space distribution-shift analysis: PCA projection,
//! Gaussian fits, the KL / Wasserstein-2 / Fréchet distance triple, and
//! Spearman correlation against detector degradation.

mod gaussian;
mod io;
pub mod linalg;
mod pca;
mod spearman;

pub use gaussian::{
    default_ridge, fit_gaussian, frechet_gaussian, kl_gaussian, w2_gaussian, GaussianSummary,
    ShiftReport, DEFAULT_RIDGE_SCALE,
};
pub use io::{
    read_embedding_bin, read_embedding_csv, write_embedding_bin, write_embedding_csv,
    EMBEDDING_MAGIC,
};
pub use linalg::Matrix;
pub use pca::{fit_pca, project, PcaModel, DEFAULT_PCA_DIM};
pub use spearman::{spearman, CorrelationResult};
