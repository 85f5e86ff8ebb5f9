use nalgebra::DMatrix;

use super::kmeans::{kmeans, KMeansOptions};
use super::metrics::{intra_variance, silhouette};
use crate::error::{HgspError, Result};
use crate::spectrum::Spectrum;

/// Coefficients below this fraction of `|lambda_1|` count as zero.
pub const NONZERO_REL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterOptions {
    pub seed: u64,
    pub restarts: usize,
    /// Leading non-zero components used for the embedding; `None` uses all.
    pub embedding_dim: Option<usize>,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 50,
            embedding_dim: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    /// 0-based cluster id per node, numbered by first appearance.
    pub assignments: Vec<usize>,
    pub intra_variance: f64,
    pub silhouette: f64,
    /// Number of embedding columns `E`.
    pub embedding_dim: usize,
}

/// Rows of the `N x E` matrix whose columns are `lambda_r f_r` for the
/// leading basis vectors with non-zero coefficient.
pub fn spectral_embedding(sp: &Spectrum, e: usize) -> Result<DMatrix<f64>> {
    let l1 = sp.coeffs().amax();
    let cols: Vec<usize> = (0..sp.dim())
        .filter(|&r| l1 > 0.0 && sp.coeffs()[r].abs() > NONZERO_REL * l1)
        .take(e)
        .collect();
    if cols.is_empty() {
        return Err(HgspError::DegenerateSpectrum(
            "no basis vector has a non-zero coefficient".into(),
        ));
    }
    Ok(DMatrix::from_fn(sp.dim(), cols.len(), |i, j| {
        sp.coeffs()[cols[j]] * sp.basis()[(cols[j], i)]
    }))
}

/// k-means on the spectral embedding of the nodes.
pub fn spectral_cluster(sp: &Spectrum, k: usize, opts: &ClusterOptions) -> Result<ClusterResult> {
    let n = sp.dim();
    if k == 0 || k > n {
        return Err(HgspError::InvalidArgument(format!(
            "cluster count {k} must lie in 1..={n}"
        )));
    }
    let e = opts.embedding_dim.unwrap_or(n);
    if e == 0 {
        return Err(HgspError::InvalidArgument("embedding dimension must be positive".into()));
    }
    let s = spectral_embedding(sp, e)?;
    let km = kmeans(
        &s,
        k,
        &KMeansOptions {
            restarts: opts.restarts,
            seed: opts.seed,
            ..KMeansOptions::default()
        },
    )?;
    Ok(ClusterResult {
        intra_variance: intra_variance(&s, &km.assignments, &km.centroids),
        silhouette: silhouette(&s, &km.assignments),
        embedding_dim: s.ncols(),
        assignments: km.assignments,
    })
}
