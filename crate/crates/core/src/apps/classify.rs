//! Semi-supervised classification by a trained polynomial of the normalized
//! supporting matrix.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, HgspError, Result};
use crate::spectrum::{supporting_matrix, Spectrum};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub degree: usize,
    pub ridge: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            degree: 15,
            ridge: 1e-3,
        }
    }
}

/// `s' = sum_{j=0..k} beta_j P_s^j s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    pub coeffs: Vec<f64>,
    pub ridge: f64,
    pub spectrum_id: String,
}

impl ClassifierModel {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

fn check_labels(n: usize, labels: &[i8]) -> Result<()> {
    check_dim("label vector", n, labels.len())?;
    if let Some(i) = labels.iter().position(|l| !matches!(l, -1..=1)) {
        return Err(HgspError::InvalidArgument(format!(
            "label {} must be -1, 0 (unlabeled) or 1",
            i + 1
        )));
    }
    Ok(())
}

/// Columns `P^j s` for `j = 0..=degree`.
pub fn propagation_features(p: &DMatrix<f64>, s: &DVector<f64>, degree: usize) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(s.len(), degree + 1);
    let mut cur = s.clone();
    for j in 0..=degree {
        x.set_column(j, &cur);
        cur = p * cur;
    }
    x
}

/// Fits `beta` by ridge least squares on the labeled nodes, with unlabeled
/// entries of the input signal set to zero. `labels` holds `-1`, `1`, or `0`
/// for unlabeled.
pub fn lp_hgsp_train(sp: &Spectrum, labels: &[i8], opts: &TrainOptions) -> Result<ClassifierModel> {
    check_labels(sp.dim(), labels)?;
    if opts.degree == 0 {
        return Err(HgspError::InvalidArgument("degree must be at least 1".into()));
    }
    if opts.ridge.is_nan() || opts.ridge < 0.0 {
        return Err(HgspError::InvalidArgument(format!(
            "ridge must be non-negative, got {}",
            opts.ridge
        )));
    }
    if !labels.contains(&1) || !labels.contains(&-1) {
        return Err(HgspError::InvalidArgument(
            "training labels must include both classes".into(),
        ));
    }
    let p = supporting_matrix(sp, true)?;
    let s = DVector::from_iterator(labels.len(), labels.iter().map(|&l| l as f64));
    let features = propagation_features(&p, &s, opts.degree);
    let train: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] != 0).collect();
    let x = features.select_rows(&train);
    let y = s.select_rows(&train);
    let d = opts.degree + 1;
    let normal = x.tr_mul(&x) + DMatrix::identity(d, d) * opts.ridge;
    let beta = normal
        .cholesky()
        .ok_or_else(|| HgspError::Singular("normal equations are singular; increase the ridge".into()))?
        .solve(&x.tr_mul(&y));
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(HgspError::Singular("trained coefficients are not finite".into()));
    }
    Ok(ClassifierModel {
        coeffs: beta.iter().copied().collect(),
        ridge: opts.ridge,
        spectrum_id: sp.id(),
    })
}

/// Propagated scores `s'` for a partial labeling.
pub fn lp_hgsp_scores(model: &ClassifierModel, sp: &Spectrum, labels: &[i8]) -> Result<DVector<f64>> {
    check_labels(sp.dim(), labels)?;
    if model.spectrum_id != sp.id() {
        return Err(HgspError::SpectrumMismatch(format!(
            "model was trained on spectrum {}, got {}",
            model.spectrum_id,
            sp.id()
        )));
    }
    let p = supporting_matrix(sp, true)?;
    let s = DVector::from_iterator(labels.len(), labels.iter().map(|&l| l as f64));
    let features = propagation_features(&p, &s, model.degree());
    Ok(features * DVector::from_column_slice(&model.coeffs))
}

/// Full labeling: `1` where `s'_i >= 0`, `-1` otherwise.
pub fn lp_hgsp_classify(model: &ClassifierModel, sp: &Spectrum, labels: &[i8]) -> Result<Vec<i8>> {
    Ok(lp_hgsp_scores(model, sp, labels)?
        .iter()
        .map(|&x| if x < 0.0 { -1 } else { 1 })
        .collect())
}
