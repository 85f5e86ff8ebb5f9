use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::spectrum::Spectrum;
use crate::symtensor::SymTensor;

/// Random orthonormal matrix (rows) from the QR factor of a Gaussian matrix.
pub fn random_orthonormal<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.qr().q().transpose()
}

/// `sum_r lambdas[r] v_r^{o order}` for the first `lambdas.len()` rows of `v`.
pub fn odeco_tensor(v: &DMatrix<f64>, lambdas: &[f64], order: usize) -> SymTensor {
    let n = v.nrows();
    let mut coeffs = DVector::zeros(n);
    coeffs.rows_mut(0, lambdas.len()).copy_from_slice(lambdas);
    Spectrum::from_parts(order, v.clone(), coeffs, 0.0)
        .unwrap()
        .reassemble()
}
