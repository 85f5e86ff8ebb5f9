//! Polynomial filters in tensor and supporting-matrix form, and the
//! closed-form denoising filter.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, HgspError, Result};
use crate::spectrum::{original_to_freq, freq_to_original, supporting_matrix, Spectrum};
use crate::symtensor::{Signal, SymTensor};

/// Intermediate shifts larger than this abort [`shift_k`].
pub const OVERFLOW_LIMIT: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyForm {
    /// `sum_{k=1..a} alpha_k s_(k)`; `coeffs[0]` is `alpha_1`.
    Tensor,
    /// `sum_{k=0..a} beta_k P^k s`; `coeffs[0]` is `beta_0`.
    Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolySpec {
    form: PolyForm,
    coeffs: Vec<f64>,
}

impl PolySpec {
    pub fn tensor(alphas: Vec<f64>) -> Result<Self> {
        Self::new(PolyForm::Tensor, alphas)
    }

    pub fn matrix(betas: Vec<f64>) -> Result<Self> {
        Self::new(PolyForm::Matrix, betas)
    }

    fn new(form: PolyForm, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(HgspError::InvalidArgument(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(HgspError::InvalidArgument(format!(
                "polynomial coefficient {} is not finite",
                i + 1
            )));
        }
        Ok(Self { form, coeffs })
    }

    pub fn form(&self) -> PolyForm {
        self.form
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Highest shift power.
    pub fn degree(&self) -> usize {
        match self.form {
            PolyForm::Tensor => self.coeffs.len(),
            PolyForm::Matrix => self.coeffs.len() - 1,
        }
    }
}

fn guard(s: &Signal, step: usize) -> Result<()> {
    let norm = s.amax();
    if !norm.is_finite() || norm > OVERFLOW_LIMIT {
        return Err(HgspError::Overflow(format!(
            "shift {step} reached magnitude {norm:e}; normalize the tensor or signal"
        )));
    }
    Ok(())
}

/// Nested shift: `s_(k) = t (s_(k-1))^[M-1]` with `s_(0) = s`.
pub fn shift_k(t: &SymTensor, s: &Signal, k: usize) -> Result<Signal> {
    if k == 0 {
        return Err(HgspError::InvalidArgument("shift count must be at least 1".into()));
    }
    let mut cur = s.clone();
    for step in 1..=k {
        cur = t.contract_vector(&cur)?;
        guard(&cur, step)?;
    }
    Ok(cur)
}

/// `sum_k alpha_k s_(k)`, reusing each nested shift for the next term.
pub fn apply_tensor_poly(t: &SymTensor, spec: &PolySpec, s: &Signal) -> Result<Signal> {
    if spec.form != PolyForm::Tensor {
        return Err(HgspError::InvalidArgument("expected a tensor-form polynomial".into()));
    }
    let mut out = DVector::zeros(s.len());
    let mut cur = s.clone();
    for (step, &alpha) in spec.coeffs.iter().enumerate() {
        cur = t.contract_vector(&cur)?;
        guard(&cur, step + 1)?;
        out.axpy(alpha, &cur, 1.0);
    }
    Ok(out)
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn check_matrix(spec: &PolySpec) -> Result<()> {
    if spec.form != PolyForm::Matrix {
        return Err(HgspError::InvalidArgument("expected a matrix-form polynomial".into()));
    }
    Ok(())
}

/// `h(P) s` evaluated in the spectral domain as `V^T diag(h(lambda)) V s`.
pub fn apply_matrix_poly(sp: &Spectrum, spec: &PolySpec, s: &Signal) -> Result<Signal> {
    check_matrix(spec)?;
    let mut st = original_to_freq(sp, s)?;
    for (x, &l) in st.iter_mut().zip(sp.coeffs().iter()) {
        *x *= horner(&spec.coeffs, l);
    }
    freq_to_original(sp, &st)
}

/// `h(P) s` with explicit matrix-vector products against `p` (Horner form).
pub fn apply_matrix_poly_explicit(p: &DMatrix<f64>, spec: &PolySpec, s: &Signal) -> Result<Signal> {
    check_matrix(spec)?;
    check_dim("signal", p.nrows(), s.len())?;
    let mut out = DVector::zeros(s.len());
    for &beta in spec.coeffs.iter().rev() {
        out = p * out;
        out.axpy(beta, s, 1.0);
    }
    Ok(out)
}

fn check_denoise(sp: &Spectrum, gamma: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(HgspError::InvalidArgument(format!(
            "gamma must be finite and non-negative, got {gamma}"
        )));
    }
    let l1 = sp.lambda_max();
    if l1.is_nan() || l1 <= 0.0 {
        return Err(HgspError::DegenerateSpectrum(format!(
            "denoising needs lambda_1 > 0, got {l1}"
        )));
    }
    Ok(l1)
}

/// Solves `(I + gamma (I - P_s)^T (I - P_s)) s' = y` in the spectral domain.
pub fn denoise(sp: &Spectrum, y: &Signal, gamma: f64) -> Result<Signal> {
    let l1 = check_denoise(sp, gamma)?;
    if gamma == 0.0 {
        check_dim("signal", sp.dim(), y.len())?;
        return Ok(y.clone());
    }
    let mut st = original_to_freq(sp, y)?;
    for (x, &l) in st.iter_mut().zip(sp.coeffs().iter()) {
        let d = 1.0 - l / l1;
        *x /= 1.0 + gamma * d * d;
    }
    freq_to_original(sp, &st)
}

/// Same system as [`denoise`], solved directly by Cholesky factorization.
pub fn denoise_direct(sp: &Spectrum, y: &Signal, gamma: f64) -> Result<Signal> {
    check_denoise(sp, gamma)?;
    check_dim("signal", sp.dim(), y.len())?;
    let n = sp.dim();
    let d = DMatrix::identity(n, n) - supporting_matrix(sp, true)?;
    let system = DMatrix::identity(n, n) + d.tr_mul(&d) * gamma;
    let chol = system
        .cholesky()
        .ok_or_else(|| HgspError::Singular("denoising system is not positive definite".into()))?;
    Ok(chol.solve(y))
}

/// `||(I - P_s) s||_2`, the quadratic variation penalized by [`denoise`].
pub fn quadratic_variation(sp: &Spectrum, s: &Signal) -> Result<f64> {
    let ps = supporting_matrix(sp, true)?;
    check_dim("signal", sp.dim(), s.len())?;
    Ok((s - ps * s).norm())
}
