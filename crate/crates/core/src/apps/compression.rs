use nalgebra::DVector;

use crate::error::{check_dim, HgspError, Result};
use crate::spectrum::{bandwidth, original_to_freq, Spectrum, DEFAULT_BANDWIDTH_TOL};
use crate::symtensor::Signal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompressionMode {
    /// Keep coefficients up to the signal's bandwidth at the given relative
    /// tolerance.
    Lossless { tol: f64 },
    /// Keep the fewest leading coefficients holding `1 - epsilon` of the energy.
    Energy { epsilon: f64 },
}

impl Default for CompressionMode {
    fn default() -> Self {
        Self::Lossless {
            tol: DEFAULT_BANDWIDTH_TOL,
        }
    }
}

/// Leading `K` coefficients of `s~ = V s`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedSignal {
    pub coeffs: DVector<f64>,
    pub dim: usize,
    pub lossless: bool,
    /// Squared reconstruction error `||s - s_rec||^2`; zero when lossless.
    pub mse: f64,
    pub spectrum_id: String,
}

impl CompressedSignal {
    pub fn bandwidth(&self) -> usize {
        self.coeffs.len()
    }

    /// `N / K`.
    pub fn compression_ratio(&self) -> f64 {
        self.dim as f64 / self.bandwidth() as f64
    }
}

pub fn compress(sp: &Spectrum, s: &Signal, mode: CompressionMode) -> Result<CompressedSignal> {
    let st = original_to_freq(sp, s)?;
    let n = sp.dim();
    let (k, lossless) = match mode {
        CompressionMode::Lossless { tol } => (bandwidth(sp, s, tol)?, true),
        CompressionMode::Energy { epsilon } => {
            if !(0.0..1.0).contains(&epsilon) {
                return Err(HgspError::InvalidArgument(format!(
                    "energy fraction epsilon must lie in [0, 1), got {epsilon}"
                )));
            }
            let total = st.norm_squared();
            let target = (1.0 - epsilon) * total;
            let mut acc = 0.0;
            let k = st
                .iter()
                .position(|x| {
                    acc += x * x;
                    acc >= target
                })
                .map_or(n, |i| i + 1);
            (k, false)
        }
    };
    // an all-zero signal still keeps one coefficient
    let k = k.max(1);
    let coeffs = st.rows(0, k).into_owned();
    let mse = if lossless {
        0.0
    } else {
        st.rows(k, n - k).norm_squared()
    };
    Ok(CompressedSignal {
        coeffs,
        dim: n,
        lossless,
        mse,
        spectrum_id: sp.id(),
    })
}

/// `F_[K]^T s~_[K]`.
pub fn decompress(c: &CompressedSignal, sp: &Spectrum) -> Result<Signal> {
    check_dim("spectrum", c.dim, sp.dim())?;
    if c.spectrum_id != sp.id() {
        return Err(HgspError::SpectrumMismatch(format!(
            "signal was compressed with spectrum {}, got {}",
            c.spectrum_id,
            sp.id()
        )));
    }
    if c.bandwidth() == 0 || c.bandwidth() > c.dim {
        return Err(HgspError::InvalidArgument(format!(
            "retained coefficient count {} must lie in 1..={}",
            c.bandwidth(),
            c.dim
        )));
    }
    Ok(sp.basis().rows(0, c.bandwidth()).tr_mul(&c.coeffs))
}
