use crate::error::{check_dim, HgspError, Result};
use crate::filters::denoise;
use crate::hypergraph::{adjacency_tensor, Hypergraph};
use crate::spectrum::{decompose, original_to_freq, DecomposeOptions, Spectrum};
use crate::symtensor::Signal;

/// How the denoising strength is picked from the grid.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaSelection {
    /// Mean squared error against a known clean signal.
    Reference(Signal),
    /// Generalized cross-validation score of the linear smoother.
    Gcv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseReport {
    pub signal: Signal,
    pub gamma: f64,
    /// `(gamma, score)` for every grid value, in grid order.
    pub curve: Vec<(f64, f64)>,
}

fn gcv(sp: &Spectrum, y: &Signal, gamma: f64) -> Result<f64> {
    let n = sp.dim() as f64;
    let l1 = sp.lambda_max();
    let st = original_to_freq(sp, y)?;
    let mut resid = 0.0;
    let mut trace = 0.0;
    for (x, &l) in st.iter().zip(sp.coeffs().iter()) {
        let d = 1.0 - l / l1;
        let h = 1.0 / (1.0 + gamma * d * d);
        resid += ((1.0 - h) * x).powi(2);
        trace += h;
    }
    let dof = n - trace;
    Ok(if dof > 0.0 {
        n * resid / (dof * dof)
    } else {
        f64::INFINITY
    })
}

/// Denoises `y` for every grid value and keeps the best; ties go to the
/// earlier grid entry.
pub fn denoise_sweep(sp: &Spectrum, y: &Signal, grid: &[f64], select: &GammaSelection) -> Result<DenoiseReport> {
    if grid.is_empty() {
        return Err(HgspError::InvalidArgument("gamma grid is empty".into()));
    }
    if let GammaSelection::Reference(r) = select {
        check_dim("reference signal", sp.dim(), r.len())?;
    }
    let mut best: Option<(f64, f64, Signal)> = None;
    let mut curve = Vec::with_capacity(grid.len());
    for &gamma in grid {
        let out = denoise(sp, y, gamma)?;
        let score = match select {
            GammaSelection::Reference(r) => (&out - r).norm_squared() / r.len() as f64,
            GammaSelection::Gcv => gcv(sp, y, gamma)?,
        };
        curve.push((gamma, score));
        if best.as_ref().is_none_or(|b| score < b.1) {
            best = Some((gamma, score, out));
        }
    }
    let (gamma, _, signal) = best.expect("non-empty grid");
    Ok(DenoiseReport { signal, gamma, curve })
}

/// Decomposes the adjacency tensor of `h` once and sweeps the grid.
pub fn denoise_pipeline(
    h: &Hypergraph,
    y: &Signal,
    grid: &[f64],
    select: &GammaSelection,
    opts: &DecomposeOptions,
) -> Result<DenoiseReport> {
    check_dim("signal", h.num_nodes(), y.len())?;
    let sp = decompose(&adjacency_tensor(h), opts)?;
    denoise_sweep(&sp, y, grid, select)
}

/// Log-spaced grid `0, 10^lo, ..., 10^hi` with `steps` positive values.
pub fn default_gamma_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let mut grid = vec![0.0];
    let steps = steps.max(1);
    let span = if steps > 1 { (hi - lo) / (steps - 1) as f64 } else { 0.0 };
    grid.extend((0..steps).map(|i| 10f64.powf(lo + span * i as f64)));
    grid
}
