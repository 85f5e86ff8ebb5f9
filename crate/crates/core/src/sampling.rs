//! Sampling and perfect recovery of bandlimited signals.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, HgspError, Result};
use crate::spectrum::Spectrum;
use crate::symtensor::{for_each_sorted_tuple, outer_power, DenseTensor, Signal, SymTensor};

/// Largest condition number of `U F_[K]^T` accepted by [`build_plan`].
pub const MAX_CONDITION: f64 = 1e12;

/// Tolerance on `Z U F_[K]^T = I` when loading a plan.
const PLAN_IDENTITY_TOL: f64 = 1e-8;

/// Sampled node indices `q` (0-based, ascending) with the recovery matrix
/// `Z` (`K x Q`) and the interpolator `T = F_[K]^T Z` (`N x Q`).
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    indices: Vec<usize>,
    bandwidth: usize,
    z: DMatrix<f64>,
    t: DMatrix<f64>,
    spectrum_id: String,
}

impl SamplingPlan {
    /// Rebuilds a plan from stored parts, checking it against `sp`.
    pub fn from_parts(
        sp: &Spectrum,
        indices: Vec<usize>,
        bandwidth: usize,
        z: DMatrix<f64>,
        spectrum_id: String,
    ) -> Result<Self> {
        if spectrum_id != sp.id() {
            return Err(HgspError::SpectrumMismatch(format!(
                "plan was built for spectrum {spectrum_id}, got {}",
                sp.id()
            )));
        }
        validate_indices(sp.dim(), &indices)?;
        let q = indices.len();
        if bandwidth == 0 || bandwidth > q {
            return Err(HgspError::InvalidArgument(format!(
                "bandwidth {bandwidth} must lie in 1..={q}"
            )));
        }
        check_dim("recovery matrix rows", bandwidth, z.nrows())?;
        check_dim("recovery matrix columns", q, z.ncols())?;
        let fk = sp.basis().rows(0, bandwidth);
        let ufk = selected_columns(&fk, &indices).transpose();
        let err = (&z * ufk - DMatrix::identity(bandwidth, bandwidth)).amax();
        if err > PLAN_IDENTITY_TOL {
            return Err(HgspError::InvalidArgument(format!(
                "recovery matrix does not invert the sampled basis (error {err:e})"
            )));
        }
        let t = fk.tr_mul(&z);
        Ok(Self {
            indices,
            bandwidth,
            z,
            t,
            spectrum_id,
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn num_samples(&self) -> usize {
        self.indices.len()
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn recovery(&self) -> &DMatrix<f64> {
        &self.z
    }

    pub fn interpolator(&self) -> &DMatrix<f64> {
        &self.t
    }

    pub fn spectrum_id(&self) -> &str {
        &self.spectrum_id
    }

    /// 0/1 selector `U` (`Q x N`).
    pub fn selector(&self) -> DMatrix<f64> {
        let mut u = DMatrix::zeros(self.indices.len(), self.dim());
        for (row, &i) in self.indices.iter().enumerate() {
            u[(row, i)] = 1.0;
        }
        u
    }
}

fn validate_indices(n: usize, indices: &[usize]) -> Result<()> {
    if indices.is_empty() {
        return Err(HgspError::InvalidArgument("no sampled indices".into()));
    }
    if let Some(&i) = indices.iter().find(|&&i| i >= n) {
        return Err(HgspError::InvalidArgument(format!(
            "sampled index {} out of range 1..={n}",
            i + 1
        )));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HgspError::InvalidArgument(
            "sampled indices must be distinct and ascending".into(),
        ));
    }
    Ok(())
}

fn selected_columns<S>(m: &nalgebra::Matrix<f64, nalgebra::Dyn, nalgebra::Dyn, S>, cols: &[usize]) -> DMatrix<f64>
where
    S: nalgebra::storage::Storage<f64, nalgebra::Dyn, nalgebra::Dyn>,
{
    DMatrix::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])])
}

/// Greedy max-volume selection: `K` nodes by column-pivoted Gram-Schmidt on
/// `F_[K]`, then the remaining `Q - K` by leverage (column norm of `F_[K]`).
fn select_nodes(fk: &DMatrix<f64>, q: usize) -> Vec<usize> {
    let (k, n) = fk.shape();
    let mut residual = fk.clone();
    let mut chosen = Vec::with_capacity(q);
    for _ in 0..k {
        let mut pivot = None;
        let mut best = 0.0;
        for j in (0..n).filter(|j| !chosen.contains(j)) {
            let norm = residual.column(j).norm();
            if norm > best {
                best = norm;
                pivot = Some(j);
            }
        }
        let Some(p) = pivot else { break };
        let dir = residual.column(p) / best;
        for j in 0..n {
            let c = dir.dot(&residual.column(j));
            let mut col = residual.column_mut(j);
            col.axpy(-c, &dir, 1.0);
        }
        chosen.push(p);
    }
    let mut rest: Vec<usize> = (0..n).filter(|j| !chosen.contains(j)).collect();
    rest.sort_by(|&a, &b| fk.column(b).norm().total_cmp(&fk.column(a).norm()));
    chosen.extend(rest.into_iter().take(q.saturating_sub(chosen.len())));
    chosen.sort_unstable();
    chosen
}

/// Singular values of `a` (`Q x K`, `Q >= K`) as the `K` largest
/// eigenvalues of `[[0, A], [A^T, 0]]`.
fn singular_values(a: &DMatrix<f64>) -> DVector<f64> {
    let (q, k) = a.shape();
    let mut aug = DMatrix::zeros(q + k, q + k);
    aug.view_mut((0, q), (q, k)).copy_from(a);
    aug.view_mut((q, 0), (k, q)).copy_from(&a.transpose());
    let mut ev: Vec<f64> = aug.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    DVector::from_iterator(k, ev.into_iter().take(k).map(|x| x.max(0.0)))
}

/// Builds a plan recovering `K`-bandlimited signals from `Q` samples.
pub fn build_plan(sp: &Spectrum, k: usize, q: usize) -> Result<SamplingPlan> {
    let n = sp.dim();
    if k == 0 || k > q || q > n {
        return Err(HgspError::InvalidArgument(format!(
            "need 1 <= K <= Q <= N, got K={k}, Q={q}, N={n}"
        )));
    }
    let fk = sp.basis().rows(0, k).into_owned();
    let indices = select_nodes(&fk, q);
    if indices.len() < q {
        return Err(HgspError::IllConditioned {
            cond: f64::INFINITY,
            limit: MAX_CONDITION,
        });
    }
    let ufk = selected_columns(&fk, &indices).transpose();
    let sv = singular_values(&ufk);
    let smin = sv.min();
    let cond = if smin > 0.0 { sv.max() / smin } else { f64::INFINITY };
    if cond > MAX_CONDITION {
        return Err(HgspError::IllConditioned {
            cond,
            limit: MAX_CONDITION,
        });
    }
    // full column rank, so the pseudo-inverse is R^-1 Q^T
    let qr = ufk.qr();
    let z = qr
        .r()
        .solve_upper_triangular(&qr.q().transpose())
        .ok_or_else(|| HgspError::Singular("sampled basis block is singular".into()))?;
    let t = fk.tr_mul(&z);
    Ok(SamplingPlan {
        indices,
        bandwidth: k,
        z,
        t,
        spectrum_id: sp.id(),
    })
}

/// `s_Q = U s`.
pub fn sample(plan: &SamplingPlan, s: &Signal) -> Result<DVector<f64>> {
    check_dim("signal", plan.dim(), s.len())?;
    Ok(DVector::from_iterator(
        plan.indices.len(),
        plan.indices.iter().map(|&i| s[i]),
    ))
}

/// `T s_Q`; exact for `K`-bandlimited sources.
pub fn interpolate(plan: &SamplingPlan, sq: &DVector<f64>) -> Result<Signal> {
    check_dim("sampled signal", plan.num_samples(), sq.len())?;
    Ok(&plan.t * sq)
}

/// Samples the hypergraph signal `s^[times]` by applying `U` along every mode.
pub fn sample_signal_power(
    plan: &SamplingPlan,
    s: &Signal,
    times: usize,
    cap: usize,
) -> Result<DenseTensor> {
    check_dim("signal", plan.dim(), s.len())?;
    let u = plan.selector();
    let mut out = outer_power(s, times, cap)?;
    for mode in 0..times {
        out = out.n_mode_product(mode, &u)?;
    }
    Ok(out)
}

fn check_square_plan(plan: &SamplingPlan, sp: &Spectrum) -> Result<()> {
    if plan.num_samples() != plan.bandwidth() {
        return Err(HgspError::InvalidArgument(format!(
            "sampled tensor needs Q = K, got Q={} K={}",
            plan.num_samples(),
            plan.bandwidth()
        )));
    }
    if plan.spectrum_id() != sp.id() {
        return Err(HgspError::SpectrumMismatch(format!(
            "plan was built for spectrum {}, got {}",
            plan.spectrum_id(),
            sp.id()
        )));
    }
    Ok(())
}

/// Symmetric `K`-node tensor `sum_i lambda_i z_i^{oM}` over the rows `z_i`
/// of `Z`. It acts on samples like `F` acts on the full signal when `Z` is
/// orthogonal; [`sampled_shift_tensor`] is exact for any invertible `Z`.
pub fn sampled_hypergraph(plan: &SamplingPlan, sp: &Spectrum) -> Result<SymTensor> {
    check_square_plan(plan, sp)?;
    let (k, m) = (plan.bandwidth(), sp.order());
    let mut out = SymTensor::new(m, k)?;
    for_each_sorted_tuple(m, k, |tuple| {
        let v: f64 = (0..k)
            .map(|i| sp.coeffs()[i] * tuple.iter().map(|&a| plan.z[(i, a)]).product::<f64>())
            .sum();
        if v != 0.0 {
            out.set(tuple, v)?;
        }
        Ok(())
    })?;
    Ok(out)
}

/// Dense `K^M` tensor `sum_i lambda_i (U f_i) o z_i o ... o z_i`. Contracting
/// its trailing modes with `U s` gives `U (F s^[M-1])` for every
/// `K`-bandlimited `s`.
pub fn sampled_shift_tensor(plan: &SamplingPlan, sp: &Spectrum, cap: usize) -> Result<DenseTensor> {
    check_square_plan(plan, sp)?;
    let (k, m) = (plan.bandwidth(), sp.order());
    let mut out = DenseTensor::zeros(vec![k; m], cap)?;
    let lead: Vec<DVector<f64>> = (0..k)
        .map(|i| sample(plan, &sp.basis_vector(i)))
        .collect::<Result<_>>()?;
    for flat in 0..out.data().len() {
        let idx = out.unravel(flat);
        let v: f64 = (0..k)
            .map(|i| {
                sp.coeffs()[i]
                    * lead[i][idx[0]]
                    * idx[1..].iter().map(|&a| plan.z[(i, a)]).product::<f64>()
            })
            .sum();
        out.set(&idx, v);
    }
    Ok(out)
}

/// Contracts every mode but the first of a dense tensor with `s`.
pub fn contract_trailing(t: &DenseTensor, s: &DVector<f64>) -> Result<DVector<f64>> {
    let row = DMatrix::from_row_slice(1, s.len(), s.as_slice());
    let mut out = t.clone();
    for mode in 1..t.order() {
        out = out.n_mode_product(mode, &row)?;
    }
    Ok(DVector::from_column_slice(out.data()))
}
