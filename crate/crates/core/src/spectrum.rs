//! Hypergraph Fourier space: orthogonal-CP decomposition of a representing
//! tensor, the forward/inverse transforms, total variation and the
//! supporting matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use crate::error::{check_dim, HgspError, Result};
use crate::symtensor::{
    for_each_sorted_tuple, hadamard_power, permutation_count, Signal, SymTensor,
};

/// Rows of a spectrum basis must be orthonormal to within this.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Default relative threshold used by [`bandwidth`].
pub const DEFAULT_BANDWIDTH_TOL: f64 = 1e-9;

/// Added to the convexifying shift of the power iteration.
const ADAPTIVE_SHIFT_MARGIN: f64 = 1e-6;

/// Dense reconstruction is used for the residual up to this many scalars.
const EXACT_RESIDUAL_CAP: usize = 2_000_000;

/// Orthonormal basis `f_1..f_N` (rows of `basis`) with coefficients sorted
/// non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    basis: DMatrix<f64>,
    coeffs: DVector<f64>,
    extracted: Vec<bool>,
    order: usize,
    residual: f64,
    eigen_residuals: Vec<Option<f64>>,
}

fn orthonormality_error(basis: &DMatrix<f64>) -> f64 {
    let n = basis.nrows();
    (basis * basis.transpose() - DMatrix::identity(n, n)).amax()
}

impl Spectrum {
    /// Assembles a spectrum from known parts. Rows are re-sorted by
    /// coefficient (stable), and the basis must be orthonormal.
    ///
    /// Every row counts as extracted; use [`Spectrum::with_extracted`] to
    /// mark completion rows.
    pub fn from_parts(
        order: usize,
        basis: DMatrix<f64>,
        coeffs: DVector<f64>,
        residual: f64,
    ) -> Result<Self> {
        let n = basis.nrows();
        let extracted = vec![true; n];
        Self::with_extracted(order, basis, coeffs, extracted, residual)
    }

    /// Like [`Spectrum::from_parts`] with an explicit mask of which rows came
    /// out of a decomposition (the rest are completion rows with zero
    /// coefficient).
    pub fn with_extracted(
        order: usize,
        basis: DMatrix<f64>,
        coeffs: DVector<f64>,
        extracted: Vec<bool>,
        residual: f64,
    ) -> Result<Self> {
        let n = basis.nrows();
        if order < 2 {
            return Err(HgspError::InvalidArgument(format!(
                "spectrum order must be at least 2, got {order}"
            )));
        }
        check_dim("basis columns", n, basis.ncols())?;
        check_dim("coefficient vector", n, coeffs.len())?;
        check_dim("extracted mask", n, extracted.len())?;
        if coeffs.iter().chain(basis.iter()).any(|x| !x.is_finite()) {
            return Err(HgspError::InvalidArgument(
                "spectrum contains non-finite values".into(),
            ));
        }
        let err = orthonormality_error(&basis);
        if err > ORTHONORMAL_TOL * (n as f64).max(1.0) {
            return Err(HgspError::InvalidArgument(format!(
                "basis rows are not orthonormal (max deviation {err:e})"
            )));
        }
        if let Some(i) = (0..n).find(|&i| !extracted[i] && coeffs[i] != 0.0) {
            return Err(HgspError::InvalidArgument(format!(
                "completion row {} has non-zero coefficient",
                i + 1
            )));
        }
        let mut sp = Spectrum {
            basis,
            coeffs,
            extracted,
            order,
            residual,
            eigen_residuals: vec![None; n],
        };
        sp.sort();
        Ok(sp)
    }

    // Stable sort by coefficient, extracted rows ahead of completion rows on ties.
    fn sort(&mut self) {
        let n = self.dim();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| {
            self.coeffs[b]
                .total_cmp(&self.coeffs[a])
                .then(self.extracted[b].cmp(&self.extracted[a]))
        });
        let basis = DMatrix::from_fn(n, n, |i, j| self.basis[(idx[i], j)]);
        let coeffs = DVector::from_fn(n, |i, _| self.coeffs[idx[i]]);
        self.extracted = idx.iter().map(|&i| self.extracted[i]).collect();
        self.eigen_residuals = idx.iter().map(|&i| self.eigen_residuals[i]).collect();
        self.basis = basis;
        self.coeffs = coeffs;
    }

    /// Attaches per-row E-eigenpair residuals (`None` where unknown).
    pub fn with_eigen_residuals(mut self, residuals: Vec<Option<f64>>) -> Result<Self> {
        check_dim("eigen residual list", self.dim(), residuals.len())?;
        self.eigen_residuals = residuals;
        Ok(self)
    }

    pub fn eigen_residuals(&self) -> &[Option<f64>] {
        &self.eigen_residuals
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Order `M` of the tensor the spectrum represents.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of rows produced by the decomposition (the rest are completion).
    pub fn rank(&self) -> usize {
        self.extracted.iter().filter(|&&e| e).count()
    }

    pub fn is_extracted(&self, r: usize) -> bool {
        self.extracted[r]
    }

    pub fn extracted_mask(&self) -> &[bool] {
        &self.extracted
    }

    /// `V`, whose rows are the basis vectors.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    /// `f_r` as a column vector (0-based `r`).
    pub fn basis_vector(&self, r: usize) -> Signal {
        self.basis.row(r).transpose()
    }

    /// Largest coefficient `lambda_1`.
    pub fn lambda_max(&self) -> f64 {
        self.coeffs[0]
    }

    /// Frobenius norm of `t - sum_r lambda_r f_r^{oM}` recorded at decomposition.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `||t f_r^[M-1] - lambda_r f_r||` for rows produced by a decomposition.
    pub fn eigen_residual(&self, r: usize) -> Option<f64> {
        self.eigen_residuals[r]
    }

    /// Short content hash used to tie plans and compressed signals to the
    /// spectrum they were built with.
    pub fn id(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.order as u64).to_le_bytes());
        h.update((self.dim() as u64).to_le_bytes());
        for x in self.coeffs.iter() {
            h.update(x.to_bits().to_le_bytes());
        }
        for i in 0..self.dim() {
            for x in self.basis.row(i).iter() {
                h.update(x.to_bits().to_le_bytes());
            }
        }
        hex::encode(&h.finalize()[..8])
    }

    /// `sum_r lambda_r f_r^{oM}` as a sparse symmetric tensor. Enumerates all
    /// `C(N+M-1, M)` canonical tuples.
    pub fn reassemble(&self) -> SymTensor {
        let (n, m) = (self.dim(), self.order);
        let mut t = SymTensor::new(m, n).expect("valid spectrum shape");
        for_each_sorted_tuple(m, n, |tuple| {
            let v = self.reassembled_entry(tuple);
            if v != 0.0 {
                t.set(tuple, v)?;
            }
            Ok(())
        })
        .expect("indices in range");
        t
    }

    fn reassembled_entry(&self, tuple: &[usize]) -> f64 {
        (0..self.dim())
            .filter(|&r| self.coeffs[r] != 0.0)
            .map(|r| self.coeffs[r] * tuple.iter().map(|&i| self.basis[(r, i)]).product::<f64>())
            .sum()
    }
}

/// Settings for [`decompose`].
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposeOptions {
    /// Convergence threshold on successive iterates, and the coefficient
    /// magnitude below which extraction stops.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Random starts per component.
    pub restarts: usize,
    /// Fixed shift for the power iteration; `None` recomputes at every step
    /// the smallest shift that keeps the iteration locally monotone.
    pub shift: Option<f64>,
    /// When set, only candidates that are E-eigenpairs of the input within
    /// this residual are accepted, and extraction stops at the first
    /// component without one.
    pub eigen_tol: Option<f64>,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 2000,
            seed: 0,
            restarts: 20,
            shift: None,
            eigen_tol: None,
        }
    }
}

struct Candidate {
    vector: DVector<f64>,
    lambda: f64,
    eigen_residual: f64,
}

/// Orthogonal-CP decomposition `t ≈ sum_r lambda_r f_r^{oM}`.
///
/// Order 2 is a dense symmetric eigendecomposition. Higher orders extract one
/// component at a time: each is the best (largest `|lambda|`) of several
/// shifted symmetric power iterations confined to the orthogonal complement
/// of the components already accepted. Rows not reached by the decomposition
/// are filled by [`complete_basis`].
///
/// For odd `M` a negative coefficient is absorbed into the vector's sign so
/// every coefficient is non-negative; for even `M` signs are kept.
pub fn decompose(t: &SymTensor, opts: &DecomposeOptions) -> Result<Spectrum> {
    if opts.restarts == 0 || opts.max_iter == 0 {
        return Err(HgspError::InvalidArgument(
            "restarts and max_iter must be positive".into(),
        ));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(HgspError::InvalidArgument(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    if t.order() == 2 {
        return decompose_matrix(t);
    }
    let n = t.dim();
    let m = t.order();
    let signs: &[f64] = if m % 2 == 1 { &[1.0] } else { &[1.0, -1.0] };

    let mut vectors: Vec<DVector<f64>> = Vec::new();
    let mut lambdas: Vec<f64> = Vec::new();
    let mut eig_res: Vec<f64> = Vec::new();

    while vectors.len() < n {
        let component = vectors.len();
        let q = complement_basis(n, &vectors);
        let mut best: Option<Candidate> = None;
        let mut converged_any = false;
        for k in 0..opts.restarts {
            let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(opts.seed, component, k));
            for &sign in signs {
                let start = random_unit(q.ncols(), &mut rng);
                let Some(x) = power_iterate(t, &q, start, sign, opts) else {
                    continue;
                };
                converged_any = true;
                let g = t.contract_vector(&x).expect("dimension checked");
                let lambda = x.dot(&g);
                let eigen_residual = (g - &x * lambda).norm();
                if opts.eigen_tol.is_some_and(|tol| eigen_residual > tol) {
                    continue;
                }
                if best.as_ref().is_none_or(|b| lambda.abs() > b.lambda.abs()) {
                    best = Some(Candidate {
                        vector: x,
                        lambda,
                        eigen_residual,
                    });
                }
            }
        }
        if !converged_any {
            let partial = assemble(t, &vectors, &lambdas, &eig_res);
            return Err(HgspError::NotConverged {
                component: component + 1,
                restarts: opts.restarts,
                partial: Box::new(partial),
            });
        }
        let Some(c) = best else { break };
        if c.lambda.abs() < opts.tol {
            break;
        }
        vectors.push(c.vector);
        lambdas.push(c.lambda);
        eig_res.push(c.eigen_residual);
    }
    Ok(assemble(t, &vectors, &lambdas, &eig_res))
}

fn restart_seed(seed: u64, component: usize, restart: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((component as u64) << 32 | restart as u64)
}

fn project_out(x: &mut DVector<f64>, vectors: &[DVector<f64>]) {
    // two passes keep the result orthogonal to working precision
    for _ in 0..2 {
        for f in vectors {
            let c = f.dot(x);
            x.axpy(-c, f, 1.0);
        }
    }
}

/// Appends `count` orthonormal vectors to `span` by pivoted Gram-Schmidt
/// over the standard basis (largest remaining norm first, lowest index on ties).
fn extend_span(n: usize, span: &mut Vec<DVector<f64>>, count: usize) {
    for _ in 0..count {
        let mut best: Option<DVector<f64>> = None;
        let mut best_norm = 0.0;
        for i in 0..n {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            project_out(&mut e, span);
            let norm = e.norm();
            if norm > best_norm + 1e-12 {
                best_norm = norm;
                best = Some(e);
            }
        }
        let x = best.expect("complement is non-empty while vectors remain") / best_norm;
        span.push(x);
    }
}

/// Orthonormal basis of the complement of `vectors`, as columns.
fn complement_basis(n: usize, vectors: &[DVector<f64>]) -> DMatrix<f64> {
    let mut span = vectors.to_vec();
    extend_span(n, &mut span, n - vectors.len());
    DMatrix::from_columns(&span[vectors.len()..])
}

fn random_unit(d: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let y = DVector::from_fn(d, |_, _| StandardNormal.sample(rng));
        let norm: f64 = y.norm();
        if norm > 1e-8 {
            return y / norm;
        }
    }
}

/// Smallest shift keeping the objective locally convex on the subspace:
/// `max(0, margin - lambda_min(sign (M-1) Q^T (t x^[M-2]) Q))`.
fn adaptive_shift(t: &SymTensor, q: &DMatrix<f64>, x: &DVector<f64>, sign: f64) -> f64 {
    let scale = sign * (t.order() - 1) as f64;
    let h = q.tr_mul(&(t.contract_matrix(x).expect("dimension checked") * q)) * scale;
    let h = (&h + h.transpose()) * 0.5;
    let lmin = SymmetricEigen::new(h).eigenvalues.min();
    (ADAPTIVE_SHIFT_MARGIN - lmin).max(0.0)
}

/// Shifted symmetric higher-order power iteration in the coordinates `y` of
/// the subspace spanned by the columns of `q`. `sign = -1` targets the most
/// negative coefficient. Returns the converged unit vector `q y`.
fn power_iterate(
    t: &SymTensor,
    q: &DMatrix<f64>,
    mut y: DVector<f64>,
    sign: f64,
    opts: &DecomposeOptions,
) -> Option<DVector<f64>> {
    for _ in 0..opts.max_iter {
        let x = q * &y;
        let g = q.tr_mul(&t.contract_vector(&x).expect("dimension checked")) * sign;
        if g.norm() < opts.tol {
            // the tensor is negligible on this subspace: |lambda| < tol anywhere
            return Some(x);
        }
        let alpha = opts.shift.unwrap_or_else(|| adaptive_shift(t, q, &x, sign));
        let mut next = g + &y * alpha;
        let norm = next.norm();
        if !norm.is_finite() || norm <= 0.0 {
            return None;
        }
        next /= norm;
        let step = (&next - &y).norm();
        y = next;
        if step < opts.tol {
            return Some(q * y);
        }
    }
    None
}

fn canonical_sign(f: &mut DVector<f64>) {
    let mut pivot = 0;
    for i in 1..f.len() {
        if f[i].abs() > f[pivot].abs() + 1e-12 {
            pivot = i;
        }
    }
    if f[pivot] < 0.0 {
        f.neg_mut();
    }
}

// Sign convention, completion, sorting and residual bookkeeping.
fn assemble(t: &SymTensor, vectors: &[DVector<f64>], lambdas: &[f64], eig_res: &[f64]) -> Spectrum {
    let n = t.dim();
    let m = t.order();
    let r = vectors.len();
    let mut basis = DMatrix::zeros(n, n);
    let mut coeffs = DVector::zeros(n);
    for (i, (f, &l)) in vectors.iter().zip(lambdas).enumerate() {
        let mut f = f.clone();
        let mut l = l;
        if m % 2 == 1 && l < 0.0 {
            f.neg_mut();
            l = -l;
        } else if m.is_multiple_of(2) {
            canonical_sign(&mut f);
        }
        basis.set_row(i, &f.transpose());
        coeffs[i] = l;
    }
    let mut extracted = vec![false; n];
    extracted[..r].fill(true);
    let completed = fill_rows(&basis, &extracted, None);
    let mut sp = Spectrum {
        basis: completed,
        coeffs,
        extracted,
        order: m,
        residual: 0.0,
        eigen_residuals: (0..n)
            .map(|i| eig_res.get(i).copied())
            .collect(),
    };
    sp.sort();
    sp.residual = frobenius_residual(t, &sp);
    sp
}

fn decompose_matrix(t: &SymTensor) -> Result<Spectrum> {
    let n = t.dim();
    let mut a = DMatrix::zeros(n, n);
    for (tuple, v) in t.entries() {
        a[(tuple[0], tuple[1])] = v;
        a[(tuple[1], tuple[0])] = v;
    }
    let eig = SymmetricEigen::new(a.clone());
    let mut basis = DMatrix::zeros(n, n);
    let mut eig_res = Vec::with_capacity(n);
    for i in 0..n {
        let mut f = eig.eigenvectors.column(i).into_owned();
        canonical_sign(&mut f);
        eig_res.push((&a * &f - &f * eig.eigenvalues[i]).norm());
        basis.set_row(i, &f.transpose());
    }
    let mut sp = Spectrum {
        basis,
        coeffs: eig.eigenvalues.clone(),
        extracted: vec![true; n],
        order: 2,
        residual: 0.0,
        eigen_residuals: eig_res.into_iter().map(Some).collect(),
    };
    sp.sort();
    sp.residual = frobenius_residual(t, &sp);
    Ok(sp)
}

fn frobenius_residual(t: &SymTensor, sp: &Spectrum) -> f64 {
    let (n, m) = (t.dim(), t.order());
    let logical = (n as f64).powi(m as i32);
    if logical <= EXACT_RESIDUAL_CAP as f64 {
        let mut sum = 0.0;
        for_each_sorted_tuple(m, n, |tuple| {
            let d = t.get(tuple) - sp.reassembled_entry(tuple);
            sum += d * d * permutation_count(tuple);
            Ok(())
        })
        .expect("indices in range");
        return sum.sqrt();
    }
    // ||t||^2 - 2 sum lambda_r <t, f_r^M> + sum lambda_r^2 for orthonormal f_r
    let mut sq = t.frobenius_norm_sq();
    for r in 0..n {
        let l = sp.coeffs[r];
        if l == 0.0 {
            continue;
        }
        let f = sp.basis_vector(r);
        let proj = f.dot(&t.contract_vector(&f).expect("same dimension"));
        sq += l * l - 2.0 * l * proj;
    }
    sq.max(0.0).sqrt()
}

/// Recomputes the rows of `basis` not flagged in `keep` as an orthonormal
/// completion of the kept rows. With a hint, its component outside the kept
/// span becomes the first completion row.
fn fill_rows(basis: &DMatrix<f64>, keep: &[bool], hint: Option<&Signal>) -> DMatrix<f64> {
    let n = basis.nrows();
    let mut out = basis.clone();
    let mut span: Vec<DVector<f64>> = (0..n)
        .filter(|&i| keep[i])
        .map(|i| basis.row(i).transpose())
        .collect();
    let mut slots = (0..n).filter(|&i| !keep[i]);

    if let Some(h) = hint {
        let mut x = h.clone();
        project_out(&mut x, &span);
        let scale = h.norm();
        if scale > 0.0 && x.norm() > 1e-12 * scale {
            if let Some(slot) = slots.next() {
                x /= x.norm();
                out.set_row(slot, &x.transpose());
                span.push(x);
            }
        }
    }
    let slots: Vec<usize> = slots.collect();
    let before = span.len();
    extend_span(n, &mut span, slots.len());
    for (&slot, x) in slots.iter().zip(&span[before..]) {
        out.set_row(slot, &x.transpose());
    }
    out
}

/// Fills every completion row (coefficient 0) with an orthonormal completion
/// of the extracted rows. When `hint` is given the completion is rotated so
/// the hint's out-of-span part lies along a single completion vector; every
/// other completion vector is then orthogonal to the hint.
pub fn complete_basis(partial: &Spectrum, hint: Option<&Signal>) -> Result<Spectrum> {
    if let Some(h) = hint {
        check_dim("basis completion hint", partial.dim(), h.len())?;
    }
    if partial.rank() == partial.dim() {
        return Ok(partial.clone());
    }
    let mut sp = partial.clone();
    sp.basis = fill_rows(&partial.basis, &partial.extracted, hint);
    Ok(sp)
}

/// `s~ = V s`.
pub fn original_to_freq(sp: &Spectrum, s: &Signal) -> Result<DVector<f64>> {
    check_dim("signal", sp.dim(), s.len())?;
    Ok(&sp.basis * s)
}

/// `s = V^T s~`.
pub fn freq_to_original(sp: &Spectrum, st: &DVector<f64>) -> Result<Signal> {
    check_dim("spectral coefficients", sp.dim(), st.len())?;
    Ok(sp.basis.tr_mul(st))
}

/// Hypergraph Fourier transform `s^_i = (f_i^T s)^(M-1)`.
pub fn hgft(sp: &Spectrum, s: &Signal) -> Result<DVector<f64>> {
    Ok(hadamard_power(&original_to_freq(sp, s)?, sp.order - 1))
}

/// Inverse transform: takes the real `(M-1)`-th root of each coefficient
/// (the non-negative root when `M-1` is even) and maps back with `V^T`.
pub fn ihgft(sp: &Spectrum, shat: &DVector<f64>) -> Result<Signal> {
    check_dim("transform coefficients", sp.dim(), shat.len())?;
    let p = sp.order - 1;
    if p.is_multiple_of(2) {
        if let Some(i) = shat.iter().position(|&x| x < 0.0) {
            return Err(HgspError::InvalidArgument(format!(
                "coefficient {} is negative but M-1 = {p} is even",
                i + 1
            )));
        }
    }
    let root = 1.0 / p as f64;
    let st = shat.map(|x| x.signum() * x.abs().powf(root) * (x != 0.0) as u8 as f64);
    freq_to_original(sp, &st)
}

/// `||s - t s^[M-1] / lambda_max||_1`.
pub fn total_variation_signal(t: &SymTensor, lambda_max: f64, s: &Signal) -> Result<f64> {
    if lambda_max.is_nan() || lambda_max <= 0.0 {
        return Err(HgspError::DegenerateSpectrum(format!(
            "total variation needs lambda_max > 0, got {lambda_max}"
        )));
    }
    let shifted = t.contract_vector(s)?;
    Ok((s - shifted / lambda_max).lp_norm(1))
}

/// `|1 - lambda_r / lambda_1|` (0-based `r`).
pub fn total_variation_component(sp: &Spectrum, r: usize) -> Result<f64> {
    if r >= sp.dim() {
        return Err(HgspError::InvalidArgument(format!(
            "component {} out of range 1..={}",
            r + 1,
            sp.dim()
        )));
    }
    let l1 = sp.lambda_max();
    if l1.is_nan() || l1 <= 0.0 {
        return Err(HgspError::DegenerateSpectrum(format!(
            "lambda_1 must be positive, got {l1}"
        )));
    }
    Ok((1.0 - sp.coeffs[r] / l1).abs())
}

/// `P = V^T diag(lambda) V`, divided by `lambda_1` when `normalized`.
pub fn supporting_matrix(sp: &Spectrum, normalized: bool) -> Result<DMatrix<f64>> {
    let mut scaled = sp.basis.clone();
    for (mut row, &l) in scaled.row_iter_mut().zip(sp.coeffs.iter()) {
        row *= l;
    }
    let mut p = sp.basis.tr_mul(&scaled);
    if normalized {
        let l1 = sp.lambda_max();
        if l1.is_nan() || l1 <= 0.0 {
            return Err(HgspError::DegenerateSpectrum(format!(
                "normalized supporting matrix needs lambda_1 > 0, got {l1}"
            )));
        }
        p /= l1;
    }
    // symmetrize away rounding
    let pt = p.transpose();
    Ok((p + pt) * 0.5)
}

/// Smallest `K` such that `s~_i` is negligible (relative to `||s~||_inf`)
/// for every `i > K`. Zero for the zero signal.
pub fn bandwidth(sp: &Spectrum, s: &Signal, tol: f64) -> Result<usize> {
    if tol.is_nan() || tol < 0.0 {
        return Err(HgspError::InvalidArgument(format!(
            "bandwidth tolerance must be non-negative, got {tol}"
        )));
    }
    let st = original_to_freq(sp, s)?;
    let peak = st.amax();
    if peak == 0.0 {
        return Ok(0);
    }
    Ok(st
        .iter()
        .rposition(|x| x.abs() > tol * peak)
        .map_or(0, |i| i + 1))
}

/// Boundary coefficient `W = lambda_K` of a `K`-bandlimited space (1-based `K`).
pub fn bandlimit_boundary(sp: &Spectrum, k: usize) -> Result<f64> {
    if k == 0 || k > sp.dim() {
        return Err(HgspError::InvalidArgument(format!(
            "bandwidth {k} out of range 1..={}",
            sp.dim()
        )));
    }
    Ok(sp.coeffs[k - 1])
}
