//! Super-symmetric sparse tensors and the handful of dense tensor primitives
//! the rest of the crate needs.
//!
//! A [`SymTensor`] stores one value per *canonical* index tuple, i.e. a
//! non-decreasing sequence of node indices. Every permutation of a stored
//! tuple reads back the same value, so super-symmetry holds by construction.
//! Indices are 0-based in the API; file formats and diagnostics shift to
//! 1-based.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, HgspError, Result};

/// A node signal: one real value per node.
pub type Signal = DVector<f64>;

/// Default ceiling on the number of scalars a dense tensor may hold.
pub const DEFAULT_DENSE_CAP: usize = 10_000_000;

/// `n!` as a float. Exact for every order this crate works with.
pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Groups a sorted tuple into `(index, multiplicity)` runs.
pub(crate) fn runs(tuple: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::with_capacity(tuple.len());
    for &i in tuple {
        match out.last_mut() {
            Some((j, m)) if *j == i => *m += 1,
            _ => out.push((i, 1)),
        }
    }
    out
}

/// Number of distinct orderings of the multiset held in a sorted tuple.
pub fn permutation_count(tuple: &[usize]) -> f64 {
    let denom: f64 = runs(tuple).iter().map(|&(_, m)| factorial(m)).product();
    factorial(tuple.len()) / denom
}

/// Order-M, dimension-N super-symmetric tensor in canonical sparse storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor {
    order: usize,
    dim: usize,
    entries: BTreeMap<Vec<usize>, f64>,
}

impl SymTensor {
    /// An empty (all-zero) tensor.
    pub fn new(order: usize, dim: usize) -> Result<Self> {
        if order < 2 {
            return Err(HgspError::InvalidArgument(format!(
                "tensor order must be at least 2, got {order}"
            )));
        }
        if dim == 0 {
            return Err(HgspError::InvalidArgument(
                "tensor dimension must be at least 1".into(),
            ));
        }
        Ok(Self {
            order,
            dim,
            entries: BTreeMap::new(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored canonical tuples.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Canonical tuples and their values in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.entries.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    fn canonical(&self, index: &[usize]) -> Result<Vec<usize>> {
        check_dim("index tuple length", self.order, index.len())?;
        if let Some(&bad) = index.iter().find(|&&i| i >= self.dim) {
            return Err(HgspError::InvalidArgument(format!(
                "index {} out of range 1..={}",
                bad + 1,
                self.dim
            )));
        }
        let mut key = index.to_vec();
        key.sort_unstable();
        Ok(key)
    }

    /// Sets the value shared by every permutation of `index`. Writing zero
    /// removes the entry.
    pub fn set(&mut self, index: &[usize], value: f64) -> Result<()> {
        let key = self.canonical(index)?;
        if value == 0.0 {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
        Ok(())
    }

    /// Adds `value` to the entry at `index` (and all its permutations).
    pub fn add(&mut self, index: &[usize], value: f64) -> Result<()> {
        let key = self.canonical(index)?;
        let v = self.entries.get(&key).copied().unwrap_or(0.0) + value;
        if v == 0.0 {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, v);
        }
        Ok(())
    }

    /// Logical entry at any (not necessarily sorted) index tuple.
    pub fn get(&self, index: &[usize]) -> f64 {
        if index.len() != self.order || index.iter().any(|&i| i >= self.dim) {
            return 0.0;
        }
        let mut key = index.to_vec();
        key.sort_unstable();
        self.entries.get(&key).copied().unwrap_or(0.0)
    }

    /// Squared Frobenius norm over all `N^M` logical entries.
    pub fn frobenius_norm_sq(&self) -> f64 {
        self.entries()
            .map(|(k, v)| v * v * permutation_count(k))
            .sum()
    }

    /// `s_(1)_i = sum over j_1..j_{M-1} of t[i, j_1, .., j_{M-1}] * s_{j_1} * .. * s_{j_{M-1}}`.
    ///
    /// Each canonical tuple is visited once; for every distinct index `i` it
    /// holds, the number of orderings of the remaining `M-1` indices weights
    /// the product of their signal values. `s^[M-1]` is never formed.
    pub fn contract_vector(&self, s: &Signal) -> Result<Signal> {
        if s.len() != self.dim {
            return Err(HgspError::DimensionMismatch {
                what: "signal (tensor dimension)",
                expected: self.dim,
                got: s.len(),
            });
        }
        let mut out = DVector::zeros(self.dim);
        for (tuple, value) in self.entries() {
            let groups = runs(tuple);
            for (g, mult) in first_slot_multiplicities(&groups).into_iter().enumerate() {
                let mut prod = 1.0;
                for (h, &(j, mj)) in groups.iter().enumerate() {
                    let e = if h == g { mj - 1 } else { mj };
                    if e > 0 {
                        prod *= s[j].powi(e as i32);
                    }
                }
                out[groups[g].0] += value * mult * prod;
            }
        }
        Ok(out)
    }

    /// `t x^[M-2]`: the symmetric matrix left after contracting all but two modes.
    pub fn contract_matrix(&self, x: &Signal) -> Result<DMatrix<f64>> {
        if x.len() != self.dim {
            return Err(HgspError::DimensionMismatch {
                what: "signal (tensor dimension)",
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (tuple, value) in self.entries() {
            for_each_permutation(tuple, |perm| {
                let prod: f64 = perm[2..].iter().map(|&k| x[k]).product();
                out[(perm[0], perm[1])] += value * prod;
            });
        }
        Ok(out)
    }

    /// Dense copy of the full `N^M` tensor, refused beyond `cap` scalars.
    pub fn to_dense(&self, cap: usize) -> Result<DenseTensor> {
        let mut dense = DenseTensor::zeros(vec![self.dim; self.order], cap)?;
        for (tuple, value) in self.entries() {
            for_each_permutation(tuple, |perm| dense.set(perm, value));
        }
        Ok(dense)
    }

    /// Converts a dense tensor with equal side lengths, checking that every
    /// permutation of each index agrees within `tol`.
    pub fn from_dense(dense: &DenseTensor, tol: f64) -> Result<Self> {
        let order = dense.order();
        let dim = dense.shape().first().copied().unwrap_or(0);
        if dense.shape().iter().any(|&d| d != dim) {
            return Err(HgspError::InvalidArgument(format!(
                "tensor shape {:?} is not cubical",
                dense.shape()
            )));
        }
        let mut out = SymTensor::new(order, dim)?;
        for_each_sorted_tuple(order, dim, |tuple| {
            let base = dense.get(tuple);
            let mut mismatch = None;
            for_each_permutation(tuple, |perm| {
                if mismatch.is_none() && (dense.get(perm) - base).abs() > tol {
                    mismatch = Some(perm.to_vec());
                }
            });
            if let Some(b) = mismatch {
                return Err(HgspError::NotSymmetric {
                    a: tuple.iter().map(|i| i + 1).collect(),
                    b: b.iter().map(|i| i + 1).collect(),
                });
            }
            if base != 0.0 {
                out.entries.insert(tuple.to_vec(), base);
            }
            Ok(())
        })?;
        Ok(out)
    }
}

/// For each run `(i, m)` of a sorted tuple, the number of its distinct
/// orderings that start with `i`.
pub(crate) fn first_slot_multiplicities(groups: &[(usize, usize)]) -> Vec<f64> {
    let tail = groups.iter().map(|&(_, m)| m).sum::<usize>() - 1;
    let denom: f64 = groups.iter().map(|&(_, m)| factorial(m)).product();
    groups
        .iter()
        .map(|&(_, m)| factorial(tail) * m as f64 / denom)
        .collect()
}

/// Calls `f` on every non-decreasing tuple of length `order` over `0..dim`.
pub(crate) fn for_each_sorted_tuple<F>(order: usize, dim: usize, mut f: F) -> Result<()>
where
    F: FnMut(&[usize]) -> Result<()>,
{
    let mut tuple = vec![0usize; order];
    loop {
        f(&tuple)?;
        // advance to the next non-decreasing tuple
        let mut pos = order;
        while pos > 0 && tuple[pos - 1] == dim - 1 {
            pos -= 1;
        }
        if pos == 0 {
            return Ok(());
        }
        let next = tuple[pos - 1] + 1;
        for slot in &mut tuple[pos - 1..] {
            *slot = next;
        }
    }
}

/// Calls `f` once for every distinct permutation of a sorted tuple.
pub(crate) fn for_each_permutation<F: FnMut(&[usize])>(sorted: &[usize], mut f: F) {
    let mut perm = sorted.to_vec();
    loop {
        f(&perm);
        // next lexicographic permutation
        let Some(i) = (1..perm.len()).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return;
        };
        let j = (i..perm.len()).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

/// Row-major dense tensor of arbitrary shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

fn checked_size(shape: &[usize], cap: usize) -> Result<usize> {
    let requested = shape
        .iter()
        .try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
        .unwrap_or(u128::MAX);
    if requested > cap as u128 {
        return Err(HgspError::SizeCapExceeded { requested, cap });
    }
    Ok(requested as usize)
}

impl DenseTensor {
    pub fn zeros(shape: Vec<usize>, cap: usize) -> Result<Self> {
        let len = checked_size(&shape, cap)?;
        Ok(Self {
            shape,
            data: vec![0.0; len],
        })
    }

    /// Wraps existing row-major data.
    pub fn from_vec(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let len = checked_size(&shape, usize::MAX)?;
        check_dim("dense tensor data", len, data.len())?;
        Ok(Self { shape, data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.shape.len());
        index
            .iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.data[self.offset(index)]
    }

    pub fn set(&mut self, index: &[usize], value: f64) {
        let o = self.offset(index);
        self.data[o] = value;
    }

    /// Multi-index of the scalar stored at a flat offset.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut index = vec![0; self.shape.len()];
        for (slot, &d) in index.iter_mut().zip(&self.shape).rev() {
            *slot = flat % d;
            flat /= d;
        }
        index
    }

    /// Mode-`mode` product with a `Q x I_mode` matrix (0-based mode):
    /// `out[.., j, ..] = sum_k self[.., k, ..] * u[j, k]`.
    pub fn n_mode_product(&self, mode: usize, u: &DMatrix<f64>) -> Result<DenseTensor> {
        if mode >= self.order() {
            return Err(HgspError::InvalidArgument(format!(
                "mode {} out of range 1..={}",
                mode + 1,
                self.order()
            )));
        }
        check_dim("n-mode matrix columns", self.shape[mode], u.ncols())?;
        let outer: usize = self.shape[..mode].iter().product();
        let inner: usize = self.shape[mode + 1..].iter().product();
        let width = self.shape[mode];
        let q = u.nrows();
        let mut shape = self.shape.clone();
        shape[mode] = q;
        let mut data = vec![0.0; outer * q * inner];
        for o in 0..outer {
            for j in 0..q {
                let dst = &mut data[(o * q + j) * inner..(o * q + j + 1) * inner];
                for k in 0..width {
                    let w = u[(j, k)];
                    if w == 0.0 {
                        continue;
                    }
                    let src = &self.data[(o * width + k) * inner..(o * width + k + 1) * inner];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += w * s;
                    }
                }
            }
        }
        Ok(DenseTensor { shape, data })
    }
}

/// `s ∘ s ∘ .. ∘ s` (`times` factors) as a dense tensor. Meant for oracles
/// and small sampling checks only; guarded by `cap`.
pub fn outer_power(s: &Signal, times: usize, cap: usize) -> Result<DenseTensor> {
    if times == 0 {
        return Err(HgspError::InvalidArgument(
            "outer power needs at least one factor".into(),
        ));
    }
    let n = s.len();
    let mut t = DenseTensor::zeros(vec![n; times], cap)?;
    for flat in 0..t.data.len() {
        let idx = t.unravel(flat);
        t.data[flat] = idx.iter().map(|&i| s[i]).product();
    }
    Ok(t)
}

/// Elementwise `v_i^times`.
pub fn hadamard_power(v: &DVector<f64>, times: usize) -> DVector<f64> {
    v.map(|x| x.powi(times as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig7a() -> SymTensor {
        let mut t = SymTensor::new(3, 7).unwrap();
        for e in [[0, 3, 5], [1, 2, 6], [4, 5, 6]] {
            t.set(&e, 0.5).unwrap();
        }
        t
    }

    // Full N^M enumeration: out_i = sum_{j,k} t[i,j,k] s_j s_k.
    fn dense_contract(t: &SymTensor, s: &Signal) -> Signal {
        let dense = t.to_dense(DEFAULT_DENSE_CAP).unwrap();
        let mut out = DVector::zeros(t.dim());
        for flat in 0..dense.data().len() {
            let idx = dense.unravel(flat);
            let tail: f64 = idx[1..].iter().map(|&j| s[j]).product();
            out[idx[0]] += dense.data()[flat] * tail;
        }
        out
    }

    #[test]
    fn fig7a_component_seven() {
        let t = fig7a();
        let s = DVector::from_iterator(7, (1..=7).map(f64::from));
        let out = t.contract_vector(&s).unwrap();
        assert_eq!(out[6], 36.0);
        assert_eq!(out, dense_contract(&t, &s));
    }

    #[test]
    fn empty_tensor_contracts_to_zero() {
        let t = SymTensor::new(4, 5).unwrap();
        let s = DVector::from_element(5, 3.0);
        assert_eq!(t.contract_vector(&s).unwrap(), DVector::zeros(5));
    }

    #[test]
    fn second_order_is_matrix_vector_product() {
        let mut t = SymTensor::new(2, 3).unwrap();
        t.set(&[0, 1], 2.0).unwrap();
        t.set(&[1, 1], -1.0).unwrap();
        t.set(&[2, 0], 0.5).unwrap();
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 2.0, 0.5, 2.0, -1.0, 0.0, 0.5, 0.0, 0.0]);
        let s = DVector::from_vec(vec![1.0, -2.0, 3.0]);
        let out = t.contract_vector(&s).unwrap();
        assert!((out - a * s).norm() < 1e-14);
    }

    #[test]
    fn contract_rejects_wrong_length() {
        let err = fig7a().contract_vector(&DVector::zeros(6)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('7') && msg.contains('6'), "{msg}");
    }

    #[test]
    fn lookup_is_permutation_invariant() {
        let mut t = SymTensor::new(3, 4).unwrap();
        t.set(&[3, 0, 2], 1.25).unwrap();
        for_each_permutation(&[0, 2, 3], |p| assert_eq!(t.get(p), 1.25));
        assert_eq!(t.nnz(), 1);
        t.set(&[2, 3, 0], 0.0).unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn permutation_enumeration_counts() {
        let mut n = 0;
        for_each_permutation(&[1, 1, 2, 3], |_| n += 1);
        assert_eq!(n, 12);
        assert_eq!(permutation_count(&[1, 1, 2, 3]), 12.0);
        assert_eq!(permutation_count(&[4, 4, 4]), 1.0);
    }

    #[test]
    fn from_dense_detects_asymmetry() {
        let mut d = DenseTensor::zeros(vec![2, 2, 2], 100).unwrap();
        d.set(&[0, 0, 1], 1.0);
        assert!(matches!(
            SymTensor::from_dense(&d, 1e-12),
            Err(HgspError::NotSymmetric { .. })
        ));
        d.set(&[0, 1, 0], 1.0);
        d.set(&[1, 0, 0], 1.0);
        let t = SymTensor::from_dense(&d, 1e-12).unwrap();
        assert_eq!(t.nnz(), 1);
        assert_eq!(t.to_dense(100).unwrap(), d);
    }

    #[test]
    fn n_mode_identity_is_noop() {
        let s = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let t = outer_power(&s, 3, 1000).unwrap();
        for mode in 0..3 {
            assert_eq!(t.n_mode_product(mode, &DMatrix::identity(3, 3)).unwrap(), t);
        }
    }

    #[test]
    fn n_mode_all_ones_matrix() {
        let t = DenseTensor::from_vec(vec![2, 2], vec![1.0; 4]).unwrap();
        let u = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let out = t.n_mode_product(0, &u).unwrap();
        assert_eq!(out.shape(), &[1, 2]);
        assert_eq!(out.data(), &[2.0, 2.0]);
    }

    #[test]
    fn n_mode_selector_rows_give_full_contraction() {
        let t = fig7a();
        let dense = t.to_dense(1000).unwrap();
        let v = DVector::from_vec(vec![0.3, -1.0, 2.0, 0.7, 1.5, -0.2, 0.9]);
        let row = DMatrix::from_row_slice(1, 7, v.as_slice());
        let mut out = dense.clone();
        for mode in 0..3 {
            out = out.n_mode_product(mode, &row).unwrap();
        }
        assert_eq!(out.shape(), &[1, 1, 1]);
        let mut oracle = 0.0;
        for flat in 0..dense.data().len() {
            let idx = dense.unravel(flat);
            oracle += dense.data()[flat] * idx.iter().map(|&i| v[i]).product::<f64>();
        }
        assert!((out.data()[0] - oracle).abs() < 1e-12);
    }

    #[test]
    fn n_mode_errors() {
        let t = DenseTensor::zeros(vec![2, 3], 100).unwrap();
        assert!(t.n_mode_product(2, &DMatrix::identity(2, 2)).is_err());
        assert!(matches!(
            t.n_mode_product(1, &DMatrix::identity(2, 2)),
            Err(HgspError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn outer_power_cases() {
        let s = DVector::from_vec(vec![1.0, 2.0]);
        assert_eq!(outer_power(&s, 2, 100).unwrap().data(), &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(outer_power(&s, 1, 100).unwrap().data(), s.as_slice());
        let z = outer_power(&DVector::zeros(3), 3, 100).unwrap();
        assert!(z.data().iter().all(|&x| x == 0.0));
        assert!(matches!(
            outer_power(&DVector::zeros(10), 4, 1000),
            Err(HgspError::SizeCapExceeded { .. })
        ));
    }

    #[test]
    fn hadamard_power_cases() {
        let v = DVector::from_vec(vec![2.0, 3.0]);
        assert_eq!(hadamard_power(&v, 2).as_slice(), &[4.0, 9.0]);
        assert_eq!(hadamard_power(&v, 1), v);
        let w = DVector::from_vec(vec![-1.0, 2.0]);
        assert_eq!(hadamard_power(&w, 3).as_slice(), &[-1.0, 8.0]);
    }
}
