//! Hypergraphs and their adjacency / Laplacian tensors.
//!
//! A hyperedge with `c` nodes in a hypergraph whose largest hyperedge has `M`
//! nodes is spread over every size-`M` multiset that uses each of its nodes at
//! least once. All such entries share the weight
//!
//! ```text
//! w(c) = c / sum_{k_1..k_c >= 1, k_1+..+k_c = M} M! / (k_1! .. k_c!)
//! ```
//!
//! which makes the tensor-sum degree of a node equal to the number of
//! hyperedges containing it.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};

use crate::error::{HgspError, Result};
use crate::symtensor::{first_slot_multiplicities, runs, SymTensor};

/// Undirected hypergraph on nodes `0..num_nodes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    num_nodes: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Builds a hypergraph from 0-based hyperedges. Node order inside a
    /// hyperedge does not matter.
    pub fn new(num_nodes: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        if num_nodes == 0 {
            return Err(HgspError::InvalidHypergraph(
                "a hypergraph needs at least one node".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (k, mut edge) in edges.into_iter().enumerate() {
            edge.sort_unstable();
            if edge.len() < 2 {
                return Err(HgspError::InvalidHypergraph(format!(
                    "hyperedge {} has {} node(s); at least 2 are required",
                    k + 1,
                    edge.len()
                )));
            }
            if let Some(&bad) = edge.iter().find(|&&v| v >= num_nodes) {
                return Err(HgspError::InvalidHypergraph(format!(
                    "hyperedge {} references node {} outside 1..={}",
                    k + 1,
                    bad + 1,
                    num_nodes
                )));
            }
            if edge.windows(2).any(|w| w[0] == w[1]) {
                return Err(HgspError::InvalidHypergraph(format!(
                    "hyperedge {} repeats a node",
                    k + 1
                )));
            }
            if !seen.insert(edge.clone()) {
                return Err(HgspError::InvalidHypergraph(format!(
                    "hyperedge {} duplicates an earlier hyperedge",
                    k + 1
                )));
            }
            out.push(edge);
        }
        Ok(Self {
            num_nodes,
            edges: out,
        })
    }

    /// Same as [`Hypergraph::new`] with 1-based node ids.
    pub fn from_one_based(num_nodes: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let shifted = edges
            .into_iter()
            .enumerate()
            .map(|(k, e)| {
                e.into_iter()
                    .map(|v| {
                        v.checked_sub(1).ok_or_else(|| {
                            HgspError::InvalidHypergraph(format!(
                                "hyperedge {} contains node id 0; ids are 1-based",
                                k + 1
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(num_nodes, shifted)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Sorted, 0-based hyperedges.
    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    /// Maximum cardinality of hyperedges (0 for an edgeless hypergraph).
    pub fn mce(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Order of the representing tensor: the m.c.e., and never below 2.
    pub fn tensor_order(&self) -> usize {
        self.mce().max(2)
    }

    /// Number of hyperedges containing each node.
    pub fn membership_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_nodes];
        for e in &self.edges {
            for &v in e {
                counts[v] += 1;
            }
        }
        counts
    }
}

/// Calls `f` with every composition of `total` into `parts` positive parts.
fn for_each_composition<F: FnMut(&[usize])>(total: usize, parts: usize, f: &mut F) {
    fn go<F: FnMut(&[usize])>(left: usize, parts: usize, acc: &mut Vec<usize>, f: &mut F) {
        if acc.len() + 1 == parts {
            acc.push(left);
            f(acc);
            acc.pop();
            return;
        }
        let slots_after = parts - acc.len() - 1;
        for k in 1..=left - slots_after {
            acc.push(k);
            go(left - k, parts, acc, f);
            acc.pop();
        }
    }
    if parts == 0 || parts > total {
        return;
    }
    go(total, parts, &mut Vec::with_capacity(parts), f);
}

fn factorial_u128(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Sum of multinomials `M!/(k_1!..k_c!)` over positive compositions of `M`
/// into `c` parts, in exact integer arithmetic.
pub fn weight_denominator(cardinality: usize, order: usize) -> u128 {
    let top = factorial_u128(order);
    let mut sum = 0u128;
    for_each_composition(order, cardinality, &mut |ks| {
        let denom: u128 = ks.iter().map(|&k| factorial_u128(k)).product();
        sum += top / denom;
    });
    sum
}

/// Weight given to every entry of a hyperedge with `cardinality` nodes in an
/// order-`order` adjacency tensor.
pub fn edge_weight(cardinality: usize, order: usize) -> f64 {
    cardinality as f64 / weight_denominator(cardinality, order) as f64
}

/// Adjacency tensor of order `max(mce, 2)` and dimension `num_nodes`.
pub fn adjacency_tensor(h: &Hypergraph) -> SymTensor {
    let order = h.tensor_order();
    let mut a = SymTensor::new(order, h.num_nodes).expect("valid hypergraph dimensions");
    let mut tuple = Vec::with_capacity(order);
    for e in &h.edges {
        let w = edge_weight(e.len(), order);
        for_each_composition(order, e.len(), &mut |ks| {
            tuple.clear();
            for (&node, &k) in e.iter().zip(ks) {
                tuple.extend(std::iter::repeat_n(node, k));
            }
            a.set(&tuple, w).expect("indices validated by Hypergraph");
        });
    }
    a
}

/// `d_i = sum_{j_1..j_{M-1}} a[i, j_1, .., j_{M-1}]`.
///
/// Orderings are counted per distinct entry value and each value is
/// multiplied once, so integer degrees come out exact.
pub fn degree_vector(a: &SymTensor) -> DVector<f64> {
    let mut counts: Vec<BTreeMap<u64, f64>> = vec![BTreeMap::new(); a.dim()];
    for (tuple, value) in a.entries() {
        let groups = runs(tuple);
        for (&(i, _), mult) in groups.iter().zip(first_slot_multiplicities(&groups)) {
            *counts[i].entry(value.to_bits()).or_default() += mult;
        }
    }
    DVector::from_iterator(
        a.dim(),
        counts
            .iter()
            .map(|c| c.iter().map(|(&v, &k)| f64::from_bits(v) * k).sum()),
    )
}

/// `L = D - A` with `D` super-diagonal holding the degrees.
pub fn laplacian_tensor(h: &Hypergraph) -> SymTensor {
    let a = adjacency_tensor(h);
    let d = degree_vector(&a);
    let order = a.order();
    let mut l = SymTensor::new(order, a.dim()).expect("valid dimensions");
    for (tuple, v) in a.entries() {
        l.set(tuple, -v).expect("same shape");
    }
    for (i, &di) in d.iter().enumerate() {
        if di != 0.0 {
            l.add(&vec![i; order], di).expect("same shape");
        }
    }
    l
}

/// Distance used by [`build_knn_hypergraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Euclidean,
}

impl Metric {
    fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// One hyperedge per node: the node plus its `m - 1` nearest neighbours
/// (ties go to the lower index). Identical node sets are kept once.
pub fn build_knn_hypergraph(features: &DMatrix<f64>, m: usize, metric: Metric) -> Result<Hypergraph> {
    let n = features.nrows();
    if m < 2 {
        return Err(HgspError::InvalidArgument(format!(
            "hyperedge size m must be at least 2, got {m}"
        )));
    }
    if m > n {
        return Err(HgspError::InvalidArgument(format!(
            "hyperedge size m = {m} exceeds the {n} available points"
        )));
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| features.row(i).iter().copied().collect())
        .collect();
    let distinct: BTreeSet<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| (x + 0.0).to_bits()).collect())
        .collect();
    if distinct.len() < m {
        return Err(HgspError::InvalidArgument(format!(
            "only {} distinct points, fewer than m = {m}",
            distinct.len()
        )));
    }
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    for i in 0..n {
        let mut others: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (metric.distance(&rows[i], &rows[j]), j))
            .collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut edge: Vec<usize> = std::iter::once(i)
            .chain(others.iter().take(m - 1).map(|&(_, j)| j))
            .collect();
        edge.sort_unstable();
        if seen.insert(edge.clone()) {
            edges.push(edge);
        }
    }
    Hypergraph::new(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig7b() -> Hypergraph {
        Hypergraph::from_one_based(7, vec![vec![1, 4, 6], vec![2, 3], vec![5, 6, 7]]).unwrap()
    }

    #[test]
    fn fig7b_weights() {
        let a = adjacency_tensor(&fig7b());
        assert_eq!(a.order(), 3);
        assert_eq!(a.get(&[0, 3, 5]), 0.5);
        for idx in [[1, 2, 2], [2, 1, 2], [2, 2, 1], [2, 1, 1], [1, 1, 2], [1, 2, 1]] {
            assert_eq!(a.get(&idx), 1.0 / 3.0);
        }
        // one canonical tuple per 3-set, two for the pair
        assert_eq!(a.nnz(), 4);
    }

    #[test]
    fn normal_graph_weight_is_one() {
        assert_eq!(edge_weight(2, 2), 1.0);
        let h = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let a = adjacency_tensor(&h);
        assert_eq!(a.get(&[1, 0]), 1.0);
        assert_eq!(a.get(&[0, 0]), 0.0);
    }

    #[test]
    fn three_node_weight_in_order_three() {
        assert_eq!(weight_denominator(3, 3), 6);
        assert_eq!(edge_weight(3, 3), 0.5);
        assert_eq!(weight_denominator(2, 3), 6);
        // surjections of a 4-set onto a 2-set
        assert_eq!(weight_denominator(2, 4), 14);
    }

    #[test]
    fn fig7b_degrees() {
        let d = degree_vector(&adjacency_tensor(&fig7b()));
        assert_eq!(d[5], 2.0);
        assert!((d[1] - 1.0).abs() < 1e-15);
        let counts = fig7b().membership_counts();
        for (i, &c) in counts.iter().enumerate() {
            assert!((d[i] - c as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_hypergraph() {
        let h = Hypergraph::new(4, vec![]).unwrap();
        assert_eq!(h.mce(), 0);
        let a = adjacency_tensor(&h);
        assert!(a.is_empty());
        assert_eq!(degree_vector(&a), DVector::zeros(4));
        assert!(laplacian_tensor(&h).is_empty());
    }

    #[test]
    fn fig7b_laplacian() {
        let l = laplacian_tensor(&fig7b());
        assert_eq!(l.get(&[6, 6, 6]), 1.0);
        assert_eq!(l.get(&[0, 3, 5]), -0.5);
        assert_eq!(l.get(&[5, 5, 5]), 2.0);
    }

    #[test]
    fn single_edge_graph_laplacian() {
        let h = Hypergraph::new(2, vec![vec![0, 1]]).unwrap();
        let l = laplacian_tensor(&h);
        assert_eq!(l.get(&[0, 0]), 1.0);
        assert_eq!(l.get(&[1, 1]), 1.0);
        assert_eq!(l.get(&[0, 1]), -1.0);
    }

    #[test]
    fn rejects_invalid_edges() {
        assert!(Hypergraph::new(3, vec![vec![0]]).is_err());
        assert!(Hypergraph::new(3, vec![vec![0, 3]]).is_err());
        assert!(Hypergraph::new(3, vec![vec![0, 0]]).is_err());
        assert!(Hypergraph::new(3, vec![vec![0, 1], vec![1, 0]]).is_err());
        assert!(Hypergraph::from_one_based(3, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn knn_collinear_points() {
        let f = DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 2.0]);
        let h = build_knn_hypergraph(&f, 2, Metric::Euclidean).unwrap();
        assert_eq!(h.edges(), &[vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn knn_full_size_single_edge() {
        let f = DMatrix::from_row_slice(4, 2, &[0.0, 0.0, 1.0, 0.0, 5.0, 5.0, 2.0, 1.0]);
        let h = build_knn_hypergraph(&f, 4, Metric::Euclidean).unwrap();
        assert_eq!(h.edges(), &[vec![0, 1, 2, 3]]);
    }

    #[test]
    fn knn_duplicate_rows_are_deterministic() {
        let f = DMatrix::from_row_slice(5, 1, &[1.0, 1.0, 1.0, 4.0, 4.0]);
        let a = build_knn_hypergraph(&f, 2, Metric::Euclidean).unwrap();
        let b = build_knn_hypergraph(&f, 2, Metric::Euclidean).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.edges(), &[vec![0, 1], vec![0, 2], vec![3, 4]]);
        assert!(build_knn_hypergraph(&f, 3, Metric::Euclidean).is_err());
    }
}
