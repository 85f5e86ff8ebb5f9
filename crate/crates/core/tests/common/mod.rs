//! Instance generators and independent oracles shared by integration tests.
#![allow(dead_code)]

use hgsp::Hypergraph;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Random orthonormal rows by Gram-Schmidt on Gaussian vectors.
pub fn random_orthonormal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let mut rows: Vec<DVector<f64>> = Vec::new();
    while rows.len() < n {
        let mut x = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        for _ in 0..2 {
            for r in &rows {
                let c = r.dot(&x);
                x -= r * c;
            }
        }
        let norm = x.norm();
        if norm > 1e-6 {
            rows.push(x / norm);
        }
    }
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

fn all_subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// Hypergraph with edges of mixed sizes in `2..=max_card`.
pub fn random_hypergraph(n: usize, max_card: usize, rng: &mut ChaCha8Rng) -> Hypergraph {
    let count = rng.random_range(1..=2 * n);
    let mut nodes: Vec<usize> = (0..n).collect();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    for _ in 0..count {
        let card = rng.random_range(2..=max_card.min(n));
        nodes.shuffle(rng);
        let mut e = nodes[..card].to_vec();
        e.sort_unstable();
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    Hypergraph::new(n, edges).unwrap()
}

/// Each `m`-subset becomes an edge with probability `p`; at least one edge.
pub fn random_uniform(n: usize, m: usize, p: f64, rng: &mut ChaCha8Rng) -> Hypergraph {
    let subsets = all_subsets(n, m);
    let mut edges: Vec<Vec<usize>> = subsets.iter().filter(|_| rng.random_bool(p)).cloned().collect();
    if edges.is_empty() {
        edges.push(subsets[rng.random_range(0..subsets.len())].clone());
    }
    Hypergraph::new(n, edges).unwrap()
}

/// Random simple graph (as a 2-uniform hypergraph) with at least one edge.
pub fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Hypergraph {
    random_uniform(n, 2, p, rng)
}

/// Two blocks of `n/2` nodes; 3-sets inside a block appear with `p_in`,
/// 3-sets spanning both blocks with `p_out`. Returns block labels 0/1.
pub fn planted_two_block(n: usize, p_in: f64, p_out: f64, rng: &mut ChaCha8Rng) -> (Hypergraph, Vec<usize>) {
    let labels: Vec<usize> = (0..n).map(|i| usize::from(i >= n / 2)).collect();
    let edges = all_subsets(n, 3)
        .into_iter()
        .filter(|e| {
            let inside = e.iter().all(|&i| labels[i] == labels[e[0]]);
            rng.random_bool(if inside { p_in } else { p_out })
        })
        .collect();
    (Hypergraph::new(n, edges).unwrap(), labels)
}

/// Dense adjacency matrix of a graph built straight from its edge list.
pub fn dense_graph_adjacency(h: &Hypergraph) -> DMatrix<f64> {
    let n = h.num_nodes();
    let mut a = DMatrix::zeros(n, n);
    for e in h.edges() {
        a[(e[0], e[1])] = 1.0;
        a[(e[1], e[0])] = 1.0;
    }
    a
}

/// Cyclic Jacobi eigensolver for a symmetric matrix. Returns eigenvalues in
/// descending order with eigenvectors as matching columns.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&x, &y| a[(y, y)].total_cmp(&a[(x, x)]));
    let vals = idx.iter().map(|&i| a[(i, i)]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| v[(r, idx[c])]);
    (vals, vecs)
}

/// `sum_j t[i, j..] s_j...` by looping over every index tuple of the dense
/// tensor.
pub fn dense_contract(t: &hgsp::DenseTensor, s: &DVector<f64>) -> DVector<f64> {
    let n = t.shape()[0];
    let block = t.data().len() / n;
    DVector::from_fn(n, |i, _| {
        (0..block)
            .map(|j| {
                let idx = t.unravel(i * block + j);
                t.data()[i * block + j] * idx[1..].iter().map(|&k| s[k]).product::<f64>()
            })
            .sum()
    })
}
