//! Lloyd's k-means with k-means++ seeding.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{HgspError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansOptions {
    pub restarts: usize,
    pub max_iter: usize,
    /// Stop once no centroid moves more than `tol` times the data scale.
    pub tol: f64,
    pub seed: u64,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self {
            restarts: 50,
            max_iter: 300,
            tol: 1e-6,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// Cluster id per row, numbered by first appearance.
    pub assignments: Vec<usize>,
    /// `k x d`.
    pub centroids: DMatrix<f64>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
}

fn sq_dist(points: &DMatrix<f64>, i: usize, centroids: &DMatrix<f64>, c: usize) -> f64 {
    (0..points.ncols())
        .map(|j| (points[(i, j)] - centroids[(c, j)]).powi(2))
        .sum()
}

fn nearest(points: &DMatrix<f64>, i: usize, centroids: &DMatrix<f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..centroids.nrows() {
        let d = sq_dist(points, i, centroids, c);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus(points: &DMatrix<f64>, k: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let (n, d) = points.shape();
    let mut centroids = DMatrix::zeros(k, d);
    let first = rng.random_range(0..n);
    centroids.set_row(0, &points.row(first));
    let mut dist: Vec<f64> = (0..n).map(|i| sq_dist(points, i, &centroids, 0)).collect();
    for c in 1..k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in dist.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centroids.set_row(c, &points.row(pick));
        for (i, di) in dist.iter_mut().enumerate() {
            *di = di.min(sq_dist(points, i, &centroids, c));
        }
    }
    centroids
}

fn lloyd(points: &DMatrix<f64>, mut centroids: DMatrix<f64>, opts: &KMeansOptions) -> KMeansResult {
    let (n, d) = points.shape();
    let k = centroids.nrows();
    let scale = points.amax().max(f64::MIN_POSITIVE);
    let mut assignments = vec![0; n];
    for _ in 0..opts.max_iter {
        for (i, a) in assignments.iter_mut().enumerate() {
            *a = nearest(points, i, &centroids).0;
        }
        let mut next = DMatrix::zeros(k, d);
        let mut counts = vec![0usize; k];
        for (i, &a) in assignments.iter().enumerate() {
            counts[a] += 1;
            let mut row = next.row_mut(a);
            row += points.row(i);
        }
        for (c, &count) in counts.iter().enumerate() {
            if count == 0 {
                // re-seed an empty cluster at the point farthest from its centroid
                let far = (0..n)
                    .max_by(|&a, &b| {
                        let da = sq_dist(points, a, &centroids, assignments[a]);
                        let db = sq_dist(points, b, &centroids, assignments[b]);
                        da.total_cmp(&db).then(b.cmp(&a))
                    })
                    .expect("non-empty data");
                next.set_row(c, &points.row(far));
            } else {
                let mut row = next.row_mut(c);
                row /= count as f64;
            }
        }
        let shift = (&next - &centroids).row_iter().map(|r| r.norm()).fold(0.0, f64::max);
        centroids = next;
        if shift <= opts.tol * scale {
            break;
        }
    }
    let mut inertia = 0.0;
    for (i, a) in assignments.iter_mut().enumerate() {
        let (c, dist) = nearest(points, i, &centroids);
        *a = c;
        inertia += dist;
    }
    KMeansResult {
        assignments,
        centroids,
        inertia,
    }
}

fn relabel(mut r: KMeansResult) -> KMeansResult {
    let k = r.centroids.nrows();
    let mut map = vec![usize::MAX; k];
    let mut next = 0;
    for &a in &r.assignments {
        if map[a] == usize::MAX {
            map[a] = next;
            next += 1;
        }
    }
    for m in map.iter_mut().filter(|m| **m == usize::MAX) {
        *m = next;
        next += 1;
    }
    let mut centroids = r.centroids.clone();
    for (old, &new) in map.iter().enumerate() {
        centroids.set_row(new, &r.centroids.row(old));
    }
    r.assignments.iter_mut().for_each(|a| *a = map[*a]);
    r.centroids = centroids;
    r
}

/// Clusters the rows of `points`; the best restart by inertia wins, earliest
/// on ties.
pub fn kmeans(points: &DMatrix<f64>, k: usize, opts: &KMeansOptions) -> Result<KMeansResult> {
    let n = points.nrows();
    if k == 0 || k > n {
        return Err(HgspError::InvalidArgument(format!(
            "cluster count {k} must lie in 1..={n}"
        )));
    }
    if opts.restarts == 0 {
        return Err(HgspError::InvalidArgument("restarts must be positive".into()));
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(HgspError::InvalidArgument("points contain non-finite values".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<KMeansResult> = None;
    for _ in 0..opts.restarts {
        let init = plus_plus(points, k, &mut rng);
        let r = lloyd(points, init, opts);
        if best.as_ref().is_none_or(|b| r.inertia < b.inertia) {
            best = Some(r);
        }
    }
    Ok(relabel(best.expect("at least one restart")))
}
