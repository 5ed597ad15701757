//! Spectral clustering: RBF affinity, symmetric normalized Laplacian,
//! row-normalized spectral embedding, then seeded k-means++.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_LLOYD_ITERATIONS: usize = 300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterParams {
    pub k: usize,
    /// RBF bandwidth in `exp(-gamma * |x - y|^2)`.
    pub gamma: f64,
    pub n_init: usize,
    pub seed: u64,
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self {
            k: 4,
            gamma: 1.0,
            n_init: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    /// One label per input vector, in input order.
    pub labels: Vec<usize>,
    pub k: usize,
    pub seed: u64,
}

/// Labels in `[0, k)`, renumbered so that clusters appear in order of their
/// smallest member index.
pub fn spectral_cluster(vectors: &[Vec<f64>], params: &ClusterParams) -> Result<ClusterAssignment> {
    let k = params.k;
    let m = vectors.len();
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    if m < k {
        return Err(Error::invalid(format!("{m} vectors cannot form {k} clusters")));
    }
    let dim = vectors[0].len();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::invalid("vectors differ in length"));
    }
    if !(params.gamma > 0.0 && params.gamma.is_finite()) {
        return Err(Error::invalid("gamma must be positive"));
    }
    if params.n_init == 0 {
        return Err(Error::invalid("n_init must be positive"));
    }

    let w = DMatrix::from_fn(m, m, |u, v| {
        let d2: f64 = vectors[u].iter().zip(&vectors[v]).map(|(a, b)| (a - b) * (a - b)).sum();
        (-params.gamma * d2).exp()
    });
    let inv_sqrt_deg: Vec<f64> = (0..m).map(|u| 1.0 / w.row(u).sum().sqrt()).collect();
    let laplacian = DMatrix::from_fn(m, m, |u, v| {
        let id = if u == v { 1.0 } else { 0.0 };
        id - inv_sqrt_deg[u] * w[(u, v)] * inv_sqrt_deg[v]
    });
    let eig = SymmetricEigen::new(laplacian);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));

    let embedding: Vec<Vec<f64>> = (0..m)
        .map(|u| {
            let row: Vec<f64> = order[..k].iter().map(|&c| eig.eigenvectors[(u, c)]).collect();
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.into_iter().map(|x| x / norm).collect()
            } else {
                row
            }
        })
        .collect();

    let labels = kmeans(&embedding, k, params.n_init, params.seed)?;
    Ok(ClusterAssignment {
        labels: renumber(&labels),
        k,
        seed: params.seed,
    })
}

fn renumber(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::BTreeMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = dist2(point, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centers = vec![points[rng.random_range(0..points.len())].clone()];
    while centers.len() < k {
        let d: Vec<f64> = points.iter().map(|p| nearest(p, &centers).1).collect();
        let total: f64 = d.iter().sum();
        let pick = if total > 0.0 {
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            d.iter()
                .position(|&x| {
                    acc += x;
                    acc > u
                })
                .unwrap_or_else(|| d.iter().rposition(|&x| x > 0.0).unwrap_or(0))
        } else {
            rng.random_range(0..points.len())
        };
        centers.push(points[pick].clone());
    }
    centers
}

fn lloyd(points: &[Vec<f64>], mut centers: Vec<Vec<f64>>) -> (Vec<usize>, f64) {
    let dim = points[0].len();
    let mut labels = vec![usize::MAX; points.len()];
    for _ in 0..MAX_LLOYD_ITERATIONS {
        let mut changed = false;
        for (p, l) in points.iter().zip(labels.iter_mut()) {
            let c = nearest(p, &centers).0;
            if *l != c {
                *l = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; centers.len()];
        let mut counts = vec![0usize; centers.len()];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, x) in sums[l].iter_mut().zip(p) {
                *s += x;
            }
        }
        for ((center, sum), count) in centers.iter_mut().zip(sums).zip(counts) {
            if count > 0 {
                *center = sum.into_iter().map(|s| s / count as f64).collect();
            }
        }
    }
    let inertia = points.iter().zip(&labels).map(|(p, &l)| dist2(p, &centers[l])).sum();
    (labels, inertia)
}

/// Best-inertia labels over `n_init` seeded k-means++ restarts; the earliest
/// restart wins ties.
pub fn kmeans(points: &[Vec<f64>], k: usize, n_init: usize, seed: u64) -> Result<Vec<usize>> {
    if k == 0 || points.len() < k {
        return Err(Error::invalid(format!("{} points cannot form {k} clusters", points.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<usize>, f64)> = None;
    for _ in 0..n_init.max(1) {
        let centers = plus_plus(points, k, &mut rng);
        let (labels, inertia) = lloyd(points, centers);
        if best.as_ref().map_or(true, |(_, b)| inertia < *b) {
            best = Some((labels, inertia));
        }
    }
    Ok(best.map(|(l, _)| l).unwrap_or_default())
}
