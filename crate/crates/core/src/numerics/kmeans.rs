use crate::error::{AgeError, Result};
use crate::numerics::{squared_distance, DenseMatrix, SeededRng};

pub const DEFAULT_KMEANS_TOL: f64 = 1e-4;
pub const DEFAULT_KMEANS_MAX_ITER: usize = 50;

#[derive(Clone, Debug)]
pub struct KMeansResult {
    /// Cluster id for every input row.
    pub assignments: Vec<usize>,
    /// `k × dim`; row `c` is the mean of the rows assigned to `c`.
    pub centroids: DenseMatrix,
    pub iterations: usize,
    /// Sum of squared distances to the assigned centroid, after each Lloyd update.
    pub objective_trace: Vec<f64>,
}

/// k-means++ seeding followed by Lloyd iterations.
///
/// Stops when no centroid moves by `tol` or more (Euclidean), or after
/// `max_iter` updates. A cluster left empty by an assignment step takes the
/// point lying farthest from its own centroid.
pub fn kmeans(
    points: &DenseMatrix,
    k: usize,
    rng: &mut SeededRng,
    max_iter: usize,
    tol: f64,
) -> Result<KMeansResult> {
    let n = points.rows();
    if k == 0 {
        return Err(AgeError::Parameter("k-means needs k >= 1".into()));
    }
    if k > n {
        return Err(AgeError::Parameter(format!(
            "k-means with k = {k} but only {n} points"
        )));
    }

    let mut centroids = plus_plus_seeds(points, k, rng);
    let mut assignments = vec![0usize; n];
    let mut objective_trace = Vec::new();
    let mut iterations = 0;

    for _ in 0..max_iter.max(1) {
        iterations += 1;
        assign(points, &centroids, &mut assignments);
        reseed_empty(points, &centroids, &mut assignments, k);
        let updated = means(points, &assignments, k);

        let shift = (0..k)
            .map(|c| squared_distance(updated.row(c), centroids.row(c)).sqrt())
            .fold(0.0, f64::max);
        centroids = updated;
        objective_trace.push(objective(points, &centroids, &assignments));
        if shift < tol {
            break;
        }
    }

    Ok(KMeansResult {
        assignments,
        centroids,
        iterations,
        objective_trace,
    })
}

fn plus_plus_seeds(points: &DenseMatrix, k: usize, rng: &mut SeededRng) -> DenseMatrix {
    let n = points.rows();
    let mut centroids = DenseMatrix::zeros(k, points.cols());
    let first = rng.below(n);
    centroids.row_mut(0).copy_from_slice(points.row(first));

    let mut nearest: Vec<f64> = (0..n)
        .map(|i| squared_distance(points.row(i), centroids.row(0)))
        .collect();
    for c in 1..k {
        let total: f64 = nearest.iter().sum();
        let chosen = if total > 0.0 {
            let target = rng.uniform() * total;
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (i, &d) in nearest.iter().enumerate() {
                acc += d;
                if acc >= target && d > 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            rng.below(n)
        };
        centroids.row_mut(c).copy_from_slice(points.row(chosen));
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(squared_distance(points.row(i), centroids.row(c)));
        }
    }
    centroids
}

fn assign(points: &DenseMatrix, centroids: &DenseMatrix, assignments: &mut [usize]) {
    for (i, slot) in assignments.iter_mut().enumerate() {
        *slot = nearest_centroid(points.row(i), centroids).0;
    }
}

/// Closest centroid to `point`; ties go to the lower cluster id.
pub fn nearest_centroid(point: &[f64], centroids: &DenseMatrix) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..centroids.rows() {
        let d = squared_distance(point, centroids.row(c));
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn reseed_empty(points: &DenseMatrix, centroids: &DenseMatrix, assignments: &mut [usize], k: usize) {
    let mut counts = vec![0usize; k];
    for &a in assignments.iter() {
        counts[a] += 1;
    }
    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        let mut far = None;
        let mut far_dist = -1.0;
        for (i, &a) in assignments.iter().enumerate() {
            if counts[a] < 2 {
                continue;
            }
            let d = squared_distance(points.row(i), centroids.row(a));
            if d > far_dist {
                far_dist = d;
                far = Some(i);
            }
        }
        if let Some(i) = far {
            counts[assignments[i]] -= 1;
            assignments[i] = empty;
            counts[empty] = 1;
        }
    }
}

fn means(points: &DenseMatrix, assignments: &[usize], k: usize) -> DenseMatrix {
    let mut sums = DenseMatrix::zeros(k, points.cols());
    let mut counts = vec![0usize; k];
    for (i, &a) in assignments.iter().enumerate() {
        counts[a] += 1;
        for (s, &x) in sums.row_mut(a).iter_mut().zip(points.row(i)) {
            *s += x;
        }
    }
    for (c, &count) in counts.iter().enumerate() {
        if count > 0 {
            let inv = 1.0 / count as f64;
            sums.row_mut(c).iter_mut().for_each(|v| *v *= inv);
        }
    }
    sums
}

pub fn objective(points: &DenseMatrix, centroids: &DenseMatrix, assignments: &[usize]) -> f64 {
    assignments
        .iter()
        .enumerate()
        .map(|(i, &a)| squared_distance(points.row(i), centroids.row(a)))
        .sum()
}
