//! Dense and sparse matrices, seeded randomness, and k-means.

mod dense;
mod kmeans;
mod rng;
mod sparse;

pub use dense::{dot, softmax_rows, squared_distance, DenseMatrix};
pub use kmeans::{
    kmeans, nearest_centroid, objective as kmeans_objective, KMeansResult, DEFAULT_KMEANS_MAX_ITER,
    DEFAULT_KMEANS_TOL,
};
pub use rng::{sample_beta_1_n, splitmix64, SeededRng};
pub use sparse::{spmm, SparseMatrix};

/// Glorot/Xavier uniform initialization on `[-s, s]`, `s = sqrt(6 / (fan_in + fan_out))`.
pub fn glorot_init(rng: &mut SeededRng, fan_in: usize, fan_out: usize) -> DenseMatrix {
    let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let mut m = DenseMatrix::zeros(fan_in, fan_out);
    for v in m.as_mut_slice() {
        *v = bound * (2.0 * rng.uniform() - 1.0);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glorot_respects_bound() {
        let w = glorot_init(&mut SeededRng::new(1, 0), 3, 3);
        assert!(w.as_slice().iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn glorot_is_seeded() {
        let a = glorot_init(&mut SeededRng::new(4, 1), 5, 7);
        let b = glorot_init(&mut SeededRng::new(4, 1), 5, 7);
        assert_eq!(a, b);
    }

    #[test]
    fn glorot_mean_near_zero() {
        let w = glorot_init(&mut SeededRng::new(8, 0), 100, 100);
        let mean = w.as_slice().iter().sum::<f64>() / 10_000.0;
        // s = sqrt(6/200) ≈ 0.173; the standard error of the mean is s/sqrt(3e4) ≈ 0.001.
        assert!(mean.abs() < 0.02, "{mean}");
    }
}
