use crate::error::{AgeError, Result};
use crate::numerics::{kmeans, DenseMatrix, SeededRng, DEFAULT_KMEANS_MAX_ITER, DEFAULT_KMEANS_TOL};

/// Prediction entropy `-Σ_c p·ln p` of each candidate row of `z`, with `0·ln 0 = 0`.
pub fn entropy_scores(z: &DenseMatrix, candidates: &[usize]) -> Vec<f64> {
    candidates
        .iter()
        .map(|&v| {
            -z.row(v)
                .iter()
                .filter(|&&p| p > 0.0)
                .map(|&p| p * p.ln())
                .sum::<f64>()
        })
        .map(|h| h.max(0.0))
        .collect()
}

/// `1 / (1 + ‖emb_v − centroid(v)‖)` after k-means over the candidates' embeddings.
pub fn density_scores(emb: &DenseMatrix, candidates: &[usize], k: usize, rng: &mut SeededRng) -> Result<Vec<f64>> {
    density_scores_over_pool(emb, candidates, candidates, k, rng)
}

/// Like [`density_scores`], but the clustering runs over `pool`; candidates
/// outside the pool are scored against their nearest centroid.
pub fn density_scores_over_pool(
    emb: &DenseMatrix,
    candidates: &[usize],
    pool: &[usize],
    k: usize,
    rng: &mut SeededRng,
) -> Result<Vec<f64>> {
    if pool.is_empty() {
        return Err(AgeError::Usage("density scores need a non-empty pool".into()));
    }
    let k = if pool.len() < k {
        log::warn!(
            "density: only {} points for k = {k}; clustering with k = {}",
            pool.len(),
            pool.len()
        );
        pool.len()
    } else {
        k
    };
    let points = emb.select_rows(pool);
    let clusters = kmeans(&points, k, rng, DEFAULT_KMEANS_MAX_ITER, DEFAULT_KMEANS_TOL)?;

    let mut sorted_pool: Vec<(usize, usize)> = pool.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    sorted_pool.sort_unstable();
    Ok(candidates
        .iter()
        .map(|&v| {
            let cluster = match sorted_pool.binary_search_by_key(&v, |&(node, _)| node) {
                Ok(pos) => clusters.assignments[sorted_pool[pos].1],
                Err(_) => crate::numerics::nearest_centroid(emb.row(v), &clusters.centroids).0,
            };
            let d = crate::numerics::squared_distance(emb.row(v), clusters.centroids.row(cluster)).sqrt();
            1.0 / (1.0 + d)
        })
        .collect())
}

/// Fraction of entries strictly smaller than each entry.
pub fn percentile(scores: &[f64]) -> Vec<f64> {
    let n = scores.len();
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    scores
        .iter()
        .map(|&s| sorted.partition_point(|&x| x < s) as f64 / n as f64)
        .collect()
}
