//! Lloyd's k-means on the real line with k-means++ seeding.
//!
//! Runs [`N_INIT`] seeded restarts and keeps the lowest within-cluster sum of
//! squares. Each restart stops once assignments stop changing, the largest
//! centroid move drops below [`TOLERANCE`], or after [`MAX_ITER`] rounds.
//! Clusters are relabelled in ascending centroid order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BinningError;

pub const TOLERANCE: f64 = 1e-9;
pub const MAX_ITER: usize = 300;
pub const N_INIT: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct KMeans1d {
    /// Cluster per input value, in input order.
    pub labels: Vec<usize>,
    /// Ascending.
    pub centroids: Vec<f64>,
    /// `(min, max)` of the member values of each cluster.
    pub intervals: Vec<(f64, f64)>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
}

impl KMeans1d {
    /// Split points between adjacent clusters: midpoints between one cluster's
    /// maximum and the next one's minimum.
    pub fn cutpoints(&self) -> Vec<f64> {
        self.intervals.windows(2).map(|w| (w[0].1 + w[1].0) / 2.0).collect()
    }

    /// Cluster for a new value; a value on a cutpoint goes to the upper cluster.
    pub fn assign(&self, v: f64) -> usize {
        self.cutpoints().partition_point(|&c| c <= v)
    }
}

pub fn kmeans_1d(values: &[f64], k: usize, seed: u64) -> Result<KMeans1d, BinningError> {
    if let Some(index) = values.iter().position(|x| !x.is_finite()) {
        return Err(BinningError::NonFinite { index });
    }
    if k == 0 {
        return Err(BinningError::InvalidSpec("k must be at least 1".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut distinct = sorted.clone();
    distinct.dedup();
    if distinct.len() < k {
        return Err(BinningError::TooFewDistinct { distinct: distinct.len(), k });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..N_INIT {
        let init = plus_plus_init(&sorted, k, &mut rng);
        let (centroids, inertia) = lloyd(&sorted, init);
        if best.as_ref().is_none_or(|(b, _)| inertia < *b) {
            best = Some((inertia, centroids));
        }
    }
    let (_, mut centroids) = best.expect("at least one restart");
    let mut labels: Vec<usize> = values.iter().map(|&v| nearest(&centroids, v)).collect();
    repair_empty(values, &mut centroids, &mut labels);

    // Relabel clusters by ascending mean.
    let mut sums = vec![(0.0, 0usize); k];
    for (&v, &c) in values.iter().zip(&labels) {
        sums[c].0 += v;
        sums[c].1 += 1;
    }
    let raw_means: Vec<f64> = sums.iter().map(|&(s, c)| s / c as f64).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| raw_means[a].total_cmp(&raw_means[b]));
    let mut rank = vec![0; k];
    for (r, &c) in order.iter().enumerate() {
        rank[c] = r;
    }
    for l in labels.iter_mut() {
        *l = rank[*l];
    }
    let means: Vec<f64> = order.iter().map(|&c| raw_means[c]).collect();
    let mut intervals = vec![(f64::INFINITY, f64::NEG_INFINITY); k];
    for (&v, &c) in values.iter().zip(&labels) {
        intervals[c].0 = intervals[c].0.min(v);
        intervals[c].1 = intervals[c].1.max(v);
    }
    let inertia = values.iter().zip(&labels).map(|(&v, &c)| (v - means[c]).powi(2)).sum();
    Ok(KMeans1d { labels, centroids: means, intervals, inertia })
}

/// Index of the closest centroid; ties go to the lower index.
fn nearest(centroids: &[f64], v: f64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, &c) in centroids.iter().enumerate() {
        let d = (v - c).abs();
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

fn plus_plus_init(points: &[f64], k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.gen_range(0..points.len())]);
    let mut d2: Vec<f64> = points.iter().map(|&p| (p - centroids[0]).powi(2)).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let mut r = rng.gen::<f64>() * total;
        let mut pick = None;
        for (i, &d) in d2.iter().enumerate() {
            if d > 0.0 {
                pick = Some(i);
                if r < d {
                    break;
                }
                r -= d;
            }
        }
        let c = points[pick.expect("distinct values remain")];
        centroids.push(c);
        for (d, &p) in d2.iter_mut().zip(points) {
            *d = d.min((p - c).powi(2));
        }
    }
    centroids
}

/// Lloyd iterations from `centroids`; returns the final centroids and inertia.
fn lloyd(points: &[f64], mut centroids: Vec<f64>) -> (Vec<f64>, f64) {
    let k = centroids.len();
    let mut assign = vec![usize::MAX; points.len()];
    for _ in 0..MAX_ITER {
        let mut changed = false;
        for (a, &p) in assign.iter_mut().zip(points) {
            let c = nearest(&centroids, p);
            if *a != c {
                *a = c;
                changed = true;
            }
        }
        repair_empty(points, &mut centroids, &mut assign);
        if !changed {
            break;
        }
        let mut sums = vec![(0.0, 0usize); k];
        for (&a, &p) in assign.iter().zip(points) {
            sums[a].0 += p;
            sums[a].1 += 1;
        }
        let mut shift = 0.0f64;
        for (c, &(s, n)) in centroids.iter_mut().zip(&sums) {
            let next = s / n as f64;
            shift = shift.max((next - *c).abs());
            *c = next;
        }
        if shift < TOLERANCE {
            break;
        }
    }
    // Final assignment against the final centroids.
    for (a, &p) in assign.iter_mut().zip(points) {
        *a = nearest(&centroids, p);
    }
    repair_empty(points, &mut centroids, &mut assign);
    let inertia = points.iter().zip(&assign).map(|(&p, &a)| (p - centroids[a]).powi(2)).sum();
    (centroids, inertia)
}

/// Moves the centroid of each empty cluster onto the point farthest from its
/// own centroid, then reassigns. Terminates because at least `k` distinct
/// values exist.
fn repair_empty(points: &[f64], centroids: &mut [f64], assign: &mut [usize]) {
    loop {
        let mut sizes = vec![0usize; centroids.len()];
        for &a in assign.iter() {
            sizes[a] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else { return };
        let far = (0..points.len())
            .max_by(|&i, &j| {
                let di = (points[i] - centroids[assign[i]]).abs();
                let dj = (points[j] - centroids[assign[j]]).abs();
                di.total_cmp(&dj).then(j.cmp(&i))
            })
            .expect("non-empty input");
        centroids[empty] = points[far];
        for (a, &p) in assign.iter_mut().zip(points) {
            *a = nearest(centroids, p);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clusters(values: &[f64], km: &KMeans1d) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new(); km.centroids.len()];
        for (&v, &c) in values.iter().zip(&km.labels) {
            out[c].push(v);
        }
        out
    }

    #[test]
    fn two_obvious_groups_for_every_seed() {
        let v = [0.0, 1.0, 10.0, 11.0];
        for seed in 0..200 {
            let km = kmeans_1d(&v, 2, seed).unwrap();
            assert_eq!(clusters(&v, &km), vec![vec![0.0, 1.0], vec![10.0, 11.0]], "seed {seed}");
            assert_eq!(km.centroids, vec![0.5, 10.5]);
            assert_eq!(km.intervals, vec![(0.0, 1.0), (10.0, 11.0)]);
        }
    }

    #[test]
    fn k_one_and_k_n() {
        let v = [3.0, -1.0, 8.0, 2.5];
        let km = kmeans_1d(&v, 1, 9).unwrap();
        assert!(km.labels.iter().all(|&l| l == 0));
        let km = kmeans_1d(&v, 4, 9).unwrap();
        assert_eq!(km.labels, vec![2, 0, 3, 1]);
        assert_eq!(km.inertia, 0.0);
    }

    #[test]
    fn duplicates_count_towards_n_not_k() {
        assert_eq!(kmeans_1d(&[1.0, 1.0, 1.0, 2.0], 3, 0), Err(BinningError::TooFewDistinct { distinct: 2, k: 3 }));
        let km = kmeans_1d(&[1.0, 1.0, 1.0, 2.0], 2, 0).unwrap();
        assert_eq!(km.labels, vec![0, 0, 0, 1]);
    }

    #[test]
    fn assign_uses_midpoints() {
        let km = kmeans_1d(&[0.0, 1.0, 10.0, 11.0], 2, 0).unwrap();
        assert_eq!(km.cutpoints(), vec![5.5]);
        assert_eq!(km.assign(5.49), 0);
        assert_eq!(km.assign(5.5), 1);
        assert_eq!(km.assign(-100.0), 0);
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(kmeans_1d(&[0.0, f64::NAN], 1, 0), Err(BinningError::NonFinite { index: 1 }));
    }

    #[test]
    fn deterministic_given_seed() {
        let v: Vec<f64> = (0..200).map(|i| ((i * 7919) % 211) as f64 / 7.0).collect();
        assert_eq!(kmeans_1d(&v, 5, 42).unwrap(), kmeans_1d(&v, 5, 42).unwrap());
    }
}
