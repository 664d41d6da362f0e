//! Deterministic clustering primitives: Lloyd's k-means with farthest-point
//! seeding, Ward agglomerative clustering via the Lance–Williams recurrence,
//! and the mean silhouette score.
//!
//! No randomness anywhere: seeding starts from the first point and every tie
//! breaks toward the lowest index, so a fixed input always yields the same
//! clustering regardless of thread schedule or platform.

use super::StatsError;

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squared distances to the assigned centroid.
    pub wss: f64,
    pub iterations: u32,
}

/// Lloyd's algorithm with deterministic maximin ("farthest point") seeding.
///
/// The first centroid is point 0; each further seed is the point farthest
/// from its nearest chosen seed. Iteration stops at an assignment fixed
/// point or after `max_iter` rounds.
pub fn kmeans(points: &[Vec<f64>], k: usize, max_iter: u32) -> Result<KMeansResult, StatsError> {
    if k == 0 || points.len() < k {
        return Err(StatsError::TooFewPoints { need: k.max(1), got: points.len() });
    }

    // Maximin seeding.
    let mut seeds = vec![0usize];
    let mut nearest: Vec<f64> = points.iter().map(|p| squared_distance(p, &points[0])).collect();
    while seeds.len() < k {
        let mut best = 0usize;
        let mut best_distance = f64::MIN;
        for (i, &d) in nearest.iter().enumerate() {
            if d > best_distance {
                best_distance = d;
                best = i;
            }
        }
        seeds.push(best);
        for (i, d) in nearest.iter_mut().enumerate() {
            let to_new = squared_distance(&points[i], &points[best]);
            if to_new < *d {
                *d = to_new;
            }
        }
    }
    let mut centroids: Vec<Vec<f64>> = seeds.iter().map(|&i| points[i].clone()).collect();

    let mut assignment = vec![usize::MAX; points.len()];
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = 0usize;
            let mut best_distance = f64::MAX;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = squared_distance(p, centroid);
                if d < best_distance {
                    best_distance = d;
                    best = c;
                }
            }
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }

        let dim = points[0].len();
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, p) in points.iter().enumerate() {
            counts[assignment[i]] += 1;
            for (s, &x) in sums[assignment[i]].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                // An empty cluster keeps its previous centroid.
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }

    let wss = points
        .iter()
        .enumerate()
        .map(|(i, p)| squared_distance(p, &centroids[assignment[i]]))
        .sum();
    Ok(KMeansResult { assignment, centroids, wss, iterations })
}

/// Ward-linkage agglomerative clustering, cut at `k` clusters.
///
/// Lance–Williams update on squared Euclidean distances; merge ties break
/// toward the smallest cluster-slot pair. Output labels are renumbered by
/// each cluster's smallest member index.
pub fn ward_agglomerative(points: &[Vec<f64>], k: usize) -> Result<Vec<usize>, StatsError> {
    let n = points.len();
    if k == 0 || n < k {
        return Err(StatsError::TooFewPoints { need: k.max(1), got: n });
    }

    // Squared-distance matrix over active cluster slots.
    let mut d2 = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = squared_distance(&points[i], &points[j]);
            d2[i][j] = d;
            d2[j][i] = d;
        }
    }
    let mut active: Vec<bool> = vec![true; n];
    let mut size: Vec<f64> = vec![1.0; n];
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut remaining = n;

    while remaining > k {
        let mut best = (usize::MAX, usize::MAX);
        let mut best_d = f64::MAX;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in i + 1..n {
                if !active[j] {
                    continue;
                }
                // Ward merge cost, up to a monotone transform.
                let cost = size[i] * size[j] / (size[i] + size[j]) * d2[i][j];
                if cost < best_d {
                    best_d = cost;
                    best = (i, j);
                }
            }
        }
        let (i, j) = best;

        // Lance–Williams Ward recurrence for the merged cluster's distances.
        for h in 0..n {
            if !active[h] || h == i || h == j {
                continue;
            }
            let total = size[i] + size[j] + size[h];
            let updated = ((size[i] + size[h]) * d2[i][h] + (size[j] + size[h]) * d2[j][h]
                - size[h] * d2[i][j])
                / total;
            d2[i][h] = updated;
            d2[h][i] = updated;
        }
        size[i] += size[j];
        let moved = std::mem::take(&mut members[j]);
        members[i].extend(moved);
        active[j] = false;
        remaining -= 1;
    }

    // Stable labels: clusters ordered by their smallest member.
    let mut clusters: Vec<Vec<usize>> = members
        .into_iter()
        .zip(&active)
        .filter_map(|(m, &a)| a.then_some(m))
        .collect();
    for c in &mut clusters {
        c.sort_unstable();
    }
    clusters.sort_by_key(|c| c[0]);

    let mut assignment = vec![0usize; n];
    for (label, cluster) in clusters.iter().enumerate() {
        for &point in cluster {
            assignment[point] = label;
        }
    }
    Ok(assignment)
}

/// Mean silhouette coefficient with Euclidean distance.
///
/// Members of singleton clusters contribute zero, matching the usual
/// convention.
pub fn silhouette(points: &[Vec<f64>], assignment: &[usize]) -> Result<f64, StatsError> {
    assert_eq!(points.len(), assignment.len());
    let labels = {
        let mut l: Vec<usize> = assignment.to_vec();
        l.sort_unstable();
        l.dedup();
        l
    };
    if labels.len() < 2 {
        return Err(StatsError::SingleCluster);
    }

    let mut total = 0.0;
    for (i, p) in points.iter().enumerate() {
        let own = assignment[i];
        let mut own_sum = 0.0;
        let mut own_count = 0usize;
        let mut other: Vec<(f64, usize)> = labels
            .iter()
            .filter(|&&l| l != own)
            .map(|&l| (0.0, 0usize, l))
            .map(|(s, c, _)| (s, c))
            .collect();
        let other_labels: Vec<usize> = labels.iter().copied().filter(|&l| l != own).collect();

        for (j, q) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = distance(p, q);
            if assignment[j] == own {
                own_sum += d;
                own_count += 1;
            } else if let Some(pos) = other_labels.iter().position(|&l| l == assignment[j]) {
                other[pos].0 += d;
                other[pos].1 += 1;
            }
        }

        if own_count == 0 {
            continue; // singleton: contributes 0
        }
        let a = own_sum / own_count as f64;
        let b = other
            .iter()
            .filter(|(_, c)| *c > 0)
            .map(|(s, c)| s / *c as f64)
            .fold(f64::MAX, f64::min);
        let s = if a.max(b) > 0.0 { (b - a) / a.max(b) } else { 0.0 };
        total += s;
    }
    Ok(total / points.len() as f64)
}
