//! Statistics kernel: descriptive statistics, Welch's t-test, the Wilcoxon
//! rank-sum test, clustering primitives (k-means, Ward linkage, silhouette)
//! and the casual-vs-frequent group comparisons built on top of them.
//!
//! Everything here is deterministic: clustering uses farthest-point seeding
//! instead of random restarts, and all tie-breaks are by lowest index.

mod cluster;
mod compare;
mod hypothesis;
mod special;

pub use cluster::{kmeans, silhouette, ward_agglomerative, KMeansResult};
pub use compare::{compare_groups, ComparisonReport, GroupComparison, GroupingKind};
pub use hypothesis::{welch_t, wilcoxon_rank_sum, TestResult};
pub use special::{ln_gamma, normal_cdf, reg_inc_beta, student_t_cdf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("silhouette needs at least two non-empty clusters")]
    SingleCluster,
    #[error("empty sample")]
    EmptySample,
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (n - 1 denominator).
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn sample_std(xs: &[f64]) -> f64 {
    sample_variance(xs).sqrt()
}

/// Population standard deviation (n denominator).
pub fn population_std(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Median; the average of the two middle values for even lengths.
pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Linearly interpolated quantile (the common `h = (n - 1) q` rule).
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut sorted: Vec<f64> = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in quantile input"));
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_even_length_averages_the_middle() {
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(&[1.0, 2.0, 3.0]), 2.0);
    }

    #[test]
    fn quantiles_interpolate_linearly() {
        assert_eq!(quantile(&[10.0, 20.0], 0.75), 17.5);
        assert_eq!(quantile(&[1.0], 0.9), 1.0);
    }

    #[test]
    fn variance_matches_hand_computation() {
        let xs = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        assert!((sample_variance(&xs) - 32.0 / 7.0).abs() < 1e-12);
        assert!((population_std(&xs) - 2.0).abs() < 1e-12);
    }
}
