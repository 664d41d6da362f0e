//! Citizen-science engagement metrics per player, plus clustering into
//! engagement profiles.
//!
//! Day boundaries sit at UTC midnight. A player's linked span runs from
//! their first to their last active day inclusive, so someone active on
//! every day of their span has an activity ratio of exactly one. Variation
//! in periodicity reads "intervals between non-consecutive active days" as
//! the gaps between successive active days; the all-pairs reading is
//! available behind [`GapVariant::AllPairs`] for sensitivity analysis.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use serde::Serialize;
use thiserror::Error;

use crate::ingest::{EventLog, PlayerId, Timestamp};
use crate::stats::{self, kmeans, silhouette, ward_agglomerative, StatsError};

#[derive(Debug, Error)]
pub enum EngagementError {
    #[error("unknown player {0}")]
    UnknownPlayer(PlayerId),
    #[error("clustering needs at least {need} players, got {got}")]
    TooFewPlayers { need: usize, got: usize },
    #[error("every feature is constant across players")]
    DegenerateFeatures,
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// How to pair active days for the variation-in-periodicity metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GapVariant {
    /// Gaps between successive active days (the default reading).
    #[default]
    Successive,
    /// All pairwise day differences.
    AllPairs,
}

/// The four engagement metrics for one player, plus the raw ingredients.
#[derive(Debug, Clone, Serialize)]
pub struct EngagementMetrics {
    pub player: PlayerId,
    /// Active days over the inclusive first-to-last-day span; in (0, 1].
    pub activity_ratio: f64,
    /// Play hours per active day, via the one-minute-round approximation.
    pub daily_devoted_time_hours: f64,
    /// Linked span over days-until-project-end; only when an end is set.
    pub relative_active_duration: Option<f64>,
    /// Standard deviation of gaps between active days, in days.
    pub variation_in_periodicity_days: f64,
    /// Seconds between the player's first and last contribution.
    pub total_active_time_secs: i64,
    pub active_days: u32,
}

fn active_days_of(log: &EventLog, player: &PlayerId) -> BTreeSet<i64> {
    log.events()
        .iter()
        .filter(|e| &e.player == player)
        .map(|e| e.timestamp.day())
        .collect()
}

fn variation(days: &BTreeSet<i64>, variant: GapVariant) -> f64 {
    let days: Vec<i64> = days.iter().copied().collect();
    let gaps: Vec<f64> = match variant {
        GapVariant::Successive => days.windows(2).map(|w| (w[1] - w[0]) as f64).collect(),
        GapVariant::AllPairs => {
            let mut gaps = Vec::new();
            for i in 0..days.len() {
                for j in i + 1..days.len() {
                    gaps.push((days[j] - days[i]) as f64);
                }
            }
            gaps
        }
    };
    if gaps.len() < 2 {
        return 0.0;
    }
    stats::population_std(&gaps)
}

/// Compute the engagement metrics of one player.
///
/// Rounds must have been built on the log: daily devoted time sums the
/// durations of the rounds the player took part in.
pub fn engagement_metrics(
    log: &EventLog,
    player: &PlayerId,
    project_end: Option<Timestamp>,
    gaps: GapVariant,
) -> Result<EngagementMetrics, EngagementError> {
    let days = active_days_of(log, player);
    if days.is_empty() {
        return Err(EngagementError::UnknownPlayer(player.clone()));
    }
    let first_day = *days.first().unwrap();
    let last_day = *days.last().unwrap();
    let span_days = (last_day - first_day + 1) as f64;
    let active_days = days.len() as u32;

    let play_seconds: u64 = log
        .rounds()
        .iter()
        .filter(|r| r.players.contains(player))
        .map(|r| r.duration_secs as u64)
        .sum();

    let (first_ts, last_ts) = log
        .events()
        .iter()
        .filter(|e| &e.player == player)
        .fold((i64::MAX, i64::MIN), |(lo, hi), e| {
            (lo.min(e.timestamp.secs()), hi.max(e.timestamp.secs()))
        });

    let relative_active_duration = project_end.map(|end| {
        let denominator = (end.day() - first_day + 1).max(1) as f64;
        (span_days / denominator).min(1.0)
    });

    Ok(EngagementMetrics {
        player: player.clone(),
        activity_ratio: active_days as f64 / span_days,
        daily_devoted_time_hours: play_seconds as f64 / 3600.0 / active_days as f64,
        relative_active_duration,
        variation_in_periodicity_days: variation(&days, gaps),
        total_active_time_secs: last_ts - first_ts,
        active_days,
    })
}

/// Metrics for every player in the log, ordered by player id.
pub fn all_engagement_metrics(
    log: &EventLog,
    project_end: Option<Timestamp>,
    gaps: GapVariant,
) -> Vec<EngagementMetrics> {
    log.players()
        .iter()
        .map(|p| engagement_metrics(log, p, project_end, gaps).expect("player from log"))
        .collect()
}

/// Quantiles of players' total active time (last minus first contribution).
#[derive(Debug, Clone, Serialize)]
pub struct ActiveTimeSummary {
    pub players: u32,
    pub p25_secs: f64,
    pub p50_secs: f64,
    pub p75_secs: f64,
    pub p90_secs: f64,
}

pub fn active_time_summary(log: &EventLog) -> ActiveTimeSummary {
    let mut spans: BTreeMap<&PlayerId, (i64, i64)> = BTreeMap::new();
    for e in log.events() {
        let entry = spans.entry(&e.player).or_insert((e.timestamp.secs(), e.timestamp.secs()));
        entry.0 = entry.0.min(e.timestamp.secs());
        entry.1 = entry.1.max(e.timestamp.secs());
    }
    let values: Vec<f64> = spans.values().map(|&(lo, hi)| (hi - lo) as f64).collect();
    ActiveTimeSummary {
        players: values.len() as u32,
        p25_secs: stats::quantile(&values, 0.25),
        p50_secs: stats::quantile(&values, 0.50),
        p75_secs: stats::quantile(&values, 0.75),
        p90_secs: stats::quantile(&values, 0.90),
    }
}

/// Centroid-rule label of an engagement cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClusterLabel {
    Hardworker,
    FocusedHardworker,
    Transient,
    Unlabeled,
}

impl ClusterLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ClusterLabel::Hardworker => "hardworker",
            ClusterLabel::FocusedHardworker => "focused hardworker",
            ClusterLabel::Transient => "transient",
            ClusterLabel::Unlabeled => "unlabeled",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EngagementCluster {
    pub id: usize,
    pub label: ClusterLabel,
    pub members: Vec<PlayerId>,
    /// Centroid in z-scored feature space, one value per kept feature.
    pub centroid_z: Vec<f64>,
}

/// Per-k cross-method diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct ClusterDiagnostics {
    pub k: usize,
    pub kmeans_wss: f64,
    pub kmeans_silhouette: f64,
    pub ward_silhouette: f64,
    /// Whether k-means and Ward produce the identical partition.
    pub methods_agree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusteringReport {
    pub chosen_k: usize,
    pub features: Vec<String>,
    pub dropped_features: Vec<String>,
    pub diagnostics: Vec<ClusterDiagnostics>,
    pub clusters: Vec<EngagementCluster>,
}

fn feature_rows(metrics: &[EngagementMetrics]) -> (Vec<String>, Vec<Vec<f64>>) {
    let with_relative = metrics.iter().all(|m| m.relative_active_duration.is_some());
    let mut names = vec![
        "activity_ratio".to_owned(),
        "daily_devoted_time".to_owned(),
        "variation_in_periodicity".to_owned(),
    ];
    if with_relative {
        names.push("relative_active_duration".to_owned());
    }
    let rows = metrics
        .iter()
        .map(|m| {
            let mut row = vec![
                m.activity_ratio,
                m.daily_devoted_time_hours,
                m.variation_in_periodicity_days,
            ];
            if with_relative {
                row.push(m.relative_active_duration.unwrap());
            }
            row
        })
        .collect();
    (names, rows)
}

/// Z-score columns; constant columns are dropped and reported.
fn standardize(
    names: Vec<String>,
    rows: Vec<Vec<f64>>,
) -> Result<(Vec<String>, Vec<String>, Vec<Vec<f64>>), EngagementError> {
    let dims = names.len();
    let n = rows.len() as f64;
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut transforms = Vec::new(); // (index, mean, std)
    for d in 0..dims {
        let column: Vec<f64> = rows.iter().map(|r| r[d]).collect();
        let mean = column.iter().sum::<f64>() / n;
        let std = (column.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
        if std == 0.0 {
            dropped.push(names[d].clone());
        } else {
            kept.push(names[d].clone());
            transforms.push((d, mean, std));
        }
    }
    if transforms.is_empty() {
        return Err(EngagementError::DegenerateFeatures);
    }
    let standardized = rows
        .iter()
        .map(|r| transforms.iter().map(|&(d, mean, std)| (r[d] - mean) / std).collect())
        .collect();
    Ok((kept, dropped, standardized))
}

fn same_partition(a: &[usize], b: &[usize]) -> bool {
    let mut forward: BTreeMap<usize, usize> = BTreeMap::new();
    let mut backward: BTreeMap<usize, usize> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        if *forward.entry(x).or_insert(y) != y || *backward.entry(y).or_insert(x) != x {
            return false;
        }
    }
    true
}

fn label_centroid(features: &[String], centroid: &[f64]) -> ClusterLabel {
    let coord = |name: &str| {
        features.iter().position(|f| f == name).map(|i| centroid[i])
    };
    let ratio = coord("activity_ratio");
    let devoted = coord("daily_devoted_time");
    let variation = coord("variation_in_periodicity");

    if let (Some(ratio), Some(variation)) = (ratio, variation) {
        if ratio > 0.0 && variation < 0.0 {
            if devoted.map(|d| d >= 1.0).unwrap_or(false) {
                return ClusterLabel::FocusedHardworker;
            }
            return ClusterLabel::Hardworker;
        }
    }
    if centroid.iter().all(|&z| z < 0.0) {
        return ClusterLabel::Transient;
    }
    ClusterLabel::Unlabeled
}

/// Cluster players in standardized metric space.
///
/// Runs both k-means and Ward linkage for every k in the range, picks the k
/// with the best k-means silhouette, and labels the chosen k-means clusters
/// by centroid rules. Callers should pass metrics sorted by player id (as
/// [`all_engagement_metrics`] returns them) so seeding starts from the
/// lexicographically smallest player.
pub fn cluster_engagement(
    metrics: &[EngagementMetrics],
    k_range: RangeInclusive<usize>,
) -> Result<ClusteringReport, EngagementError> {
    let k_max = *k_range.end();
    if metrics.len() < k_max + 1 {
        return Err(EngagementError::TooFewPlayers { need: k_max + 1, got: metrics.len() });
    }
    let (names, rows) = feature_rows(metrics);
    let (features, dropped_features, points) = standardize(names, rows)?;

    let mut diagnostics = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    for k in k_range {
        if k < 2 {
            continue;
        }
        let km = kmeans(&points, k, 200)?;
        let km_silhouette = silhouette(&points, &km.assignment)?;
        let ward = ward_agglomerative(&points, k)?;
        let ward_silhouette = silhouette(&points, &ward)?;
        diagnostics.push(ClusterDiagnostics {
            k,
            kmeans_wss: km.wss,
            kmeans_silhouette: km_silhouette,
            ward_silhouette,
            methods_agree: same_partition(&km.assignment, &ward),
        });
        if best.map(|(_, s)| km_silhouette > s).unwrap_or(true) {
            best = Some((k, km_silhouette));
        }
    }
    let (chosen_k, _) = best.ok_or(EngagementError::TooFewPlayers { need: 2, got: 0 })?;

    let km = kmeans(&points, chosen_k, 200)?;
    let mut clusters = Vec::new();
    for cluster_id in 0..chosen_k {
        let members: Vec<PlayerId> = metrics
            .iter()
            .zip(&km.assignment)
            .filter_map(|(m, &a)| (a == cluster_id).then(|| m.player.clone()))
            .collect();
        if members.is_empty() {
            continue;
        }
        let centroid = km.centroids[cluster_id].clone();
        clusters.push(EngagementCluster {
            id: cluster_id,
            label: label_centroid(&features, &centroid),
            members,
            centroid_z: centroid,
        });
    }

    Ok(ClusteringReport { chosen_k, features, dropped_features, diagnostics, clusters })
}
