//! Participation × accuracy player profiling.
//!
//! Each player with a defined accuracy becomes a point on the participation
//! (total contributions) vs. accuracy plane. Median thresholds split the
//! plane into four quadrants: Beginner (low/low), Sniper (low participation,
//! high accuracy), Champion (high/high) and Troll (high participation, low
//! accuracy). Values equal to a median land in the low half, so a lone
//! player is always a Beginner.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::ingest::{EventLog, PlayerId};
use crate::stats::median;

#[derive(Debug, Error)]
pub enum ProfilesError {
    #[error("cannot assign profiles to an empty population")]
    EmptyPopulation,
}

/// One player's coordinates on the profiling plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlayerAxes {
    pub player: PlayerId,
    pub participation: u64,
    pub accuracy: f64,
}

/// Axes for every player with a defined accuracy, plus the count of players
/// who had to be left out because none of their tasks reached a solution.
#[derive(Debug, Clone, Serialize)]
pub struct AxesOutcome {
    pub axes: Vec<PlayerAxes>,
    pub excluded_players: u32,
}

/// Build the profiling plane from the log and precomputed accuracies.
///
/// Participation counts every contribution event of the player, control
/// answers included.
pub fn compute_axes(log: &EventLog, accuracies: &BTreeMap<PlayerId, f64>) -> AxesOutcome {
    let mut participation: BTreeMap<&PlayerId, u64> = BTreeMap::new();
    for event in log.events() {
        *participation.entry(&event.player).or_insert(0) += 1;
    }
    let mut axes = Vec::new();
    let mut excluded = 0u32;
    for (player, &count) in &participation {
        match accuracies.get(*player) {
            Some(&accuracy) => axes.push(PlayerAxes {
                player: (*player).clone(),
                participation: count,
                accuracy,
            }),
            None => excluded += 1,
        }
    }
    AxesOutcome { axes, excluded_players: excluded }
}

/// The two median separation values of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub participation_median: f64,
    pub accuracy_median: f64,
}

impl Thresholds {
    /// Medians of the given population.
    pub fn from_axes(axes: &[PlayerAxes]) -> Self {
        let participation: Vec<f64> = axes.iter().map(|a| a.participation as f64).collect();
        let accuracy: Vec<f64> = axes.iter().map(|a| a.accuracy).collect();
        Self {
            participation_median: median(&participation),
            accuracy_median: median(&accuracy),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Profile {
    Beginner,
    Sniper,
    Champion,
    Troll,
}

impl Profile {
    pub const ALL: [Profile; 4] = [Profile::Beginner, Profile::Sniper, Profile::Champion, Profile::Troll];

    pub fn as_str(self) -> &'static str {
        match self {
            Profile::Beginner => "Beginner",
            Profile::Sniper => "Sniper",
            Profile::Champion => "Champion",
            Profile::Troll => "Troll",
        }
    }

    pub fn index(self) -> usize {
        match self {
            Profile::Beginner => 0,
            Profile::Sniper => 1,
            Profile::Champion => 2,
            Profile::Troll => 3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileAssignment {
    pub player: PlayerId,
    pub participation: u64,
    pub accuracy: f64,
    pub profile: Profile,
}

fn quadrant(participation: u64, accuracy: f64, thresholds: Thresholds) -> Profile {
    let high_participation = (participation as f64) > thresholds.participation_median;
    let high_accuracy = accuracy > thresholds.accuracy_median;
    match (high_participation, high_accuracy) {
        (true, true) => Profile::Champion,
        (false, true) => Profile::Sniper,
        (true, false) => Profile::Troll,
        (false, false) => Profile::Beginner,
    }
}

/// Assign every player its quadrant profile.
///
/// Thresholds default to the medians of the provided axes; pass an override
/// to freeze thresholds computed on a different population.
pub fn assign_profiles(
    axes: &[PlayerAxes],
    thresholds: Option<Thresholds>,
) -> Result<(Vec<ProfileAssignment>, Thresholds), ProfilesError> {
    if axes.is_empty() {
        return Err(ProfilesError::EmptyPopulation);
    }
    let thresholds = thresholds.unwrap_or_else(|| Thresholds::from_axes(axes));
    let assignments = axes
        .iter()
        .map(|a| ProfileAssignment {
            player: a.player.clone(),
            participation: a.participation,
            accuracy: a.accuracy,
            profile: quadrant(a.participation, a.accuracy, thresholds),
        })
        .collect();
    Ok((assignments, thresholds))
}

/// Player counts and fractions per profile; fractions sum to one.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileDistribution {
    pub population: u32,
    pub counts: BTreeMap<String, u32>,
    pub fractions: BTreeMap<String, f64>,
}

pub fn profile_distribution(assignments: &[ProfileAssignment]) -> ProfileDistribution {
    let mut counts: BTreeMap<String, u32> =
        Profile::ALL.iter().map(|p| (p.as_str().to_owned(), 0)).collect();
    for a in assignments {
        *counts.get_mut(a.profile.as_str()).expect("all profiles preset") += 1;
    }
    let population = assignments.len() as u32;
    let fractions = counts
        .iter()
        .map(|(name, &c)| {
            (name.clone(), if population == 0 { 0.0 } else { c as f64 / population as f64 })
        })
        .collect();
    ProfileDistribution { population, counts, fractions }
}

/// Fraction of all contributions coming from each profile.
///
/// Totals cover the profiled players only, so the four shares always sum to
/// one even when some players were excluded from the plane.
pub fn contribution_share(
    assignments: &[ProfileAssignment],
    log: &EventLog,
) -> BTreeMap<String, f64> {
    let profile_of: BTreeMap<&PlayerId, Profile> =
        assignments.iter().map(|a| (&a.player, a.profile)).collect();
    let mut per_profile: BTreeMap<String, u64> =
        Profile::ALL.iter().map(|p| (p.as_str().to_owned(), 0)).collect();
    let mut total = 0u64;
    for event in log.events() {
        if let Some(profile) = profile_of.get(&event.player) {
            *per_profile.get_mut(profile.as_str()).expect("preset") += 1;
            total += 1;
        }
    }
    per_profile
        .into_iter()
        .map(|(name, c)| (name, if total == 0 { 0.0 } else { c as f64 / total as f64 }))
        .collect()
}

/// The participation-only split: casual players contribute at most the
/// median, frequent players more.
#[derive(Debug, Clone, Serialize)]
pub struct CasualFrequentSplit {
    pub participation_median: f64,
    pub casual: Vec<PlayerId>,
    pub frequent: Vec<PlayerId>,
}

impl CasualFrequentSplit {
    pub fn casual_set(&self) -> HashSet<&PlayerId> {
        self.casual.iter().collect()
    }

    pub fn frequent_set(&self) -> HashSet<&PlayerId> {
        self.frequent.iter().collect()
    }
}

pub fn casual_frequent_split(axes: &[PlayerAxes]) -> CasualFrequentSplit {
    let participation: Vec<f64> = axes.iter().map(|a| a.participation as f64).collect();
    let threshold = median(&participation);
    let mut casual = Vec::new();
    let mut frequent = Vec::new();
    for a in axes {
        if (a.participation as f64) > threshold {
            frequent.push(a.player.clone());
        } else {
            casual.push(a.player.clone());
        }
    }
    CasualFrequentSplit { participation_median: threshold, casual, frequent }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{CategorySet, ContributionEvent, RoundId, TaskId, Timestamp};
    use proptest::prelude::*;

    fn axes_of(points: &[(&str, u64, f64)]) -> Vec<PlayerAxes> {
        points
            .iter()
            .map(|&(p, participation, accuracy)| PlayerAxes {
                player: PlayerId::new(p),
                participation,
                accuracy,
            })
            .collect()
    }

    #[test]
    fn compute_axes_counts_all_events_and_reports_exclusions() {
        let events: Vec<ContributionEvent> = (0..20)
            .map(|i| ContributionEvent {
                timestamp: Timestamp(100 + i),
                player: PlayerId::new("p1"),
                round: RoundId::new(format!("r{i}")),
                task: TaskId::new(format!("t{i}")),
                answer: crate::ingest::CategoryId(0),
                control_truth: None,
            })
            .chain(std::iter::once(ContributionEvent {
                timestamp: Timestamp(500),
                player: PlayerId::new("p2"),
                round: RoundId::new("rx"),
                task: TaskId::new("tx"),
                answer: crate::ingest::CategoryId(0),
                control_truth: None,
            }))
            .collect();
        let log = EventLog::from_events(events, CategorySet::default_six()).unwrap();
        let accuracies = BTreeMap::from([(PlayerId::new("p1"), 0.9)]);
        let outcome = compute_axes(&log, &accuracies);
        assert_eq!(outcome.axes.len(), 1);
        assert_eq!(outcome.axes[0].participation, 20);
        assert_eq!(outcome.axes[0].accuracy, 0.9);
        assert_eq!(outcome.excluded_players, 1);
    }

    #[test]
    fn high_participation_high_accuracy_is_a_champion() {
        let thresholds = Thresholds { participation_median: 12.0, accuracy_median: 0.87 };
        let axes = axes_of(&[("p", 100, 0.95)]);
        let (assignments, _) = assign_profiles(&axes, Some(thresholds)).unwrap();
        assert_eq!(assignments[0].profile, Profile::Champion);
    }

    #[test]
    fn values_on_the_median_fall_into_the_low_half() {
        let thresholds = Thresholds { participation_median: 12.0, accuracy_median: 0.87 };
        let axes = axes_of(&[("p", 12, 0.87)]);
        let (assignments, _) = assign_profiles(&axes, Some(thresholds)).unwrap();
        assert_eq!(assignments[0].profile, Profile::Beginner);
    }

    #[test]
    fn a_single_player_is_its_own_beginner() {
        let axes = axes_of(&[("p", 40, 0.99)]);
        let (assignments, thresholds) = assign_profiles(&axes, None).unwrap();
        assert_eq!(thresholds.participation_median, 40.0);
        assert_eq!(assignments[0].profile, Profile::Beginner);
    }

    #[test]
    fn empty_population_is_an_error() {
        assert!(matches!(assign_profiles(&[], None), Err(ProfilesError::EmptyPopulation)));
    }

    #[test]
    fn symmetric_grid_splits_into_equal_quadrants() {
        // 10 x 10 grid of distinct participation/accuracy combinations.
        let mut axes = Vec::new();
        for p in 1..=10u64 {
            for a in 1..=10u32 {
                axes.push(PlayerAxes {
                    player: PlayerId::new(format!("p{p}_{a}")),
                    participation: p,
                    accuracy: a as f64 / 10.0,
                });
            }
        }
        let (assignments, _) = assign_profiles(&axes, None).unwrap();
        let distribution = profile_distribution(&assignments);
        for profile in Profile::ALL {
            assert_eq!(distribution.counts[profile.as_str()], 25, "{profile:?}");
            assert!((distribution.fractions[profile.as_str()] - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn distribution_fractions_sum_to_one() {
        let axes = axes_of(&[("a", 5, 0.5), ("b", 20, 0.9), ("c", 7, 0.95), ("d", 40, 0.2)]);
        let (assignments, _) = assign_profiles(&axes, None).unwrap();
        let distribution = profile_distribution(&assignments);
        let sum: f64 = distribution.fractions.values().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contribution_share_of_a_champion_only_log_is_one() {
        let events: Vec<ContributionEvent> = (0..6)
            .map(|i| ContributionEvent {
                timestamp: Timestamp(100 + i),
                player: PlayerId::new("p1"),
                round: RoundId::new("r"),
                task: TaskId::new(format!("t{i}")),
                answer: crate::ingest::CategoryId(0),
                control_truth: None,
            })
            .collect();
        let log = EventLog::from_events(events, CategorySet::default_six()).unwrap();
        let assignments = vec![ProfileAssignment {
            player: PlayerId::new("p1"),
            participation: 6,
            accuracy: 1.0,
            profile: Profile::Champion,
        }];
        let shares = contribution_share(&assignments, &log);
        assert_eq!(shares["Champion"], 1.0);
        let sum: f64 = shares.values().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn casual_frequent_split_uses_the_median_boundary() {
        let axes = axes_of(&[("a", 5, 0.5), ("b", 12, 0.5), ("c", 40, 0.5)]);
        let split = casual_frequent_split(&axes);
        assert_eq!(split.participation_median, 12.0);
        assert_eq!(split.casual.len(), 2); // 5 and 12 (equal goes low)
        assert_eq!(split.frequent.len(), 1);
    }

    #[test]
    fn all_equal_participation_means_everyone_is_casual() {
        let axes = axes_of(&[("a", 7, 0.5), ("b", 7, 0.9), ("c", 7, 0.2)]);
        let split = casual_frequent_split(&axes);
        assert_eq!(split.casual.len(), 3);
        assert!(split.frequent.is_empty());
    }

    #[test]
    fn two_player_split_has_one_of_each() {
        let axes = axes_of(&[("a", 1, 0.5), ("b", 100, 0.5)]);
        let split = casual_frequent_split(&axes);
        assert_eq!(split.casual.len(), 1);
        assert_eq!(split.frequent.len(), 1);
    }

    proptest! {
        // Raising the accuracy threshold can only push players toward the
        // low-accuracy profiles, never out of them.
        #[test]
        fn raising_accuracy_threshold_is_monotone(
            participation in 1u64..100,
            accuracy in 0.0f64..1.0,
            threshold_a in 0.0f64..1.0,
            delta in 0.0f64..0.5,
        ) {
            let base = Thresholds { participation_median: 50.0, accuracy_median: threshold_a };
            let raised = Thresholds { participation_median: 50.0, accuracy_median: threshold_a + delta };
            let before = quadrant(participation, accuracy, base);
            let after = quadrant(participation, accuracy, raised);
            let went_up = matches!(before, Profile::Troll | Profile::Beginner)
                && matches!(after, Profile::Sniper | Profile::Champion);
            prop_assert!(!went_up);
        }

        #[test]
        fn shares_always_sum_to_one(
            points in proptest::collection::vec((1u64..50, 0.0f64..1.0), 1..40)
        ) {
            let axes: Vec<PlayerAxes> = points
                .iter()
                .enumerate()
                .map(|(i, &(p, a))| PlayerAxes {
                    player: PlayerId::new(format!("p{i:03}")),
                    participation: p,
                    accuracy: a,
                })
                .collect();
            let (assignments, _) = assign_profiles(&axes, None).unwrap();
            let distribution = profile_distribution(&assignments);
            let sum: f64 = distribution.fractions.values().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }

        // With tie-free participation values the two split halves differ by
        // at most one player.
        #[test]
        fn tie_free_split_is_balanced(n in 1usize..30) {
            let axes: Vec<PlayerAxes> = (0..n)
                .map(|i| PlayerAxes {
                    player: PlayerId::new(format!("p{i:03}")),
                    participation: (i as u64 + 1) * 3, // distinct
                    accuracy: 0.5,
                })
                .collect();
            let split = casual_frequent_split(&axes);
            let diff = split.casual.len().abs_diff(split.frequent.len());
            prop_assert!(diff <= 1);
        }
    }
}
