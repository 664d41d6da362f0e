//! Casual-vs-frequent accuracy comparisons across incentive regimes, task
//! difficulty classes and task categories.
//!
//! The casual/frequent split always comes from the global participation
//! median; per-group accuracies are recomputed on the group's own events
//! (answers given in the regime, answers to tasks of the difficulty class,
//! answers to tasks of the category). Both the Welch t-test and the Wilcoxon
//! rank-sum test run for every comparison; a degenerate sample surfaces as a
//! per-comparison note instead of aborting the report.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ingest::{EventLog, Motivation, TaskId};
use crate::profiles::{casual_frequent_split, PlayerAxes};
use crate::truth::{player_accuracy_where, InferenceConfig, TaskResolution, TaskStatus};

use super::hypothesis::{welch_t, wilcoxon_rank_sum, TestResult};
use super::mean;

/// Which control variable the comparison slices on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupingKind {
    Incentive,
    Difficulty,
    Category,
}

impl GroupingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupingKind::Incentive => "incentive",
            GroupingKind::Difficulty => "difficulty",
            GroupingKind::Category => "category",
        }
    }
}

/// One group's casual/frequent contrast.
#[derive(Debug, Clone, Serialize)]
pub struct GroupComparison {
    pub group: String,
    pub casual_n: usize,
    pub frequent_n: usize,
    pub casual_mean: Option<f64>,
    pub frequent_mean: Option<f64>,
    pub welch: Option<TestResult>,
    pub welch_note: Option<String>,
    pub wilcoxon: Option<TestResult>,
    pub wilcoxon_note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub grouping: String,
    pub participation_median: f64,
    pub comparisons: Vec<GroupComparison>,
}

/// Run the casual/frequent comparison for one grouping.
pub fn compare_groups(
    log: &EventLog,
    resolutions: &BTreeMap<TaskId, TaskResolution>,
    axes: &[PlayerAxes],
    grouping: GroupingKind,
    inference: &InferenceConfig,
) -> ComparisonReport {
    let split = casual_frequent_split(axes);
    let casual = split.casual_set();
    let frequent = split.frequent_set();

    let groups: Vec<(String, Box<dyn Fn(usize, &crate::ingest::ContributionEvent) -> bool>)> =
        match grouping {
            GroupingKind::Incentive => [Motivation::Extrinsic, Motivation::Intrinsic]
                .into_iter()
                .map(|motivation| {
                    let keep: Box<dyn Fn(usize, &crate::ingest::ContributionEvent) -> bool> =
                        Box::new(move |i: usize, _: &crate::ingest::ContributionEvent| {
                            log.period_of(i)
                                .map(|p| log.periods().unwrap().periods()[p].motivation == motivation)
                                .unwrap_or(false)
                        });
                    (motivation.to_string(), keep)
                })
                .collect(),
            GroupingKind::Difficulty => {
                let minimum = inference.min_contributions;
                let easy: Box<dyn Fn(usize, &crate::ingest::ContributionEvent) -> bool> =
                    Box::new(move |_, e: &crate::ingest::ContributionEvent| {
                        resolutions
                            .get(&e.task)
                            .and_then(|r| r.difficulty)
                            .is_some_and(|d| d == minimum)
                    });
                let difficult: Box<dyn Fn(usize, &crate::ingest::ContributionEvent) -> bool> =
                    Box::new(move |_, e: &crate::ingest::ContributionEvent| {
                        resolutions
                            .get(&e.task)
                            .and_then(|r| r.difficulty)
                            .is_some_and(|d| d > minimum)
                    });
                vec![("easy".to_owned(), easy), ("difficult".to_owned(), difficult)]
            }
            GroupingKind::Category => log
                .categories()
                .ids()
                .map(|category| {
                    let keep: Box<dyn Fn(usize, &crate::ingest::ContributionEvent) -> bool> =
                        Box::new(move |_, e: &crate::ingest::ContributionEvent| {
                            let final_category = match e.control_truth {
                                Some(truth) => Some(truth),
                                None => resolutions
                                    .get(&e.task)
                                    .filter(|r| r.status == TaskStatus::Solved)
                                    .and_then(|r| r.final_category),
                            };
                            final_category == Some(category)
                        });
                    (log.categories().name(category).to_owned(), keep)
                })
                .collect(),
        };

    let comparisons = groups
        .into_iter()
        .map(|(name, keep)| {
            let accuracies = player_accuracy_where(log, resolutions, keep);
            let casual_sample: Vec<f64> = accuracies
                .iter()
                .filter_map(|(p, &a)| casual.contains(p).then_some(a))
                .collect();
            let frequent_sample: Vec<f64> = accuracies
                .iter()
                .filter_map(|(p, &a)| frequent.contains(p).then_some(a))
                .collect();

            let (welch, welch_note) = match welch_t(&casual_sample, &frequent_sample) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let (wilcoxon, wilcoxon_note) =
                match wilcoxon_rank_sum(&casual_sample, &frequent_sample) {
                    Ok(r) => (Some(r), None),
                    Err(e) => (None, Some(e.to_string())),
                };

            GroupComparison {
                group: name,
                casual_n: casual_sample.len(),
                frequent_n: frequent_sample.len(),
                casual_mean: (!casual_sample.is_empty()).then(|| mean(&casual_sample)),
                frequent_mean: (!frequent_sample.is_empty()).then(|| mean(&frequent_sample)),
                welch,
                welch_note,
                wilcoxon,
                wilcoxon_note,
            }
        })
        .collect();

    ComparisonReport {
        grouping: grouping.as_str().to_owned(),
        participation_median: split.participation_median,
        comparisons,
    }
}
