//! Classical GWAP indicators and their per-period breakdowns.
//!
//! Definitions are fixed as ratios of the same underlying totals, so the
//! identity `EC = throughput * ALP / 60` holds exactly per period:
//!
//! * play time: (player, round) participations times the nominal round
//!   length — the one-minute approximation, since the log carries no session
//!   telemetry. A two-player round contributes twice its duration.
//! * throughput: tasks solved in the period per hour of play time.
//! * ALP: play-time minutes per distinct active user.
//! * EC: tasks solved per distinct active user.
//!
//! A solved task belongs to the period of its solve instant; a round belongs
//! to the period of its start; a user is active in every period they
//! contributed in, so per-period user counts may overlap.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::ingest::{EventLog, Motivation, PlayerId, RoundId, TaskId, Timestamp};
use crate::truth::TaskResolution;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("throughput is undefined without play time")]
    ZeroPlayTime,
    #[error("per-user metrics are undefined without users")]
    NoUsers,
}

/// Which part of the log a metric covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slice<'a> {
    All,
    Period(&'a str),
    Motivation(Motivation),
}

impl Slice<'_> {
    fn admits(&self, log: &EventLog, ts: Timestamp) -> bool {
        match self {
            Slice::All => true,
            Slice::Period(name) => log
                .periods()
                .and_then(|c| c.index_of(ts))
                .map(|i| log.periods().unwrap().periods()[i].name == *name)
                .unwrap_or(false),
            Slice::Motivation(m) => log
                .periods()
                .and_then(|c| c.index_of(ts))
                .map(|i| log.periods().unwrap().periods()[i].motivation == *m)
                .unwrap_or(false),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Slice::All => "all".to_owned(),
            Slice::Period(name) => (*name).to_owned(),
            Slice::Motivation(m) => m.to_string(),
        }
    }
}

/// Human play time in hours: participations times round duration.
///
/// Rounds must have been built; a round counts toward the period containing
/// its start.
pub fn play_time_hours(log: &EventLog, slice: Slice) -> f64 {
    let mut seconds = 0u64;
    for round in log.rounds() {
        if slice.admits(log, round.start) {
            seconds += round.players.len() as u64 * round.duration_secs as u64;
        }
    }
    seconds as f64 / 3600.0
}

/// Players with at least one contribution in the slice.
pub fn distinct_users(log: &EventLog, slice: Slice) -> u32 {
    let mut users: HashSet<&PlayerId> = HashSet::new();
    for event in log.events() {
        if slice.admits(log, event.timestamp) {
            users.insert(&event.player);
        }
    }
    users.len() as u32
}

/// Vote-solved tasks whose solve instant falls in the slice. Control tasks
/// have no solve instant and never count as classified images.
pub fn solved_tasks(
    log: &EventLog,
    resolutions: &BTreeMap<TaskId, TaskResolution>,
    slice: Slice,
) -> u32 {
    resolutions
        .values()
        .filter(|r| r.solved_at.is_some_and(|ts| slice.admits(log, ts)))
        .count() as u32
}

/// Contribution events in the slice: `(total, control_only)`.
pub fn contributions(log: &EventLog, slice: Slice) -> (u64, u64) {
    let mut total = 0u64;
    let mut control = 0u64;
    for event in log.events() {
        if slice.admits(log, event.timestamp) {
            total += 1;
            if event.is_control() {
                control += 1;
            }
        }
    }
    (total, control)
}

pub fn throughput_from_totals(solved: u64, play_time_hours: f64) -> Result<f64, MetricsError> {
    if play_time_hours <= 0.0 {
        return Err(MetricsError::ZeroPlayTime);
    }
    Ok(solved as f64 / play_time_hours)
}

pub fn alp_from_totals(play_time_hours: f64, users: u64) -> Result<f64, MetricsError> {
    if users == 0 {
        return Err(MetricsError::NoUsers);
    }
    Ok(play_time_hours * 60.0 / users as f64)
}

pub fn ec_from_totals(solved: u64, users: u64) -> Result<f64, MetricsError> {
    if users == 0 {
        return Err(MetricsError::NoUsers);
    }
    Ok(solved as f64 / users as f64)
}

/// Tasks solved per hour of play time in the slice.
pub fn throughput(
    log: &EventLog,
    resolutions: &BTreeMap<TaskId, TaskResolution>,
    slice: Slice,
) -> Result<f64, MetricsError> {
    throughput_from_totals(solved_tasks(log, resolutions, slice) as u64, play_time_hours(log, slice))
}

/// Average play minutes per user in the slice.
pub fn alp_minutes(log: &EventLog, slice: Slice) -> Result<f64, MetricsError> {
    alp_from_totals(play_time_hours(log, slice), distinct_users(log, slice) as u64)
}

/// Average solved tasks per user in the slice.
pub fn ec(
    log: &EventLog,
    resolutions: &BTreeMap<TaskId, TaskResolution>,
    slice: Slice,
) -> Result<f64, MetricsError> {
    ec_from_totals(
        solved_tasks(log, resolutions, slice) as u64,
        distinct_users(log, slice) as u64,
    )
}

/// One column of the metrics table.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodMetrics {
    pub period: String,
    pub classified_images: u32,
    pub contributions: u64,
    pub control_contributions: u64,
    pub users: u32,
    pub total_play_time_hours: f64,
    pub throughput_per_hour: Option<f64>,
    pub alp_minutes_per_user: Option<f64>,
    pub ec_tasks_per_user: Option<f64>,
}

/// Compose every indicator for one slice; ratios with empty denominators
/// come back as `None` instead of failing the whole table.
pub fn period_metrics(
    log: &EventLog,
    resolutions: &BTreeMap<TaskId, TaskResolution>,
    slice: Slice,
) -> PeriodMetrics {
    let solved = solved_tasks(log, resolutions, slice);
    let (total, control) = contributions(log, slice);
    let users = distinct_users(log, slice);
    let play = play_time_hours(log, slice);
    PeriodMetrics {
        period: slice.label(),
        classified_images: solved,
        contributions: total,
        control_contributions: control,
        users,
        total_play_time_hours: play,
        throughput_per_hour: throughput_from_totals(solved as u64, play).ok(),
        alp_minutes_per_user: alp_from_totals(play, users as u64).ok(),
        ec_tasks_per_user: ec_from_totals(solved as u64, users as u64).ok(),
    }
}

/// Distribution of images answered per (player, round) participation.
#[derive(Debug, Clone, Serialize)]
pub struct SpeedHistogram {
    /// images-answered bucket -> number of participations
    pub buckets: BTreeMap<u32, u32>,
    pub participations: u32,
    pub median: f64,
    pub mean: f64,
}

/// Contribution speed: images (control ones included) answered by each
/// player in each round. A participation belongs to the period of its
/// round's start.
pub fn contribution_speed(log: &EventLog, slice: Slice) -> SpeedHistogram {
    let mut admitted_rounds: HashSet<&RoundId> = HashSet::new();
    for round in log.rounds() {
        if slice.admits(log, round.start) {
            admitted_rounds.insert(&round.id);
        }
    }
    let mut per_cell: BTreeMap<(&RoundId, &PlayerId), u32> = BTreeMap::new();
    for event in log.events() {
        if admitted_rounds.contains(&event.round) {
            *per_cell.entry((&event.round, &event.player)).or_insert(0) += 1;
        }
    }
    let counts: Vec<u32> = per_cell.into_values().collect();
    let mut buckets: BTreeMap<u32, u32> = BTreeMap::new();
    for &c in &counts {
        *buckets.entry(c).or_insert(0) += 1;
    }
    let as_f64: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    SpeedHistogram {
        participations: counts.len() as u32,
        median: if as_f64.is_empty() { 0.0 } else { crate::stats::median(&as_f64) },
        mean: if as_f64.is_empty() { 0.0 } else { crate::stats::mean(&as_f64) },
        buckets,
    }
}

/// One calendar day of solve counts.
#[derive(Debug, Clone, Serialize)]
pub struct DailySolved {
    pub date: String,
    pub day: i64,
    pub solved: u32,
    pub period: Option<String>,
}

/// Tasks solved per UTC day over the whole log span, zero-filled so that
/// quiet days are explicit. The series sums to the total solved count.
pub fn daily_solved_series(
    log: &EventLog,
    resolutions: &BTreeMap<TaskId, TaskResolution>,
) -> Vec<DailySolved> {
    if log.is_empty() {
        return Vec::new();
    }
    let first_day = log.events().first().unwrap().timestamp.day();
    let last_day = log.events().last().unwrap().timestamp.day();

    let mut per_day: BTreeMap<i64, u32> = BTreeMap::new();
    for r in resolutions.values() {
        if let Some(ts) = r.solved_at {
            *per_day.entry(ts.day()).or_insert(0) += 1;
        }
    }

    (first_day..=last_day)
        .map(|day| {
            let start = Timestamp(day * 86_400);
            let period = log
                .periods()
                .and_then(|c| c.index_of(start))
                .map(|i| log.periods().unwrap().periods()[i].name.clone());
            DailySolved {
                date: start.iso_date(),
                day,
                solved: per_day.get(&day).copied().unwrap_or(0),
                period,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{
        assign_periods, build_rounds, CategoryId, CategorySet, ContributionEvent, EventLog,
        IncentivePeriod, PeriodConfig, RoundPolicy,
    };
    use crate::truth::{resolve_all, InferenceConfig};

    const CITY: CategoryId = CategoryId(1);

    fn vote(ts: i64, player: &str, round: &str, task: &str) -> ContributionEvent {
        ContributionEvent {
            timestamp: Timestamp(ts),
            player: PlayerId::new(player),
            round: RoundId::new(round),
            task: TaskId::new(task),
            answer: CITY,
            control_truth: None,
        }
    }

    fn prepared(events: Vec<ContributionEvent>) -> EventLog {
        let log = EventLog::from_events(events, CategorySet::default_six()).unwrap();
        let periods = PeriodConfig::new(vec![
            IncentivePeriod {
                name: "before".into(),
                start: Timestamp(0),
                end: Timestamp(50_000),
                motivation: Motivation::Intrinsic,
            },
            IncentivePeriod {
                name: "during".into(),
                start: Timestamp(50_000),
                end: Timestamp(1_000_000_000),
                motivation: Motivation::Extrinsic,
            },
        ])
        .unwrap();
        let log = assign_periods(log, periods).unwrap();
        build_rounds(log, RoundPolicy::default()).unwrap()
    }

    #[test]
    fn ten_two_player_rounds_are_a_third_of_an_hour() {
        let mut events = Vec::new();
        for r in 0..10 {
            let base = r * 100;
            events.push(vote(base, "p1", &format!("r{r}"), &format!("ta{r}")));
            events.push(vote(base + 1, "p2", &format!("r{r}"), &format!("tb{r}")));
        }
        let log = prepared(events);
        let hours = play_time_hours(&log, Slice::All);
        assert!((hours - 1200.0 / 3600.0).abs() < 1e-12);
    }

    #[test]
    fn empty_slice_has_zero_play_time() {
        let log = prepared(vec![vote(100, "p1", "r1", "t1")]);
        assert_eq!(play_time_hours(&log, Slice::Period("during")), 0.0);
    }

    #[test]
    fn throughput_is_solved_over_hours() {
        assert_eq!(throughput_from_totals(10, 2.0).unwrap(), 5.0);
        assert_eq!(throughput_from_totals(0, 1.0).unwrap(), 0.0);
        assert!(matches!(throughput_from_totals(5, 0.0), Err(MetricsError::ZeroPlayTime)));
    }

    #[test]
    fn alp_is_minutes_per_user() {
        assert_eq!(alp_from_totals(0.5, 2).unwrap(), 15.0);
        // A single user in a single one-minute round.
        assert!((alp_from_totals(1.0 / 60.0, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(alp_from_totals(1.0, 0), Err(MetricsError::NoUsers)));
    }

    // The headline table rows reproduce from their own totals: 24,600 solved
    // by 174 users is 141.4 tasks/user, 1,830 by 285 is 6.42.
    #[test]
    fn ec_matches_the_reported_ratios() {
        assert!((ec_from_totals(24_600, 174).unwrap() - 141.4).abs() < 0.05);
        assert!((ec_from_totals(1_830, 285).unwrap() - 6.42).abs() < 0.005);
        assert_eq!(ec_from_totals(0, 7).unwrap(), 0.0);
    }

    // The printed throughput for the same column is not derivable from its
    // own rows; the ratio definition gives 24,600 / 471 = 52.2 tasks/hour.
    #[test]
    fn throughput_of_the_reported_totals_is_the_plain_ratio() {
        let value = throughput_from_totals(24_600, 471.0).unwrap();
        assert!((value - 52.2).abs() < 0.05);
    }

    #[test]
    fn ec_equals_throughput_times_alp_over_sixty() {
        let mut events = Vec::new();
        // Two periods, a handful of rounds, four-vote solved tasks.
        for r in 0..6 {
            let base = r * 9000; // straddles the period boundary at 50k
            for v in 0..4 {
                events.push(vote(base + v, &format!("p{v}"), &format!("r{r}"), &format!("t{r}")));
            }
        }
        let log = prepared(events);
        let resolutions = resolve_all(&log, &InferenceConfig::default()).unwrap();
        for slice in [Slice::All, Slice::Period("before"), Slice::Period("during")] {
            let m = period_metrics(&log, &resolutions, slice);
            if let (Some(thr), Some(alp), Some(ec)) =
                (m.throughput_per_hour, m.alp_minutes_per_user, m.ec_tasks_per_user)
            {
                if ec > 0.0 {
                    let relative = (ec - thr * alp / 60.0).abs() / ec;
                    assert!(relative < 1e-9, "identity broken in {}", m.period);
                }
            }
        }
    }

    #[test]
    fn per_period_totals_add_up() {
        let mut events = Vec::new();
        for r in 0..8 {
            let base = r * 9000;
            for v in 0..4 {
                events.push(vote(base + v, &format!("p{v}"), &format!("r{r}"), &format!("t{r}")));
            }
        }
        let log = prepared(events);
        let resolutions = resolve_all(&log, &InferenceConfig::default()).unwrap();
        let all = period_metrics(&log, &resolutions, Slice::All);
        let before = period_metrics(&log, &resolutions, Slice::Period("before"));
        let during = period_metrics(&log, &resolutions, Slice::Period("during"));

        assert_eq!(before.classified_images + during.classified_images, all.classified_images);
        assert_eq!(before.contributions + during.contributions, all.contributions);
        assert!(
            (before.total_play_time_hours + during.total_play_time_hours
                - all.total_play_time_hours)
                .abs()
                < 1e-12
        );
        assert!(before.users + during.users >= all.users);
    }

    #[test]
    fn speed_histogram_of_one_full_round() {
        let events: Vec<ContributionEvent> =
            (0..15).map(|i| vote(100 + i, "p1", "r1", &format!("t{i}"))).collect();
        let log = prepared(events);
        let h = contribution_speed(&log, Slice::All);
        assert_eq!(h.buckets, BTreeMap::from([(15, 1)]));
        assert_eq!(h.median, 15.0);
        assert_eq!(h.participations, 1);
    }

    #[test]
    fn motivation_slice_selects_rounds_by_regime() {
        let events = vec![
            vote(100, "p1", "r1", "t1"),
            vote(60_000, "p1", "r2", "t2"),
            vote(60_001, "p2", "r2", "t3"),
        ];
        let log = prepared(events);
        let intrinsic = contribution_speed(&log, Slice::Motivation(Motivation::Intrinsic));
        let extrinsic = contribution_speed(&log, Slice::Motivation(Motivation::Extrinsic));
        assert_eq!(intrinsic.participations, 1);
        assert_eq!(extrinsic.participations, 2);
    }

    #[test]
    fn daily_series_is_zero_filled_and_conserves_totals() {
        let mut events = Vec::new();
        // Solved task on day 0 and day 3; nothing between.
        for (day, r) in [(0i64, "r1"), (3, "r2")] {
            for v in 0..4 {
                events.push(ContributionEvent {
                    timestamp: Timestamp(day * 86_400 + 30_000 + v),
                    player: PlayerId::new(format!("p{v}")),
                    round: RoundId::new(r),
                    task: TaskId::new(format!("t{r}")),
                    answer: CITY,
                    control_truth: None,
                });
            }
        }
        let log = EventLog::from_events(events, CategorySet::default_six()).unwrap();
        let resolutions = resolve_all(&log, &InferenceConfig::default()).unwrap();
        let series = daily_solved_series(&log, &resolutions);
        assert_eq!(series.len(), 4);
        let total: u32 = series.iter().map(|d| d.solved).sum();
        assert_eq!(total, 2);
        assert_eq!(series[1].solved, 0);
        assert_eq!(series[2].solved, 0);
    }

    #[test]
    fn empty_log_has_an_empty_series() {
        let log = EventLog::from_events(Vec::new(), CategorySet::default_six()).unwrap();
        let resolutions = BTreeMap::new();
        assert!(daily_solved_series(&log, &resolutions).is_empty());
    }
}
