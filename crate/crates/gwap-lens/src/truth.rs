//! Incremental reliability-weighted truth inference.
//!
//! The solver replays a log strictly in event order. Control answers update a
//! per-player, per-round reliability estimate; regular answers enter their
//! task's weighted tally at the contributor's current reliability; after each
//! vote a stopping rule decides whether the task is solved, abandoned, or
//! still open. Once a task reaches a terminal state, later contributions are
//! recorded for accuracy bookkeeping but never alter the outcome.
//!
//! Reliability is the Laplace-smoothed control accuracy
//! `(correct + alpha) / (seen + 2 * alpha)`, so it always stays inside (0, 1).
//! A contributor with no controls yet in scope is weighted at the
//! uninformative prior, which equals the smoothed empty ratio.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{CategoryId, CategorySet, ContributionEvent, EventLog, PlayerId, RoundId, TaskId, Timestamp};

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("invalid inference config: {0}")]
    InvalidConfig(String),
}

/// Whether reliability counters reset every round or accumulate for the
/// whole log. The round-specific reading is the default; the game never
/// states whether estimates carry over, so both are available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReliabilityScope {
    #[default]
    PerRound,
    Cumulative,
}

/// Tuning knobs of the incremental solver.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct InferenceConfig {
    /// Laplace smoothing constant for the reliability ratio.
    pub alpha: f64,
    /// Minimum distinct contributors before a task may be solved.
    pub min_contributions: u32,
    /// Contribution cap after which an unsolved task is abandoned.
    pub max_contributions: u32,
    /// Weight fraction the leading category must reach, in (0.5, 1].
    pub agreement_threshold: f64,
    /// Weight used before a contributor has answered any control in scope.
    pub prior_reliability: f64,
    pub reliability_scope: ReliabilityScope,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            min_contributions: 4,
            max_contributions: 17,
            agreement_threshold: 0.75,
            prior_reliability: 0.5,
            reliability_scope: ReliabilityScope::PerRound,
        }
    }
}

impl InferenceConfig {
    pub fn validate(&self) -> Result<(), InferenceError> {
        if !(self.alpha > 0.0) {
            return Err(InferenceError::InvalidConfig("alpha must be > 0".into()));
        }
        if self.min_contributions < 1 {
            return Err(InferenceError::InvalidConfig("min_contributions must be >= 1".into()));
        }
        if self.max_contributions < self.min_contributions {
            return Err(InferenceError::InvalidConfig(
                "max_contributions must be >= min_contributions".into(),
            ));
        }
        if !(self.agreement_threshold > 0.5 && self.agreement_threshold <= 1.0) {
            return Err(InferenceError::InvalidConfig(
                "agreement_threshold must be in (0.5, 1]".into(),
            ));
        }
        if !(self.prior_reliability > 0.0 && self.prior_reliability < 1.0) {
            return Err(InferenceError::InvalidConfig(
                "prior_reliability must be in (0, 1)".into(),
            ));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self, InferenceError> {
        let config: Self =
            toml::from_str(text).map_err(|e| InferenceError::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> String {
        let scope = match self.reliability_scope {
            ReliabilityScope::PerRound => "per_round",
            ReliabilityScope::Cumulative => "cumulative",
        };
        format!(
            "alpha = {}\nmin_contributions = {}\nmax_contributions = {}\n\
             agreement_threshold = {}\nprior_reliability = {}\nreliability_scope = \"{scope}\"\n",
            self.alpha,
            self.min_contributions,
            self.max_contributions,
            self.agreement_threshold,
            self.prior_reliability,
        )
    }
}

/// Control-answer bookkeeping for one player in one reliability scope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReliabilitySnapshot {
    pub player: PlayerId,
    pub round: Option<RoundId>,
    pub controls_seen: u32,
    pub controls_correct: u32,
}

impl ReliabilitySnapshot {
    pub fn new(player: PlayerId, round: Option<RoundId>) -> Self {
        Self { player, round, controls_seen: 0, controls_correct: 0 }
    }

    /// Smoothed control accuracy `(correct + a) / (seen + 2a)`.
    pub fn reliability(&self, alpha: f64) -> f64 {
        (self.controls_correct as f64 + alpha) / (self.controls_seen as f64 + 2.0 * alpha)
    }
}

/// Record one control outcome and return the updated snapshot.
pub fn update_reliability(
    mut snapshot: ReliabilitySnapshot,
    control_correct: bool,
) -> ReliabilitySnapshot {
    snapshot.controls_seen += 1;
    if control_correct {
        snapshot.controls_correct += 1;
    }
    snapshot
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskStatus {
    Pending,
    Solved,
    Unresolved,
}

impl TaskStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskStatus::Pending => "pending",
            TaskStatus::Solved => "solved",
            TaskStatus::Unresolved => "unresolved",
        }
    }
}

/// Final state of one task after the replay.
///
/// Control tasks are solved by their known truth: they carry no difficulty
/// and no solve instant, and stay out of difficulty statistics. For regular
/// tasks `difficulty` equals `contributions_used` at the solve instant;
/// contributions arriving after a terminal state are not counted here.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskResolution {
    pub task: TaskId,
    pub status: TaskStatus,
    pub final_category: Option<CategoryId>,
    pub contributions_used: u32,
    pub distinct_players: u32,
    pub solved_at: Option<Timestamp>,
    pub difficulty: Option<u32>,
    pub resolved_by_control: bool,
}

/// Outcome of the stopping rule after one more contribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decision {
    Continue,
    Solve(CategoryId),
    GiveUp,
}

/// Decide whether the tally settles the task.
///
/// Solve requires at least `min_contributions` distinct contributors, a
/// unique heaviest category, and that category holding at least
/// `agreement_threshold` of the total weight. Failing that, the task is
/// abandoned once the contribution cap is reached.
pub fn stopping_rule(
    tally: &BTreeMap<CategoryId, f64>,
    distinct_players: u32,
    contributions_used: u32,
    config: &InferenceConfig,
) -> Decision {
    let total: f64 = tally.values().sum();
    if total > 0.0 && distinct_players >= config.min_contributions {
        let max_weight = tally.values().cloned().fold(f64::MIN, f64::max);
        let mut leaders = tally.iter().filter(|(_, &w)| w == max_weight);
        let leader = leaders.next().map(|(&c, _)| c);
        let unique = leaders.next().is_none();
        if let (Some(category), true) = (leader, unique) {
            if max_weight / total >= config.agreement_threshold {
                return Decision::Solve(category);
            }
        }
    }
    if contributions_used >= config.max_contributions {
        Decision::GiveUp
    } else {
        Decision::Continue
    }
}

#[derive(Debug, Clone)]
struct TaskState {
    tally: BTreeMap<CategoryId, f64>,
    contributors: HashSet<PlayerId>,
    contributions: u32,
    status: TaskStatus,
    final_category: Option<CategoryId>,
    solved_at: Option<Timestamp>,
    difficulty: Option<u32>,
    control_truth: Option<CategoryId>,
}

impl TaskState {
    fn new() -> Self {
        Self {
            tally: BTreeMap::new(),
            contributors: HashSet::new(),
            contributions: 0,
            status: TaskStatus::Pending,
            final_category: None,
            solved_at: None,
            difficulty: None,
            control_truth: None,
        }
    }

    fn resolution(&self, task: &TaskId) -> TaskResolution {
        TaskResolution {
            task: task.clone(),
            status: self.status,
            final_category: self.final_category,
            contributions_used: self.contributions,
            distinct_players: self.contributors.len() as u32,
            solved_at: self.solved_at,
            difficulty: self.difficulty,
            resolved_by_control: self.control_truth.is_some(),
        }
    }
}

/// Mutable replay state: reliability counters plus per-task tallies.
#[derive(Debug, Clone)]
pub struct InferenceState {
    config: InferenceConfig,
    reliability: HashMap<(PlayerId, Option<RoundId>), (u32, u32)>,
    tasks: HashMap<TaskId, TaskState>,
}

impl InferenceState {
    pub fn new(config: InferenceConfig) -> Self {
        Self { config, reliability: HashMap::new(), tasks: HashMap::new() }
    }

    pub fn config(&self) -> &InferenceConfig {
        &self.config
    }

    fn scope_key(&self, event: &ContributionEvent) -> (PlayerId, Option<RoundId>) {
        match self.config.reliability_scope {
            ReliabilityScope::PerRound => (event.player.clone(), Some(event.round.clone())),
            ReliabilityScope::Cumulative => (event.player.clone(), None),
        }
    }

    /// Current weight of a contributor, before `event` is applied.
    pub fn weight_of(&self, event: &ContributionEvent) -> f64 {
        match self.reliability.get(&self.scope_key(event)) {
            None | Some((0, _)) => self.config.prior_reliability,
            Some(&(seen, correct)) => {
                (correct as f64 + self.config.alpha) / (seen as f64 + 2.0 * self.config.alpha)
            }
        }
    }

    /// Feed one event, in log order. Returns the task's new resolution when
    /// this event moved it into a terminal state.
    pub fn ingest_contribution(&mut self, event: &ContributionEvent) -> Option<TaskResolution> {
        if let Some(truth) = event.control_truth {
            let key = self.scope_key(event);
            let counters = self.reliability.entry(key).or_insert((0, 0));
            counters.0 += 1;
            if event.answer == truth {
                counters.1 += 1;
            }

            let state = self.tasks.entry(event.task.clone()).or_insert_with(TaskState::new);
            let first_control = state.control_truth.is_none();
            // A control task is settled by its known truth, never by votes.
            state.control_truth = Some(truth);
            state.status = TaskStatus::Solved;
            state.final_category = Some(truth);
            state.solved_at = None;
            state.difficulty = None;
            state.tally.clear();
            state.contributors.insert(event.player.clone());
            state.contributions += 1;
            return first_control.then(|| state.resolution(&event.task));
        }

        let weight = self.weight_of(event);
        let state = self.tasks.entry(event.task.clone()).or_insert_with(TaskState::new);
        if state.status != TaskStatus::Pending || state.control_truth.is_some() {
            // Late contribution: visible to accuracy statistics via the log,
            // frozen out of the tally and the counters.
            return None;
        }

        *state.tally.entry(event.answer).or_insert(0.0) += weight;
        state.contributors.insert(event.player.clone());
        state.contributions += 1;

        match stopping_rule(
            &state.tally,
            state.contributors.len() as u32,
            state.contributions,
            &self.config,
        ) {
            Decision::Continue => None,
            Decision::Solve(category) => {
                state.status = TaskStatus::Solved;
                state.final_category = Some(category);
                state.solved_at = Some(event.timestamp);
                state.difficulty = Some(state.contributions);
                Some(state.resolution(&event.task))
            }
            Decision::GiveUp => {
                state.status = TaskStatus::Unresolved;
                Some(state.resolution(&event.task))
            }
        }
    }

    /// Reliability snapshot for one scope key, if any controls were seen.
    pub fn snapshot(&self, player: &PlayerId, round: Option<&RoundId>) -> Option<ReliabilitySnapshot> {
        let key = (player.clone(), round.cloned());
        self.reliability.get(&key).map(|&(seen, correct)| ReliabilitySnapshot {
            player: player.clone(),
            round: round.cloned(),
            controls_seen: seen,
            controls_correct: correct,
        })
    }

    fn into_resolutions(self) -> BTreeMap<TaskId, TaskResolution> {
        self.tasks.into_iter().map(|(task, state)| {
            let resolution = state.resolution(&task);
            (task, resolution)
        }).collect()
    }
}

/// Replay the whole log and return the resolution of every touched task.
///
/// A pure function of the (sorted) log and the config: replays always agree.
pub fn resolve_all(
    log: &EventLog,
    config: &InferenceConfig,
) -> Result<BTreeMap<TaskId, TaskResolution>, InferenceError> {
    config.validate()?;
    let mut state = InferenceState::new(*config);
    for event in log.events() {
        state.ingest_contribution(event);
    }
    Ok(state.into_resolutions())
}

/// Per-player accuracy against the inferred solutions.
///
/// A task counts for a player when it has a final solution: control tasks
/// count against their known truth, unresolved and still-pending tasks count
/// for nobody. Players with no resolvable task played get no entry.
pub fn player_accuracy(
    log: &EventLog,
    resolutions: &BTreeMap<TaskId, TaskResolution>,
) -> BTreeMap<PlayerId, f64> {
    player_accuracy_where(log, resolutions, |_, _| true)
}

/// [`player_accuracy`] restricted to the events admitted by `keep`.
///
/// The filter receives the event index and the event, so callers can slice
/// by period, by the task's difficulty class, or by final category.
pub fn player_accuracy_where<F>(
    log: &EventLog,
    resolutions: &BTreeMap<TaskId, TaskResolution>,
    keep: F,
) -> BTreeMap<PlayerId, f64>
where
    F: Fn(usize, &ContributionEvent) -> bool,
{
    let mut played: BTreeMap<PlayerId, (u32, u32)> = BTreeMap::new();
    for (i, event) in log.events().iter().enumerate() {
        if !keep(i, event) {
            continue;
        }
        let final_category = match event.control_truth {
            Some(truth) => Some(truth),
            None => resolutions
                .get(&event.task)
                .filter(|r| r.status == TaskStatus::Solved)
                .and_then(|r| r.final_category),
        };
        let Some(final_category) = final_category else { continue };
        let entry = played.entry(event.player.clone()).or_insert((0, 0));
        entry.0 += 1;
        if event.answer == final_category {
            entry.1 += 1;
        }
    }
    played
        .into_iter()
        .map(|(player, (total, correct))| (player, correct as f64 / total as f64))
        .collect()
}

/// Serialize resolutions to the export CSV
/// `task_id,status,final_category,contributions_used,distinct_players,difficulty,solved_at`.
pub fn resolutions_to_csv(
    resolutions: &BTreeMap<TaskId, TaskResolution>,
    categories: &CategorySet,
) -> String {
    let mut out = String::from(
        "task_id,status,final_category,contributions_used,distinct_players,difficulty,solved_at\n",
    );
    for (task, r) in resolutions {
        let category = r.final_category.map(|c| categories.name(c)).unwrap_or("");
        let difficulty = r.difficulty.map(|d| d.to_string()).unwrap_or_default();
        let solved_at = r.solved_at.map(|t| t.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{task},{status},{category},{used},{players},{difficulty},{solved_at}\n",
            status = r.status.as_str(),
            used = r.contributions_used,
            players = r.distinct_players,
        ));
    }
    out
}
