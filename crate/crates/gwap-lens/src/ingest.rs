//! Parsing, validation and indexing of raw GWAP contribution logs.
//!
//! The on-disk format is a UTF-8 CSV with header
//! `timestamp,player_id,round_id,task_id,answer,is_control,control_truth`
//! where `timestamp` is integer epoch seconds, `is_control` is `0`/`1` and
//! `control_truth` is non-empty exactly when `is_control` is `1`.
//!
//! A parsed [`EventLog`] is immutable and canonically ordered: events sort by
//! timestamp with ties broken lexicographically on (round, player, task), so
//! two parses of the same bytes always replay in the same order.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while parsing or validating a contribution log.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("line {line}: player {player} answered task {task} twice")]
    DuplicatePlayerTask { line: u64, player: PlayerId, task: TaskId },
    #[error("line {line}: control row without a control_truth value")]
    ControlWithoutTruth { line: u64 },
    #[error("line {line}: non-control row carries a control_truth value")]
    UnexpectedControlTruth { line: u64 },
    #[error("line {line}: unknown category {name:?}")]
    UnknownCategory { line: u64, name: String },
    #[error("category set needs at least two categories")]
    TooFewCategories,
    #[error("duplicate category name {0:?}")]
    DuplicateCategory(String),
    #[error("period {name:?} is empty or inverted (start {start}, end {end})")]
    InvalidPeriod { name: String, start: Timestamp, end: Timestamp },
    #[error("periods {a:?} and {b:?} overlap")]
    OverlappingPeriods { a: String, b: String },
    #[error("duplicate period name {0:?}")]
    DuplicatePeriodName(String),
    #[error("event at {timestamp} is covered by no period")]
    UncoveredTimestamp { timestamp: Timestamp },
    #[error("round {round} spans {span} s, more than the allowed {limit} s")]
    RoundSpanExceeded { round: RoundId, span: i64, limit: i64 },
    #[error("round {round} has {count} distinct players, at most 2 allowed")]
    RoundTooManyPlayers { round: RoundId, count: usize },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

macro_rules! opaque_id {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }
    };
}

opaque_id!(
    /// Opaque player identifier.
    PlayerId
);
opaque_id!(
    /// Opaque game-round identifier.
    RoundId
);
opaque_id!(
    /// Opaque task (image) identifier.
    TaskId
);

/// UTC instant with one-second resolution, stored as epoch seconds.
///
/// Sub-second log timestamps are rejected at parse time rather than
/// truncated: ordering must be reproducible from the bytes alone.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub fn secs(self) -> i64 {
        self.0
    }

    /// UTC day number (days since the epoch, floor division).
    pub fn day(self) -> i64 {
        self.0.div_euclid(86_400)
    }

    /// ISO-8601 date of the UTC day this instant falls in.
    pub fn iso_date(self) -> String {
        chrono::DateTime::from_timestamp(self.0, 0)
            .map(|dt| dt.format("%Y-%m-%d").to_string())
            .unwrap_or_else(|| format!("day{}", self.day()))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Index into a [`CategorySet`]; the closed label set of the classification task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CategoryId(pub u16);

/// The closed, ordered set of answer categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategorySet {
    names: Vec<String>,
    index: HashMap<String, CategoryId>,
}

impl CategorySet {
    pub fn new<I, S>(names: I) -> Result<Self, IngestError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() < 2 {
            return Err(IngestError::TooFewCategories);
        }
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), CategoryId(i as u16)).is_some() {
                return Err(IngestError::DuplicateCategory(name.clone()));
            }
        }
        Ok(Self { names, index })
    }

    /// The six default categories of the night-sky classification task.
    pub fn default_six() -> Self {
        Self::new(["Black", "City", "Stars", "Aurora", "ISS", "None"]).expect("static set")
    }

    pub fn id(&self, name: &str) -> Option<CategoryId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: CategoryId) -> &str {
        &self.names[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = CategoryId> + '_ {
        (0..self.names.len()).map(|i| CategoryId(i as u16))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Load from a TOML document with a single `categories = [...]` key.
    pub fn from_toml_str(text: &str) -> Result<Self, IngestError> {
        #[derive(Deserialize)]
        struct Raw {
            categories: Vec<String>,
        }
        let raw: Raw =
            toml::from_str(text).map_err(|e| IngestError::Config(format!("categories: {e}")))?;
        Self::new(raw.categories)
    }

    pub fn to_toml_string(&self) -> String {
        let mut out = String::from("categories = [");
        for (i, name) in self.names.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&format!("{name:?}"));
        }
        out.push_str("]\n");
        out
    }
}

/// Whether players act for fun or for a tangible reward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Motivation {
    Intrinsic,
    Extrinsic,
}

impl fmt::Display for Motivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Motivation::Intrinsic => f.write_str("intrinsic"),
            Motivation::Extrinsic => f.write_str("extrinsic"),
        }
    }
}

impl FromStr for Motivation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "intrinsic" => Ok(Motivation::Intrinsic),
            "extrinsic" => Ok(Motivation::Extrinsic),
            other => Err(format!("unknown motivation {other:?}")),
        }
    }
}

/// A named half-open time window `[start, end)` with its incentive regime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncentivePeriod {
    pub name: String,
    pub start: Timestamp,
    pub end: Timestamp,
    pub motivation: Motivation,
}

/// Validated, non-overlapping period configuration sorted by start time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodConfig {
    periods: Vec<IncentivePeriod>,
}

impl PeriodConfig {
    pub fn new(mut periods: Vec<IncentivePeriod>) -> Result<Self, IngestError> {
        for p in &periods {
            if p.start >= p.end {
                return Err(IngestError::InvalidPeriod {
                    name: p.name.clone(),
                    start: p.start,
                    end: p.end,
                });
            }
        }
        let mut names = HashSet::new();
        for p in &periods {
            if !names.insert(p.name.clone()) {
                return Err(IngestError::DuplicatePeriodName(p.name.clone()));
            }
        }
        periods.sort_by_key(|p| p.start);
        for pair in periods.windows(2) {
            if pair[1].start < pair[0].end {
                return Err(IngestError::OverlappingPeriods {
                    a: pair[0].name.clone(),
                    b: pair[1].name.clone(),
                });
            }
        }
        Ok(Self { periods })
    }

    pub fn periods(&self) -> &[IncentivePeriod] {
        &self.periods
    }

    pub fn index_of(&self, ts: Timestamp) -> Option<usize> {
        self.periods.iter().position(|p| p.start <= ts && ts < p.end)
    }

    pub fn by_name(&self, name: &str) -> Option<&IncentivePeriod> {
        self.periods.iter().find(|p| p.name == name)
    }

    /// Load from a TOML document with repeated `[[period]]` tables.
    pub fn from_toml_str(text: &str) -> Result<Self, IngestError> {
        #[derive(Deserialize)]
        struct Raw {
            period: Vec<IncentivePeriod>,
        }
        let raw: Raw =
            toml::from_str(text).map_err(|e| IngestError::Config(format!("periods: {e}")))?;
        Self::new(raw.period)
    }

    pub fn to_toml_string(&self) -> String {
        let mut out = String::new();
        for p in &self.periods {
            out.push_str("[[period]]\n");
            out.push_str(&format!("name = {:?}\n", p.name));
            out.push_str(&format!("start = {}\n", p.start.secs()));
            out.push_str(&format!("end = {}\n", p.end.secs()));
            out.push_str(&format!("motivation = \"{}\"\n\n", p.motivation));
        }
        out
    }
}

/// One player answer to one task in one round; the atomic log record.
///
/// `control_truth` is `Some` exactly on control tasks, so the
/// control-implies-truth invariant is structural rather than checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContributionEvent {
    pub timestamp: Timestamp,
    pub player: PlayerId,
    pub round: RoundId,
    pub task: TaskId,
    pub answer: CategoryId,
    pub control_truth: Option<CategoryId>,
}

impl ContributionEvent {
    pub fn is_control(&self) -> bool {
        self.control_truth.is_some()
    }

    fn sort_key(&self) -> (Timestamp, &RoundId, &PlayerId, &TaskId) {
        (self.timestamp, &self.round, &self.player, &self.task)
    }
}

/// A reconstructed game round: its members, start instant and nominal length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    pub id: RoundId,
    pub players: Vec<PlayerId>,
    pub start: Timestamp,
    pub duration_secs: u32,
}

/// Round reconstruction policy: nominal round length plus a grace allowance
/// for network delay before a round is rejected as over-long.
#[derive(Debug, Clone, Copy)]
pub struct RoundPolicy {
    pub duration_secs: u32,
    pub grace_secs: u32,
}

impl Default for RoundPolicy {
    fn default() -> Self {
        Self { duration_secs: 60, grace_secs: 5 }
    }
}

/// A validated, canonically ordered contribution log.
///
/// Construction goes through [`parse_log`] (or [`EventLog::from_events`]),
/// after which the log is immutable. [`assign_periods`] and [`build_rounds`]
/// enrich it with the period labelling and the round index; all later
/// analysis stages read it concurrently without further mutation.
#[derive(Debug, Clone)]
pub struct EventLog {
    events: Vec<ContributionEvent>,
    categories: CategorySet,
    periods: Option<PeriodConfig>,
    event_period: Vec<u16>,
    rounds: Vec<RoundRecord>,
    round_index: HashMap<RoundId, u32>,
}

impl EventLog {
    /// Build a log from in-memory events, enforcing the same invariants as
    /// the CSV parser (never-twice rule, canonical ordering).
    pub fn from_events(
        mut events: Vec<ContributionEvent>,
        categories: CategorySet,
    ) -> Result<Self, IngestError> {
        let mut seen: HashSet<(PlayerId, TaskId)> = HashSet::with_capacity(events.len());
        for e in &events {
            if !seen.insert((e.player.clone(), e.task.clone())) {
                return Err(IngestError::DuplicatePlayerTask {
                    line: 0,
                    player: e.player.clone(),
                    task: e.task.clone(),
                });
            }
        }
        events.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        Ok(Self {
            events,
            categories,
            periods: None,
            event_period: Vec::new(),
            rounds: Vec::new(),
            round_index: HashMap::new(),
        })
    }

    pub fn events(&self) -> &[ContributionEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn categories(&self) -> &CategorySet {
        &self.categories
    }

    pub fn periods(&self) -> Option<&PeriodConfig> {
        self.periods.as_ref()
    }

    /// Period index of event `i`, if periods were assigned.
    pub fn period_of(&self, i: usize) -> Option<usize> {
        self.event_period.get(i).map(|&p| p as usize)
    }

    pub fn rounds(&self) -> &[RoundRecord] {
        &self.rounds
    }

    pub fn round(&self, id: &RoundId) -> Option<&RoundRecord> {
        self.round_index.get(id).map(|&i| &self.rounds[i as usize])
    }

    pub fn players(&self) -> Vec<PlayerId> {
        let mut players: Vec<PlayerId> = self
            .events
            .iter()
            .map(|e| e.player.clone())
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        players.sort();
        players
    }
}

/// Parse a contribution CSV into a validated, canonically sorted [`EventLog`].
pub fn parse_log<R: io::Read>(reader: R, categories: CategorySet) -> Result<EventLog, IngestError> {
    const HEADER: [&str; 7] = [
        "timestamp",
        "player_id",
        "round_id",
        "task_id",
        "answer",
        "is_control",
        "control_truth",
    ];

    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let headers = csv_reader
        .headers()
        .map_err(|e| IngestError::MalformedRow { line: 1, reason: e.to_string() })?
        .clone();
    if headers.iter().map(str::trim).ne(HEADER.iter().copied()) {
        return Err(IngestError::MalformedRow {
            line: 1,
            reason: format!("expected header {:?}", HEADER.join(",")),
        });
    }

    let mut events = Vec::new();
    let mut seen: HashSet<(PlayerId, TaskId)> = HashSet::new();
    for (idx, record) in csv_reader.records().enumerate() {
        let line = idx as u64 + 2; // 1-based, after the header
        let record = record.map_err(|e| IngestError::MalformedRow { line, reason: e.to_string() })?;
        if record.len() != 7 {
            return Err(IngestError::MalformedRow {
                line,
                reason: format!("expected 7 columns, found {}", record.len()),
            });
        }

        let ts_raw = record[0].trim();
        let timestamp = ts_raw
            .parse::<i64>()
            .map(Timestamp)
            .map_err(|_| IngestError::MalformedRow {
                line,
                reason: format!("timestamp {ts_raw:?} is not integer epoch seconds"),
            })?;

        let player = PlayerId::new(record[1].trim());
        let round = RoundId::new(record[2].trim());
        let task = TaskId::new(record[3].trim());
        if player.as_str().is_empty() || round.as_str().is_empty() || task.as_str().is_empty() {
            return Err(IngestError::MalformedRow {
                line,
                reason: "empty player_id, round_id or task_id".into(),
            });
        }

        let answer_raw = record[4].trim();
        let answer = categories.id(answer_raw).ok_or_else(|| IngestError::UnknownCategory {
            line,
            name: answer_raw.to_owned(),
        })?;

        let is_control = match record[5].trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(IngestError::MalformedRow {
                    line,
                    reason: format!("is_control must be 0 or 1, found {other:?}"),
                })
            }
        };

        let truth_raw = record[6].trim();
        let control_truth = match (is_control, truth_raw.is_empty()) {
            (true, true) => return Err(IngestError::ControlWithoutTruth { line }),
            (false, false) => return Err(IngestError::UnexpectedControlTruth { line }),
            (false, true) => None,
            (true, false) => Some(categories.id(truth_raw).ok_or_else(|| {
                IngestError::UnknownCategory { line, name: truth_raw.to_owned() }
            })?),
        };

        if !seen.insert((player.clone(), task.clone())) {
            return Err(IngestError::DuplicatePlayerTask { line, player, task });
        }

        events.push(ContributionEvent { timestamp, player, round, task, answer, control_truth });
    }

    events.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(EventLog {
        events,
        categories,
        periods: None,
        event_period: Vec::new(),
        rounds: Vec::new(),
        round_index: HashMap::new(),
    })
}

/// Serialize a log back to the contribution CSV format.
///
/// Inverse of [`parse_log`]: parsing the output yields an identical log.
pub fn serialize_log<W: io::Write>(log: &EventLog, writer: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "timestamp",
        "player_id",
        "round_id",
        "task_id",
        "answer",
        "is_control",
        "control_truth",
    ])
    .map_err(io_from_csv)?;
    for e in &log.events {
        w.write_record([
            e.timestamp.to_string().as_str(),
            e.player.as_str(),
            e.round.as_str(),
            e.task.as_str(),
            log.categories.name(e.answer),
            if e.is_control() { "1" } else { "0" },
            e.control_truth.map(|c| log.categories.name(c)).unwrap_or(""),
        ])
        .map_err(io_from_csv)?;
    }
    w.flush()?;
    Ok(())
}

fn io_from_csv(e: csv::Error) -> IngestError {
    IngestError::Io(io::Error::other(e))
}

/// Label every event with its incentive period.
///
/// Periods must cover every event timestamp; event count and content are
/// untouched, only the labelling is added.
pub fn assign_periods(mut log: EventLog, periods: PeriodConfig) -> Result<EventLog, IngestError> {
    let mut labels = Vec::with_capacity(log.events.len());
    for e in &log.events {
        match periods.index_of(e.timestamp) {
            Some(i) => labels.push(i as u16),
            None => return Err(IngestError::UncoveredTimestamp { timestamp: e.timestamp }),
        }
    }
    log.periods = Some(periods);
    log.event_period = labels;
    Ok(log)
}

/// Reconstruct round records from the events they contain.
///
/// The log format carries no explicit round table, so a round's start is its
/// earliest contribution and its nominal duration comes from `policy`.
pub fn build_rounds(mut log: EventLog, policy: RoundPolicy) -> Result<EventLog, IngestError> {
    let mut by_round: HashMap<&RoundId, (Timestamp, Timestamp, HashSet<&PlayerId>)> =
        HashMap::new();
    for e in &log.events {
        let entry = by_round
            .entry(&e.round)
            .or_insert_with(|| (e.timestamp, e.timestamp, HashSet::new()));
        entry.0 = entry.0.min(e.timestamp);
        entry.1 = entry.1.max(e.timestamp);
        entry.2.insert(&e.player);
    }

    let limit = policy.duration_secs as i64 + policy.grace_secs as i64;
    let mut rounds = Vec::with_capacity(by_round.len());
    for (id, (start, end, players)) in by_round {
        let span = end.secs() - start.secs();
        if span > limit {
            return Err(IngestError::RoundSpanExceeded { round: id.clone(), span, limit });
        }
        if players.len() > 2 {
            return Err(IngestError::RoundTooManyPlayers {
                round: id.clone(),
                count: players.len(),
            });
        }
        let mut players: Vec<PlayerId> = players.into_iter().cloned().collect();
        players.sort();
        rounds.push(RoundRecord {
            id: id.clone(),
            players,
            start,
            duration_secs: policy.duration_secs,
        });
    }
    rounds.sort_by(|a, b| (a.start, &a.id).cmp(&(b.start, &b.id)));

    let round_index =
        rounds.iter().enumerate().map(|(i, r)| (r.id.clone(), i as u32)).collect();
    log.rounds = rounds;
    log.round_index = round_index;
    Ok(log)
}

/// Non-fatal consistency findings over a prepared log.
///
/// Overlapping rounds for one player are reported here rather than rejected:
/// the game contract does not forbid them outright, but they usually signal
/// clock problems upstream.
pub fn validate_log(log: &EventLog) -> Vec<String> {
    let mut warnings = Vec::new();

    // One player appearing in two rounds whose windows overlap.
    let mut per_player: HashMap<&PlayerId, Vec<(Timestamp, i64, &RoundId)>> = HashMap::new();
    for r in &log.rounds {
        for p in &r.players {
            per_player.entry(p).or_default().push((r.start, r.duration_secs as i64, &r.id));
        }
    }
    let mut players: Vec<_> = per_player.keys().copied().collect();
    players.sort();
    for p in players {
        let mut spans = per_player[p].clone();
        spans.sort();
        for pair in spans.windows(2) {
            let (start_a, dur_a, id_a) = pair[0];
            let (start_b, _, id_b) = pair[1];
            if start_b.secs() < start_a.secs() + dur_a {
                warnings.push(format!(
                    "player {p} appears in overlapping rounds {id_a} and {id_b}"
                ));
            }
        }
    }

    // A task served both as control and as a regular task.
    let mut control_tasks: HashSet<&TaskId> = HashSet::new();
    let mut regular_tasks: HashSet<&TaskId> = HashSet::new();
    for e in &log.events {
        if e.is_control() {
            control_tasks.insert(&e.task);
        } else {
            regular_tasks.insert(&e.task);
        }
    }
    let mut mixed: Vec<_> = control_tasks.intersection(&regular_tasks).collect();
    mixed.sort();
    for t in mixed {
        warnings.push(format!("task {t} appears both as control and as regular task"));
    }

    warnings
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cats() -> CategorySet {
        CategorySet::default_six()
    }

    fn csv_of(rows: &[&str]) -> String {
        let mut s =
            String::from("timestamp,player_id,round_id,task_id,answer,is_control,control_truth\n");
        for r in rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }

    #[test]
    fn parses_and_sorts_by_timestamp() {
        let text = csv_of(&[
            "300,p2,r1,t3,City,0,",
            "100,p1,r1,t1,Stars,0,",
            "200,p1,r1,t2,City,0,",
        ]);
        let log = parse_log(text.as_bytes(), cats()).unwrap();
        assert_eq!(log.len(), 3);
        let ts: Vec<i64> = log.events().iter().map(|e| e.timestamp.secs()).collect();
        assert_eq!(ts, vec![100, 200, 300]);
    }

    #[test]
    fn tie_break_is_lexicographic_on_round_player_task() {
        let text = csv_of(&[
            "100,p2,r2,t1,City,0,",
            "100,p1,r1,t9,City,0,",
            "100,p1,r1,t2,City,0,",
        ]);
        let log = parse_log(text.as_bytes(), cats()).unwrap();
        let keys: Vec<(String, String)> = log
            .events()
            .iter()
            .map(|e| (e.round.to_string(), e.task.to_string()))
            .collect();
        assert_eq!(
            keys,
            vec![
                ("r1".into(), "t2".into()),
                ("r1".into(), "t9".into()),
                ("r2".into(), "t1".into())
            ]
        );
    }

    #[test]
    fn control_without_truth_is_rejected() {
        let text = csv_of(&["100,p1,r1,t1,City,1,"]);
        let err = parse_log(text.as_bytes(), cats()).unwrap_err();
        assert!(matches!(err, IngestError::ControlWithoutTruth { line: 2 }));
    }

    #[test]
    fn truth_on_regular_row_is_rejected() {
        let text = csv_of(&["100,p1,r1,t1,City,0,Stars"]);
        let err = parse_log(text.as_bytes(), cats()).unwrap_err();
        assert!(matches!(err, IngestError::UnexpectedControlTruth { line: 2 }));
    }

    #[test]
    fn duplicate_player_task_is_rejected() {
        let text = csv_of(&["100,p1,r1,t9,City,0,", "200,p1,r2,t9,Stars,0,"]);
        let err = parse_log(text.as_bytes(), cats()).unwrap_err();
        match err {
            IngestError::DuplicatePlayerTask { player, task, .. } => {
                assert_eq!(player.as_str(), "p1");
                assert_eq!(task.as_str(), "t9");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unknown_category_is_a_hard_error() {
        let text = csv_of(&["100,p1,r1,t1,Nebula,0,"]);
        let err = parse_log(text.as_bytes(), cats()).unwrap_err();
        assert!(matches!(err, IngestError::UnknownCategory { .. }));
    }

    #[test]
    fn fractional_timestamp_is_rejected_not_truncated() {
        let text = csv_of(&["100.25,p1,r1,t1,City,0,"]);
        let err = parse_log(text.as_bytes(), cats()).unwrap_err();
        assert!(matches!(err, IngestError::MalformedRow { line: 2, .. }));
    }

    #[test]
    fn wrong_column_count_is_malformed() {
        let text = csv_of(&["100,p1,r1,t1,City,0"]);
        let err = parse_log(text.as_bytes(), cats()).unwrap_err();
        assert!(matches!(err, IngestError::MalformedRow { line: 2, .. }));
    }

    #[test]
    fn round_trip_preserves_bytes() {
        let text = csv_of(&[
            "100,p1,r1,t1,Stars,0,",
            "100,p2,r1,t1,City,0,",
            "160,p1,r2,t2,ISS,1,ISS",
        ]);
        let log = parse_log(text.as_bytes(), cats()).unwrap();
        let mut out = Vec::new();
        serialize_log(&log, &mut out).unwrap();
        let log2 = parse_log(out.as_slice(), cats()).unwrap();
        let mut out2 = Vec::new();
        serialize_log(&log2, &mut out2).unwrap();
        assert_eq!(out, out2);
        assert_eq!(log.events(), log2.events());
    }

    fn day(d: i64) -> Timestamp {
        Timestamp(d * 86_400)
    }

    fn two_period_config() -> PeriodConfig {
        PeriodConfig::new(vec![
            IncentivePeriod {
                name: "before".into(),
                start: day(0),
                end: day(30),
                motivation: Motivation::Intrinsic,
            },
            IncentivePeriod {
                name: "during".into(),
                start: day(30),
                end: day(60),
                motivation: Motivation::Extrinsic,
            },
        ])
        .unwrap()
    }

    #[test]
    fn assign_periods_labels_events() {
        let text = csv_of(&[
            &format!("{},p1,r1,t1,City,0,", day(10).secs()),
            &format!("{},p1,r2,t2,City,0,", day(40).secs()),
        ]);
        let log = parse_log(text.as_bytes(), cats()).unwrap();
        let log = assign_periods(log, two_period_config()).unwrap();
        let names: Vec<&str> = (0..log.len())
            .map(|i| log.periods().unwrap().periods()[log.period_of(i).unwrap()].name.as_str())
            .collect();
        assert_eq!(names, vec!["before", "during"]);
        assert_eq!(log.len(), 2);
    }

    #[test]
    fn overlapping_periods_are_rejected() {
        let err = PeriodConfig::new(vec![
            IncentivePeriod {
                name: "a".into(),
                start: day(0),
                end: day(30),
                motivation: Motivation::Intrinsic,
            },
            IncentivePeriod {
                name: "b".into(),
                start: day(20),
                end: day(50),
                motivation: Motivation::Extrinsic,
            },
        ])
        .unwrap_err();
        assert!(matches!(err, IngestError::OverlappingPeriods { .. }));
    }

    #[test]
    fn uncovered_timestamp_is_rejected() {
        let text = csv_of(&[&format!("{},p1,r1,t1,City,0,", day(99).secs())]);
        let log = parse_log(text.as_bytes(), cats()).unwrap();
        let err = assign_periods(log, two_period_config()).unwrap_err();
        assert!(matches!(err, IngestError::UncoveredTimestamp { .. }));
    }

    #[test]
    fn night_knights_shaped_periods_partition_events() {
        // Four months before, one month during, four months after.
        let month = 30 * 86_400;
        let config = PeriodConfig::new(vec![
            IncentivePeriod {
                name: "before".into(),
                start: Timestamp(0),
                end: Timestamp(4 * month),
                motivation: Motivation::Intrinsic,
            },
            IncentivePeriod {
                name: "during".into(),
                start: Timestamp(4 * month),
                end: Timestamp(5 * month),
                motivation: Motivation::Extrinsic,
            },
            IncentivePeriod {
                name: "after".into(),
                start: Timestamp(5 * month),
                end: Timestamp(9 * month),
                motivation: Motivation::Intrinsic,
            },
        ])
        .unwrap();
        let rows: Vec<String> = (0..9)
            .map(|m| format!("{},p{m},r{m},t{m},City,0,", m * month + 1000))
            .collect();
        let text = csv_of(&rows.iter().map(String::as_str).collect::<Vec<_>>());
        let log = parse_log(text.as_bytes(), cats()).unwrap();
        let log = assign_periods(log, config).unwrap();
        let mut counts = [0usize; 3];
        for i in 0..log.len() {
            counts[log.period_of(i).unwrap()] += 1;
        }
        assert_eq!(counts, [4, 1, 4]);
        assert_eq!(counts.iter().sum::<usize>(), log.len());
    }

    #[test]
    fn build_rounds_groups_members() {
        let text = csv_of(&[
            "100,p1,r1,t1,City,0,",
            "110,p2,r1,t1,City,0,",
            "120,p1,r1,t2,Stars,0,",
            "130,p2,r1,t2,Stars,0,",
            "155,p1,r1,t3,City,0,",
        ]);
        let log = parse_log(text.as_bytes(), cats()).unwrap();
        let log = build_rounds(log, RoundPolicy::default()).unwrap();
        assert_eq!(log.rounds().len(), 1);
        let r = &log.rounds()[0];
        assert_eq!(r.start.secs(), 100);
        assert_eq!(r.players.len(), 2);
    }

    #[test]
    fn over_long_round_is_rejected() {
        let text = csv_of(&["100,p1,r1,t1,City,0,", "400,p1,r1,t2,Stars,0,"]);
        let log = parse_log(text.as_bytes(), cats()).unwrap();
        let err = build_rounds(log, RoundPolicy::default()).unwrap_err();
        assert!(matches!(err, IngestError::RoundSpanExceeded { span: 300, .. }));
    }

    #[test]
    fn three_player_round_is_rejected() {
        let text = csv_of(&[
            "100,p1,r1,t1,City,0,",
            "101,p2,r1,t2,City,0,",
            "102,p3,r1,t3,City,0,",
        ]);
        let log = parse_log(text.as_bytes(), cats()).unwrap();
        let err = build_rounds(log, RoundPolicy::default()).unwrap_err();
        assert!(matches!(err, IngestError::RoundTooManyPlayers { count: 3, .. }));
    }

    #[test]
    fn empty_log_builds_no_rounds() {
        let text = csv_of(&[]);
        let log = parse_log(text.as_bytes(), cats()).unwrap();
        let log = build_rounds(log, RoundPolicy::default()).unwrap();
        assert!(log.rounds().is_empty());
    }

    #[test]
    fn overlapping_player_rounds_warn_but_pass() {
        let text = csv_of(&[
            "100,p1,r1,t1,City,0,",
            "130,p1,r2,t2,City,0,",
        ]);
        let log = parse_log(text.as_bytes(), cats()).unwrap();
        let log = build_rounds(log, RoundPolicy::default()).unwrap();
        let warnings = validate_log(&log);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("overlapping rounds"));
    }

    #[test]
    fn category_set_rejects_duplicates_and_tiny_sets() {
        assert!(matches!(
            CategorySet::new(["A", "A"]).unwrap_err(),
            IngestError::DuplicateCategory(_)
        ));
        assert!(matches!(CategorySet::new(["A"]).unwrap_err(), IngestError::TooFewCategories));
    }

    #[test]
    fn period_config_toml_round_trip() {
        let config = two_period_config();
        let parsed = PeriodConfig::from_toml_str(&config.to_toml_string()).unwrap();
        assert_eq!(config, parsed);
    }

    #[test]
    fn category_set_toml_round_trip() {
        let set = cats();
        let parsed = CategorySet::from_toml_str(&set.to_toml_string()).unwrap();
        assert_eq!(set, parsed);
    }
}
