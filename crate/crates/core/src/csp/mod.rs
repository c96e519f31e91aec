//! Constraint-satisfaction core: domains, propagation, value ordering,
//! performance evaluation and backtracking search with no-good learning.

mod check;
mod domain;
mod heuristics;
mod init;
mod network;
mod performance;
mod search;

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::catalog::{BehaviorId, Catalog, TaskId};

pub use check::{check_assignment, AssignmentViolation};
pub use domain::{Assignment, Domain, DomainTable};
pub use heuristics::order_values;
pub use init::{initialize_domains, situation_feasible_set, solve_scope};
pub use network::{propagate, propagate_from, revise_arc, Constraint, ConstraintNetwork};
pub use performance::{
    make_nogood, performance_upper_bound, performance_violations, required_set, task_performance,
    PerformanceViolation,
};
pub use search::{search, SearchContext, SearchOutcome};

/// Absolute tolerance for performance comparisons.
pub const PERFORMANCE_TOLERANCE: f64 = 1e-9;

pub(crate) fn meets(value: f64, threshold: f64) -> bool {
    value >= threshold - PERFORMANCE_TOLERANCE
}

/// One value of a task variable: inactive, or a candidate behavior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Inactive,
    Behavior(BehaviorId),
}

impl Value {
    pub fn behavior(self) -> Option<BehaviorId> {
        match self {
            Value::Inactive => None,
            Value::Behavior(b) => Some(b),
        }
    }

    pub fn is_active(self) -> bool {
        matches!(self, Value::Behavior(_))
    }

    pub fn display<'a>(self, catalog: &'a Catalog) -> ValueDisplay<'a> {
        ValueDisplay {
            value: self,
            catalog,
        }
    }
}

pub struct ValueDisplay<'a> {
    value: Value,
    catalog: &'a Catalog,
}

impl fmt::Display for ValueDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            Value::Inactive => f.write_str("-"),
            Value::Behavior(b) => f.write_str(self.catalog.behavior_name(b)),
        }
    }
}

/// A forbidden partial assignment. Entries are sorted by task.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NoGood {
    entries: Vec<(TaskId, Value)>,
}

impl NoGood {
    /// Returns `None` for an empty entry list.
    pub fn new(mut entries: Vec<(TaskId, Value)>) -> Option<Self> {
        if entries.is_empty() {
            return None;
        }
        entries.sort();
        entries.dedup();
        Some(Self { entries })
    }

    pub fn entries(&self) -> &[(TaskId, Value)] {
        &self.entries
    }

    /// True iff the total assignment contains every entry.
    pub fn matches(&self, assignment: &Assignment) -> bool {
        self.entries.iter().all(|&(t, v)| assignment.get(t) == v)
    }
}

/// Stored no-goods, deduplicated, scanned linearly.
#[derive(Debug, Clone, Default)]
pub struct NoGoodSet {
    items: Vec<NoGood>,
}

impl NoGoodSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false if the no-good was already stored.
    pub fn insert(&mut self, nogood: NoGood) -> bool {
        if self.items.contains(&nogood) {
            return false;
        }
        self.items.push(nogood);
        true
    }

    pub fn contains(&self, nogood: &NoGood) -> bool {
        self.items.contains(nogood)
    }

    pub fn iter(&self) -> impl Iterator<Item = &NoGood> {
        self.items.iter()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn rejects(&self, assignment: &Assignment) -> bool {
        self.items.iter().any(|n| n.matches(assignment))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TerminationCause {
    GoalAchieved,
    TimeOut,
    WrongProgress,
    SituationChange,
    ProcessFailure,
    Interrupted,
}

impl TerminationCause {
    pub const ALL: [TerminationCause; 6] = [
        TerminationCause::GoalAchieved,
        TerminationCause::TimeOut,
        TerminationCause::WrongProgress,
        TerminationCause::SituationChange,
        TerminationCause::ProcessFailure,
        TerminationCause::Interrupted,
    ];

    pub fn is_success(self) -> bool {
        self == TerminationCause::GoalAchieved
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TerminationCause::GoalAchieved => "GOAL_ACHIEVED",
            TerminationCause::TimeOut => "TIME_OUT",
            TerminationCause::WrongProgress => "WRONG_PROGRESS",
            TerminationCause::SituationChange => "SITUATION_CHANGE",
            TerminationCause::ProcessFailure => "PROCESS_FAILURE",
            TerminationCause::Interrupted => "INTERRUPTED",
        }
    }
}

impl fmt::Display for TerminationCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TerminationCause {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TerminationCause::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown termination cause '{s}'"))
    }
}

pub type Priority = u32;

/// Event that starts a coordination cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trigger {
    StartRequest {
        task: TaskId,
        priority: Priority,
    },
    StopRequest {
        task: TaskId,
    },
    BehaviorFinished {
        behavior: BehaviorId,
        cause: TerminationCause,
    },
}

impl Trigger {
    /// The task whose domain the trigger sets directly.
    pub fn task(&self, catalog: &Catalog) -> TaskId {
        match *self {
            Trigger::StartRequest { task, .. } | Trigger::StopRequest { task } => task,
            Trigger::BehaviorFinished { behavior, .. } => catalog.task_of(behavior),
        }
    }

    pub fn check(&self, catalog: &Catalog) -> Result<(), CspError> {
        match *self {
            Trigger::StartRequest { task, .. } | Trigger::StopRequest { task } => {
                if task.index() >= catalog.num_tasks() {
                    return Err(CspError::UnknownTask(task.to_string()));
                }
            }
            Trigger::BehaviorFinished { behavior, .. } => {
                if behavior.index() >= catalog.num_behaviors() {
                    return Err(CspError::UnknownBehavior(format!("#{}", behavior.index())));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_solutions: usize,
    pub max_search_time: Duration,
    pub seed: u64,
    pub reactive_delay: Duration,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_solutions: 10,
            max_search_time: Duration::from_millis(50),
            seed: 0,
            reactive_delay: Duration::from_millis(500),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), CspError> {
        if self.max_solutions == 0 {
            return Err(CspError::InvalidConfig("max_solutions must be at least 1"));
        }
        if self.max_search_time.is_zero() {
            return Err(CspError::InvalidConfig("max_search_time must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CspError {
    #[error("unknown task {0}")]
    UnknownTask(String),
    #[error("unknown behavior {0}")]
    UnknownBehavior(String),
    #[error("empty domain for task {0}")]
    EmptyDomain(String),
    #[error("task {0} is not running")]
    NotRunning(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),
}

#[cfg(test)]
pub(crate) mod testing;
