use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::catalog::{BehaviorId, Catalog, TaskId};
use crate::csp::{Priority, TerminationCause};
use crate::situation::{Scalar, SituationStore};
use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("scenario syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("script event {index}: {message}")]
    Event { index: usize, message: String },
    #[error("script event {index}: unknown task '{name}'")]
    UnknownTask { index: usize, name: String },
    #[error("script event {index}: unknown behavior '{name}'")]
    UnknownBehavior { index: usize, name: String },
    #[error("invalid duration {0}")]
    InvalidDuration(f64),
}

/// Scenario file as written.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub initial_situation: BTreeMap<String, Scalar>,
    /// Replay horizon in seconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    #[serde(default)]
    pub script: Vec<RawEvent>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEvent {
    pub at: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_task: Option<StartTask>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_task: Option<StopTask>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub behavior_finished: Option<BehaviorFinished>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_situation: Option<SetSituation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartTask {
    pub task: String,
    #[serde(default)]
    pub priority: Priority,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopTask {
    pub task: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorFinished {
    pub behavior: String,
    pub cause: TerminationCause,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSituation {
    pub key: String,
    pub value: Scalar,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioAction {
    StartTask {
        task: TaskId,
        priority: Priority,
    },
    StopTask {
        task: TaskId,
    },
    BehaviorFinished {
        behavior: BehaviorId,
        cause: TerminationCause,
    },
    SetSituation {
        key: String,
        value: Scalar,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioEvent {
    pub at: SimTime,
    pub action: ScenarioAction,
}

/// A scenario resolved against a catalog; events in time order.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub initial_situation: SituationStore,
    pub events: Vec<ScenarioEvent>,
    pub duration: Option<SimTime>,
}

impl Scenario {
    /// Replay end: the explicit duration, else the last event plus `delay`.
    pub fn horizon(&self, delay: Duration) -> SimTime {
        self.duration
            .unwrap_or_else(|| self.events.last().map_or(SimTime::ZERO, |e| e.at) + delay)
    }

    pub fn from_document(doc: &ScenarioDocument, catalog: &Catalog) -> Result<Self, ScenarioError> {
        let duration = match doc.duration {
            None => None,
            Some(d) => Some(SimTime::from_secs_f64(d).ok_or(ScenarioError::InvalidDuration(d))?),
        };
        let mut events = Vec::with_capacity(doc.script.len());
        for (index, raw) in doc.script.iter().enumerate() {
            events.push(resolve(index, raw, catalog)?);
        }
        events.sort_by_key(|e| e.at);
        Ok(Scenario {
            initial_situation: SituationStore::from_values(doc.initial_situation.clone()),
            events,
            duration,
        })
    }
}

fn resolve(
    index: usize,
    raw: &RawEvent,
    catalog: &Catalog,
) -> Result<ScenarioEvent, ScenarioError> {
    let at = SimTime::from_secs_f64(raw.at).ok_or_else(|| ScenarioError::Event {
        index,
        message: format!("invalid time {}", raw.at),
    })?;
    let task = |name: &str| {
        catalog
            .task_id(name)
            .ok_or_else(|| ScenarioError::UnknownTask {
                index,
                name: name.to_string(),
            })
    };
    let mut actions = Vec::new();
    if let Some(s) = &raw.start_task {
        actions.push(ScenarioAction::StartTask {
            task: task(&s.task)?,
            priority: s.priority,
        });
    }
    if let Some(s) = &raw.stop_task {
        actions.push(ScenarioAction::StopTask {
            task: task(&s.task)?,
        });
    }
    if let Some(f) = &raw.behavior_finished {
        let behavior =
            catalog
                .behavior_id(&f.behavior)
                .ok_or_else(|| ScenarioError::UnknownBehavior {
                    index,
                    name: f.behavior.clone(),
                })?;
        actions.push(ScenarioAction::BehaviorFinished {
            behavior,
            cause: f.cause,
        });
    }
    if let Some(s) = &raw.set_situation {
        actions.push(ScenarioAction::SetSituation {
            key: s.key.clone(),
            value: s.value.clone(),
        });
    }
    if actions.len() != 1 {
        return Err(ScenarioError::Event {
            index,
            message: format!("expected exactly one action, found {}", actions.len()),
        });
    }
    Ok(ScenarioEvent {
        at,
        action: actions.remove(0),
    })
}

pub fn parse_scenario_document(text: &str) -> Result<ScenarioDocument, ScenarioError> {
    if text.trim().is_empty() {
        return Ok(ScenarioDocument::default());
    }
    serde_yaml::from_str(text).map_err(|e| {
        let (line, column) = e
            .location()
            .map(|l| (l.line(), l.column()))
            .unwrap_or((0, 0));
        ScenarioError::Syntax {
            line,
            column,
            message: e.to_string(),
        }
    })
}

pub fn parse_scenario(text: &str, catalog: &Catalog) -> Result<Scenario, ScenarioError> {
    Scenario::from_document(&parse_scenario_document(text)?, catalog)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::testing::target_following;

    #[test]
    fn shipped_scenario_resolves() {
        let c = target_following();
        let s = parse_scenario(
            include_str!("../../data/target_following.scenario.yaml"),
            &c,
        )
        .unwrap();
        assert_eq!(s.events.len(), 4);
        assert_eq!(s.events[3].at, SimTime::from_millis(5500));
        assert_eq!(
            s.horizon(Duration::from_millis(500)),
            SimTime::from_millis(6000)
        );
        assert_eq!(
            s.initial_situation.get("target_near"),
            Some(&Scalar::Bool(false))
        );
    }

    #[test]
    fn events_are_stably_sorted() {
        let c = target_following();
        let text = "script:\n  - {at: 2, stop_task: {task: ApproachTarget}}\n  - {at: 1, start_task: {task: ApproachTarget}}\n  - {at: 2, start_task: {task: ApproachTarget, priority: 3}}\n";
        let s = parse_scenario(text, &c).unwrap();
        assert!(matches!(
            s.events[0].action,
            ScenarioAction::StartTask { priority: 0, .. }
        ));
        assert!(matches!(
            s.events[1].action,
            ScenarioAction::StopTask { .. }
        ));
        assert!(matches!(
            s.events[2].action,
            ScenarioAction::StartTask { priority: 3, .. }
        ));
    }

    #[test]
    fn rejects_bad_events() {
        let c = target_following();
        let unknown = parse_scenario("script:\n  - {at: 0, stop_task: {task: Nope}}\n", &c);
        assert!(matches!(unknown, Err(ScenarioError::UnknownTask { .. })));
        let two = "script:\n  - {at: 0, stop_task: {task: ApproachTarget}, set_situation: {key: a, value: 1}}\n";
        assert!(matches!(
            parse_scenario(two, &c),
            Err(ScenarioError::Event { .. })
        ));
        let none = parse_scenario("script:\n  - {at: 0}\n", &c);
        assert!(matches!(none, Err(ScenarioError::Event { .. })));
        let negative = parse_scenario(
            "script:\n  - {at: -1, stop_task: {task: ApproachTarget}}\n",
            &c,
        );
        assert!(matches!(negative, Err(ScenarioError::Event { .. })));
        let cause = parse_scenario(
            "script:\n  - {at: 0, behavior_finished: {behavior: PNPLocalizer, cause: MELTED}}\n",
            &c,
        );
        assert!(matches!(cause, Err(ScenarioError::Syntax { .. })));
        assert!(matches!(
            parse_scenario("bogus: 1\n", &c),
            Err(ScenarioError::Syntax { .. })
        ));
    }

    #[test]
    fn empty_text_is_empty_scenario() {
        let c = target_following();
        let s = parse_scenario("", &c).unwrap();
        assert!(s.events.is_empty());
        assert_eq!(
            s.horizon(Duration::from_millis(500)),
            SimTime::from_millis(500)
        );
    }
}
