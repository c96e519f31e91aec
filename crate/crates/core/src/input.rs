//! Parsing of one-shot solver inputs: state files and trigger arguments.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::csp::{
    check_assignment, Assignment, Priority, SolverConfig, TerminationCause, Trigger, Value,
};
use crate::situation::{Scalar, SituationStore};
use crate::state::CoordinatorState;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InputError {
    #[error("state syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown task '{0}'")]
    UnknownTask(String),
    #[error("unknown behavior '{0}'")]
    UnknownBehavior(String),
    #[error("task '{0}' has more than one active behavior")]
    DuplicateActive(String),
    #[error("state is inconsistent: {0}")]
    Inconsistent(String),
    #[error("bad trigger: {0}")]
    Trigger(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDocument {
    #[serde(default)]
    pub situation: BTreeMap<String, Scalar>,
    #[serde(default)]
    pub active: Vec<String>,
    #[serde(default)]
    pub requests: Vec<RequestSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestSpec {
    pub task: String,
    #[serde(default)]
    pub priority: Priority,
}

pub fn parse_state_document(text: &str) -> Result<StateDocument, InputError> {
    if text.trim().is_empty() {
        return Ok(StateDocument::default());
    }
    serde_yaml::from_str(text).map_err(|e| {
        let (line, column) = e
            .location()
            .map(|l| (l.line(), l.column()))
            .unwrap_or((0, 0));
        InputError::Syntax {
            line,
            column,
            message: e.to_string(),
        }
    })
}

impl StateDocument {
    /// Coordinator state for `catalog`; the active set must be consistent.
    pub fn resolve(
        &self,
        catalog: &Catalog,
        config: SolverConfig,
    ) -> Result<CoordinatorState, InputError> {
        let situation = SituationStore::from_values(self.situation.clone());
        let mut current = Assignment::inactive(catalog.num_tasks());
        for name in &self.active {
            let b = catalog
                .behavior_id(name)
                .ok_or_else(|| InputError::UnknownBehavior(name.clone()))?;
            let t = catalog.task_of(b);
            if current.is_running(t) {
                return Err(InputError::DuplicateActive(
                    catalog.task_name(t).to_string(),
                ));
            }
            current.set(t, Value::Behavior(b));
        }
        if let Some(v) = check_assignment(&current, catalog, &situation).first() {
            return Err(InputError::Inconsistent(v.describe(catalog)));
        }
        let mut state = CoordinatorState::new(catalog, situation, config);
        state.current = current;
        for r in &self.requests {
            let t = catalog
                .task_id(&r.task)
                .ok_or_else(|| InputError::UnknownTask(r.task.clone()))?;
            state.add_request(t, r.priority);
        }
        Ok(state)
    }
}

pub fn parse_state(
    text: &str,
    catalog: &Catalog,
    config: SolverConfig,
) -> Result<CoordinatorState, InputError> {
    parse_state_document(text)?.resolve(catalog, config)
}

/// Unresolved trigger as typed on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TriggerSpec {
    Start {
        task: String,
        priority: Priority,
    },
    Stop {
        task: String,
    },
    Finished {
        behavior: String,
        cause: TerminationCause,
    },
}

/// `start TASK [--priority N]`, `stop TASK`, `finished BEHAVIOR [--cause C]`.
/// A missing cause means GOAL_ACHIEVED.
pub fn parse_trigger_args<S: AsRef<str>>(args: &[S]) -> Result<TriggerSpec, InputError> {
    let args: Vec<&str> = args.iter().map(AsRef::as_ref).collect();
    let err = |m: &str| InputError::Trigger(m.to_string());
    let (&verb, rest) = args
        .split_first()
        .ok_or_else(|| err("missing trigger kind"))?;
    let (&name, mut opts) = rest.split_first().ok_or_else(|| err("missing name"))?;
    if name.starts_with("--") {
        return Err(err("missing name"));
    }
    let mut priority = None;
    let mut cause = None;
    while let Some((&flag, tail)) = opts.split_first() {
        let Some((&value, tail)) = tail.split_first() else {
            return Err(InputError::Trigger(format!("{flag} needs a value")));
        };
        match flag {
            "--priority" | "-p" => {
                let p = value.parse::<Priority>();
                priority =
                    Some(p.map_err(|_| InputError::Trigger(format!("bad priority '{value}'")))?);
            }
            "--cause" | "-c" => {
                cause = Some(
                    value
                        .parse::<TerminationCause>()
                        .map_err(InputError::Trigger)?,
                )
            }
            other => {
                return Err(InputError::Trigger(format!(
                    "unexpected argument '{other}'"
                )))
            }
        }
        opts = tail;
    }
    let spec = match verb {
        "start" if cause.is_none() => TriggerSpec::Start {
            task: name.to_string(),
            priority: priority.unwrap_or(0),
        },
        "stop" if cause.is_none() && priority.is_none() => TriggerSpec::Stop {
            task: name.to_string(),
        },
        "finished" if priority.is_none() => TriggerSpec::Finished {
            behavior: name.to_string(),
            cause: cause.unwrap_or(TerminationCause::GoalAchieved),
        },
        "start" | "stop" | "finished" => return Err(err("option not valid for this trigger")),
        other => {
            return Err(InputError::Trigger(format!(
                "unknown trigger kind '{other}'"
            )))
        }
    };
    Ok(spec)
}

impl TriggerSpec {
    pub fn resolve(&self, catalog: &Catalog) -> Result<Trigger, InputError> {
        let task = |n: &str| {
            catalog
                .task_id(n)
                .ok_or_else(|| InputError::UnknownTask(n.to_string()))
        };
        Ok(match self {
            TriggerSpec::Start { task: t, priority } => Trigger::StartRequest {
                task: task(t)?,
                priority: *priority,
            },
            TriggerSpec::Stop { task: t } => Trigger::StopRequest { task: task(t)? },
            TriggerSpec::Finished { behavior, cause } => Trigger::BehaviorFinished {
                behavior: catalog
                    .behavior_id(behavior)
                    .ok_or_else(|| InputError::UnknownBehavior(behavior.clone()))?,
                cause: *cause,
            },
        })
    }
}

pub fn parse_trigger<S: AsRef<str>>(args: &[S], catalog: &Catalog) -> Result<Trigger, InputError> {
    parse_trigger_args(args)?.resolve(catalog)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::testing::{aerial, mini};

    #[test]
    fn trigger_forms() {
        assert_eq!(
            parse_trigger_args(&["start", "ApproachTarget", "--priority", "2"]).unwrap(),
            TriggerSpec::Start {
                task: "ApproachTarget".into(),
                priority: 2
            }
        );
        assert_eq!(
            parse_trigger_args(&["stop", "X"]).unwrap(),
            TriggerSpec::Stop { task: "X".into() }
        );
        assert_eq!(
            parse_trigger_args(&["finished", "b", "--cause", "time_out"]).unwrap(),
            TriggerSpec::Finished {
                behavior: "b".into(),
                cause: TerminationCause::TimeOut
            }
        );
    }

    #[test]
    fn trigger_errors() {
        for bad in [
            &[][..],
            &["start"][..],
            &["start", "--priority", "1"][..],
            &["start", "X", "--priority"][..],
            &["start", "X", "--priority", "-1"][..],
            &["stop", "X", "--priority", "1"][..],
            &["finished", "b", "--cause", "BOOM"][..],
            &["launch", "X"][..],
            &["start", "X", "extra"][..],
        ] {
            assert!(parse_trigger_args(bad).is_err(), "{bad:?}");
        }
        let c = mini();
        assert!(matches!(
            parse_trigger(&["start", "Z"], &c),
            Err(InputError::UnknownTask(_))
        ));
        assert!(matches!(
            parse_trigger(&["finished", "zz"], &c),
            Err(InputError::UnknownBehavior(_))
        ));
    }

    #[test]
    fn state_file() {
        let c = aerial();
        let text = "situation: {flying: true}\nactive: [FollowPathPlanner, VisualOdometry]\nrequests:\n  - {task: FollowPath, priority: 2}\n";
        let err = parse_state(text, &c, SolverConfig::default()).unwrap_err();
        // VisualOdometry reaches 0.8 < 0.9
        assert!(matches!(err, InputError::Inconsistent(_)));

        let ok = "situation: {flying: true}\nactive: [HoverPID, VisualOdometry]\nrequests: [{task: Hover}]\n";
        let s = parse_state(ok, &c, SolverConfig::default()).unwrap();
        assert_eq!(s.current.active_behaviors().count(), 2);
        assert_eq!(s.live_priority(c.task_id("Hover").unwrap()), Some(0));

        let dup = "active: [GPSLocalization, VisualOdometry]\n";
        assert!(matches!(
            parse_state(dup, &c, SolverConfig::default()),
            Err(InputError::DuplicateActive(_))
        ));
        assert!(matches!(
            parse_state("foo: 1", &c, SolverConfig::default()),
            Err(InputError::Syntax { .. })
        ));
        assert!(parse_state("", &c, SolverConfig::default()).is_ok());
    }
}
