//! Full-constraint checker, independent of propagation and search.

use std::fmt;

use crate::catalog::{BehaviorId, Catalog, TaskId};
use crate::situation::SituationStore;

use super::{meets, task_performance, Assignment, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum AssignmentViolation {
    /// The behavior does not perform the task it is assigned to.
    NotACandidate {
        task: TaskId,
        behavior: BehaviorId,
    },
    Incompatible {
        a: TaskId,
        b: TaskId,
    },
    RequirementUnmet {
        task: TaskId,
        behavior: BehaviorId,
        required: TaskId,
    },
    RequiredPerformance {
        task: TaskId,
        behavior: BehaviorId,
        required: TaskId,
        min: f64,
        actual: f64,
    },
    TaskPerformance {
        task: TaskId,
        min: f64,
        actual: f64,
    },
    SituationInfeasible {
        task: TaskId,
        behavior: BehaviorId,
    },
}

impl AssignmentViolation {
    pub fn describe(&self, catalog: &Catalog) -> String {
        let t = |id: TaskId| catalog.task_name(id).to_string();
        let b = |id: BehaviorId| catalog.behavior_name(id).to_string();
        match *self {
            AssignmentViolation::NotACandidate { task, behavior } => {
                format!("behavior {} cannot perform task {}", b(behavior), t(task))
            }
            AssignmentViolation::Incompatible { a, b: other } => {
                format!("incompatible tasks {} and {} both running", t(a), t(other))
            }
            AssignmentViolation::RequirementUnmet {
                task,
                behavior,
                required,
            } => format!(
                "{} ({}) requires {} which is not running",
                b(behavior),
                t(task),
                t(required)
            ),
            AssignmentViolation::RequiredPerformance {
                behavior,
                required,
                min,
                actual,
                ..
            } => format!(
                "{} requires {} at performance {min} but it reaches {actual}",
                b(behavior),
                t(required)
            ),
            AssignmentViolation::TaskPerformance { task, min, actual } => {
                format!("task {} performance {actual} below {min}", t(task))
            }
            AssignmentViolation::SituationInfeasible { behavior, .. } => {
                format!("situation conditions of {} do not hold", b(behavior))
            }
        }
    }
}

impl fmt::Display for AssignmentViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Every violated candidacy, compatibility, requirement, performance and
/// situation condition. Empty iff the assignment is valid.
pub fn check_assignment(
    assignment: &Assignment,
    catalog: &Catalog,
    situation: &SituationStore,
) -> Vec<AssignmentViolation> {
    let mut out = Vec::new();
    if assignment.len() != catalog.num_tasks() {
        // treated as a candidacy failure on every task
        return catalog
            .task_ids()
            .filter_map(|task| {
                assignment
                    .values()
                    .get(task.index())
                    .and_then(|v| v.behavior())
                    .map(|behavior| AssignmentViolation::NotACandidate { task, behavior })
            })
            .collect();
    }

    for (task, value) in assignment.iter() {
        let Value::Behavior(b) = value else { continue };
        if b.index() >= catalog.num_behaviors() || catalog.task_of(b) != task {
            out.push(AssignmentViolation::NotACandidate { task, behavior: b });
        }
    }
    if !out.is_empty() {
        return out;
    }

    for &(a, b) in catalog.incompatibilities() {
        if assignment.is_running(a) && assignment.is_running(b) {
            out.push(AssignmentViolation::Incompatible { a, b });
        }
    }

    for (task, value) in assignment.iter() {
        let Value::Behavior(b) = value else { continue };
        if !situation.holds_all(catalog.situation_conditions(b)) {
            out.push(AssignmentViolation::SituationInfeasible { task, behavior: b });
        }
        for r in catalog.requirements(b) {
            if !assignment.is_running(r.task) {
                out.push(AssignmentViolation::RequirementUnmet {
                    task,
                    behavior: b,
                    required: r.task,
                });
                continue;
            }
            if r.min_performance > 0.0 {
                let actual = task_performance(catalog, assignment, r.task).unwrap_or(0.0);
                if !meets(actual, r.min_performance) {
                    out.push(AssignmentViolation::RequiredPerformance {
                        task,
                        behavior: b,
                        required: r.task,
                        min: r.min_performance,
                        actual,
                    });
                }
            }
        }
        if let Some(min) = catalog.min_performance(task) {
            let actual = task_performance(catalog, assignment, task).unwrap_or(0.0);
            if !meets(actual, min) {
                out.push(AssignmentViolation::TaskPerformance { task, min, actual });
            }
        }
    }
    out
}
