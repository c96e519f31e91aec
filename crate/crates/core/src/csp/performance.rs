//! Task performance: the product of the task's suitability and the
//! suitabilities of every task it transitively requires under an assignment.

use std::collections::BTreeSet;

use crate::catalog::{BehaviorId, Catalog, TaskId};

use super::{meets, Assignment, CspError, DomainTable, NoGood, Value};

/// Tasks required by `task`, directly or transitively, through the behaviors
/// chosen in `assignment`. Excludes `task` itself. A required task assigned ∅
/// is included but contributes no further edges.
pub fn required_set(catalog: &Catalog, assignment: &Assignment, task: TaskId) -> BTreeSet<TaskId> {
    let mut out = BTreeSet::new();
    let mut stack = vec![task];
    while let Some(t) = stack.pop() {
        let Value::Behavior(b) = assignment.get(t) else {
            continue;
        };
        for r in catalog.requirements(b) {
            if r.task != task && out.insert(r.task) {
                stack.push(r.task);
            }
        }
    }
    out
}

/// `σ(b_i) · ∏_{x_j ∈ R_i} σ(b_j)`; required tasks assigned ∅ contribute 0.
pub fn task_performance(
    catalog: &Catalog,
    assignment: &Assignment,
    task: TaskId,
) -> Result<f64, CspError> {
    let Value::Behavior(b) = assignment.get(task) else {
        return Err(CspError::NotRunning(catalog.task_name(task).to_string()));
    };
    let own = catalog.suitability(b);
    Ok(required_set(catalog, assignment, task)
        .into_iter()
        .map(|t| {
            assignment
                .get(t)
                .behavior()
                .map_or(0.0, |rb| catalog.suitability(rb))
        })
        .fold(own, |acc, s| acc * s))
}

/// Optimistic performance used while the assignment is partial: the best
/// suitability left in the task's domain, 0 if only ∅ remains.
pub fn performance_upper_bound(catalog: &Catalog, task: TaskId, table: &DomainTable) -> f64 {
    table
        .get(task)
        .behaviors()
        .map(|b| catalog.suitability(b))
        .fold(0.0, f64::max)
}

/// A performance constraint found violated on a complete assignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerformanceViolation {
    /// `(task = behavior) → Performance(required) ≥ min` failed.
    Requirement {
        task: TaskId,
        behavior: BehaviorId,
        required: TaskId,
        min: f64,
        actual: f64,
    },
    /// Standalone `Performance(task) ≥ min` failed.
    Task { task: TaskId, min: f64, actual: f64 },
}

impl PerformanceViolation {
    /// The task whose choice carries the constraint.
    pub fn owner(&self) -> TaskId {
        match *self {
            PerformanceViolation::Requirement { task, .. }
            | PerformanceViolation::Task { task, .. } => task,
        }
    }
}

/// Evaluates every performance constraint in full on a complete assignment.
/// Unmet plain requirements are not reported here.
pub fn performance_violations(
    catalog: &Catalog,
    assignment: &Assignment,
) -> Vec<PerformanceViolation> {
    let mut out = Vec::new();
    for (task, value) in assignment.iter() {
        let Value::Behavior(b) = value else { continue };
        for r in catalog.requirements(b) {
            if r.min_performance <= 0.0 || !assignment.is_running(r.task) {
                continue;
            }
            let actual = task_performance(catalog, assignment, r.task).unwrap_or(0.0);
            if !meets(actual, r.min_performance) {
                out.push(PerformanceViolation::Requirement {
                    task,
                    behavior: b,
                    required: r.task,
                    min: r.min_performance,
                    actual,
                });
            }
        }
        if let Some(min) = catalog.min_performance(task) {
            let actual = task_performance(catalog, assignment, task).unwrap_or(0.0);
            if !meets(actual, min) {
                out.push(PerformanceViolation::Task { task, min, actual });
            }
        }
    }
    out
}

/// No-good over the owner task and its required set, with their assigned values.
pub fn make_nogood(
    catalog: &Catalog,
    assignment: &Assignment,
    violated: &PerformanceViolation,
) -> NoGood {
    let owner = violated.owner();
    let mut entries = vec![(owner, assignment.get(owner))];
    entries.extend(
        required_set(catalog, assignment, owner)
            .into_iter()
            .map(|t| (t, assignment.get(t))),
    );
    NoGood::new(entries).expect("no-good always contains the owner task")
}
