use std::collections::BTreeSet;

use crate::catalog::{BehaviorId, Catalog, TaskId};
use crate::csp::{Assignment, Priority, TerminationCause};

/// What a delta entry refers to. Task entries only appear for failed starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subject {
    Behavior(BehaviorId),
    Task(TaskId),
}

impl Subject {
    pub fn name<'a>(&self, catalog: &'a Catalog) -> &'a str {
        match *self {
            Subject::Behavior(b) => catalog.behavior_name(b),
            Subject::Task(t) => catalog.task_name(t),
        }
    }

    pub fn behavior(&self) -> Option<BehaviorId> {
        match *self {
            Subject::Behavior(b) => Some(b),
            Subject::Task(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaEntry {
    pub subject: Subject,
    pub priority: Priority,
    pub success: bool,
    /// Set on entries that record a behavior's own termination.
    pub cause: Option<TerminationCause>,
}

impl DeltaEntry {
    pub fn behavior(behavior: BehaviorId) -> Self {
        Self {
            subject: Subject::Behavior(behavior),
            priority: 0,
            success: true,
            cause: None,
        }
    }

    pub fn is_termination(&self) -> bool {
        self.cause.is_some()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActivationDelta {
    pub deactivations: Vec<DeltaEntry>,
    pub activations: Vec<DeltaEntry>,
}

impl ActivationDelta {
    pub fn is_empty(&self) -> bool {
        self.deactivations.is_empty() && self.activations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.deactivations.len() + self.activations.len()
    }

    pub fn deactivated(&self) -> impl Iterator<Item = BehaviorId> + '_ {
        self.deactivations
            .iter()
            .filter_map(|e| e.subject.behavior())
    }

    /// Behaviors actually switched on; failed starts excluded.
    pub fn activated(&self) -> impl Iterator<Item = BehaviorId> + '_ {
        self.activations
            .iter()
            .filter(|e| e.success)
            .filter_map(|e| e.subject.behavior())
    }

    pub fn failures(&self) -> usize {
        self.deactivations
            .iter()
            .chain(&self.activations)
            .filter(|e| !e.success)
            .count()
    }

    /// Active set after applying this delta to `before`.
    pub fn apply(&self, before: &BTreeSet<BehaviorId>) -> BTreeSet<BehaviorId> {
        let mut out = before.clone();
        for b in self.deactivated() {
            out.remove(&b);
        }
        out.extend(self.activated());
        out
    }
}

/// Deactivations with dependents before their requirements, activations
/// with requirements before their dependents.
pub fn diff_assignments(catalog: &Catalog, old: &Assignment, new: &Assignment) -> ActivationDelta {
    let mut delta = ActivationDelta::default();
    for &task in catalog.dependents_first() {
        let (o, n) = (old.get(task), new.get(task));
        if o != n {
            if let Some(b) = o.behavior() {
                delta.deactivations.push(DeltaEntry::behavior(b));
            }
        }
    }
    for &task in catalog.dependents_first().iter().rev() {
        let (o, n) = (old.get(task), new.get(task));
        if o != n {
            if let Some(b) = n.behavior() {
                delta.activations.push(DeltaEntry::behavior(b));
            }
        }
    }
    delta
}
