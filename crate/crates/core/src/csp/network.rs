//! Constraint graph and GAC3 propagation.

use std::collections::VecDeque;

use crate::catalog::{BehaviorId, Catalog, TaskId};

use super::{meets, DomainTable, Value};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint {
    /// `(a = ∅) ∨ (b = ∅)`
    Incompatible { a: TaskId, b: TaskId },
    /// `(task = behavior) → (required ≠ ∅ ∧ Performance(required) ≥ min_performance)`
    Requires {
        task: TaskId,
        behavior: BehaviorId,
        required: TaskId,
        min_performance: f64,
    },
    /// `Performance(task) ≥ min` whenever the task runs.
    MinPerformance { task: TaskId, min: f64 },
}

impl Constraint {
    pub fn scope(&self) -> (TaskId, Option<TaskId>) {
        match *self {
            Constraint::Incompatible { a, b } => (a, Some(b)),
            Constraint::Requires { task, required, .. } => (task, Some(required)),
            Constraint::MinPerformance { task, .. } => (task, None),
        }
    }

    pub fn involves(&self, task: TaskId) -> bool {
        let (a, b) = self.scope();
        a == task || b == Some(task)
    }
}

/// All constraints of a catalog with per-task incidence lists.
#[derive(Debug, Clone)]
pub struct ConstraintNetwork {
    constraints: Vec<Constraint>,
    incident: Vec<Vec<usize>>,
}

impl ConstraintNetwork {
    pub fn from_catalog(catalog: &Catalog) -> Self {
        let mut constraints = Vec::new();
        for &(a, b) in catalog.incompatibilities() {
            constraints.push(Constraint::Incompatible { a, b });
        }
        for b in catalog.behavior_ids() {
            for r in catalog.requirements(b) {
                constraints.push(Constraint::Requires {
                    task: catalog.task_of(b),
                    behavior: b,
                    required: r.task,
                    min_performance: r.min_performance,
                });
            }
        }
        for t in catalog.task_ids() {
            if let Some(min) = catalog.min_performance(t) {
                constraints.push(Constraint::MinPerformance { task: t, min });
            }
        }
        let mut incident = vec![Vec::new(); catalog.num_tasks()];
        for (i, c) in constraints.iter().enumerate() {
            let (a, b) = c.scope();
            incident[a.index()].push(i);
            if let Some(b) = b {
                incident[b.index()].push(i);
            }
        }
        Self {
            constraints,
            incident,
        }
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn incident(&self, task: TaskId) -> &[usize] {
        &self.incident[task.index()]
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }
}

/// Removes the values of `var` that have no support in the other variable of
/// `constraint`. Returns true if the domain of `var` changed.
pub fn revise_arc(
    catalog: &Catalog,
    constraint: &Constraint,
    var: TaskId,
    table: &mut DomainTable,
) -> bool {
    match *constraint {
        Constraint::Incompatible { a, b } => {
            debug_assert!(var == a || var == b);
            let other = table.get(if var == a { b } else { a });
            let other_nonempty = !other.is_empty();
            let other_may_rest = other.contains_inactive();
            table.get_mut(var).retain(|v| match v {
                Value::Inactive => other_nonempty,
                Value::Behavior(_) => other_may_rest,
            })
        }
        Constraint::Requires {
            task,
            behavior,
            required,
            min_performance,
        } => {
            // a required behavior w supports b_i iff σ(w) can reach the threshold;
            // σ(w) bounds Performance(required) from above
            let strong_enough = |w: BehaviorId| meets(catalog.suitability(w), min_performance);
            if var == task {
                let req = table.get(required);
                let nonempty = !req.is_empty();
                let supported = req.behaviors().any(strong_enough);
                table.get_mut(task).retain(|v| {
                    if v == Value::Behavior(behavior) {
                        supported
                    } else {
                        nonempty
                    }
                })
            } else {
                debug_assert_eq!(var, required);
                let dom = table.get(task);
                let other_value = dom.iter().any(|v| v != Value::Behavior(behavior));
                let trigger_value = dom.contains(Value::Behavior(behavior));
                table.get_mut(required).retain(|w| match w {
                    Value::Inactive => other_value,
                    Value::Behavior(wb) => other_value || (trigger_value && strong_enough(wb)),
                })
            }
        }
        Constraint::MinPerformance { task, min } => {
            debug_assert_eq!(var, task);
            table.get_mut(task).retain(|v| match v {
                Value::Inactive => true,
                Value::Behavior(b) => meets(catalog.suitability(b), min),
            })
        }
    }
}

fn other_var(c: &Constraint, var: TaskId) -> Option<TaskId> {
    match c.scope() {
        (a, Some(b)) if a == var => Some(b),
        (a, Some(b)) if b == var => Some(a),
        _ => None,
    }
}

struct Worklist {
    queue: VecDeque<(usize, TaskId)>,
    queued: Vec<bool>,
}

impl Worklist {
    fn new(network: &ConstraintNetwork) -> Self {
        Self {
            queue: VecDeque::new(),
            queued: vec![false; network.len() * 2],
        }
    }

    fn slot(network: &ConstraintNetwork, c: usize, var: TaskId) -> usize {
        c * 2 + usize::from(network.constraints[c].scope().0 != var)
    }

    fn push(&mut self, network: &ConstraintNetwork, c: usize, var: TaskId) {
        let slot = Self::slot(network, c, var);
        if !self.queued[slot] {
            self.queued[slot] = true;
            self.queue.push_back((c, var));
        }
    }

    fn pop(&mut self, network: &ConstraintNetwork) -> Option<(usize, TaskId)> {
        let (c, var) = self.queue.pop_front()?;
        self.queued[Self::slot(network, c, var)] = false;
        Some((c, var))
    }
}

/// GAC3 to fixpoint over every arc. Returns false iff some domain empties.
pub fn propagate(catalog: &Catalog, network: &ConstraintNetwork, table: &mut DomainTable) -> bool {
    if table.has_empty_domain() {
        return false;
    }
    let mut work = Worklist::new(network);
    for (i, c) in network.constraints().iter().enumerate() {
        let (a, b) = c.scope();
        work.push(network, i, a);
        if let Some(b) = b {
            work.push(network, i, b);
        }
    }
    run(catalog, network, table, work)
}

/// GAC3 starting from the arcs that point at the neighbours of `changed`.
pub fn propagate_from(
    catalog: &Catalog,
    network: &ConstraintNetwork,
    table: &mut DomainTable,
    changed: &[TaskId],
) -> bool {
    if table.has_empty_domain() {
        return false;
    }
    let mut work = Worklist::new(network);
    for &t in changed {
        enqueue_neighbours(network, &mut work, t, None);
    }
    run(catalog, network, table, work)
}

fn enqueue_neighbours(
    network: &ConstraintNetwork,
    work: &mut Worklist,
    var: TaskId,
    skip: Option<usize>,
) {
    for &ci in network.incident(var) {
        if Some(ci) == skip {
            continue;
        }
        if let Some(other) = other_var(&network.constraints()[ci], var) {
            work.push(network, ci, other);
        }
    }
}

fn run(
    catalog: &Catalog,
    network: &ConstraintNetwork,
    table: &mut DomainTable,
    mut work: Worklist,
) -> bool {
    while let Some((ci, var)) = work.pop(network) {
        if revise_arc(catalog, &network.constraints()[ci], var, table) {
            if table.get(var).is_empty() {
                return false;
            }
            enqueue_neighbours(network, &mut work, var, Some(ci));
        }
    }
    true
}
