use std::fmt;

use crate::catalog::{BehaviorId, Catalog, TaskId};

use super::Value;

/// Ordered set of values currently valid for one task.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Domain {
    values: Vec<Value>,
}

impl Domain {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn inactive_only() -> Self {
        Self {
            values: vec![Value::Inactive],
        }
    }

    pub fn singleton(value: Value) -> Self {
        Self {
            values: vec![value],
        }
    }

    pub fn from_values(values: impl IntoIterator<Item = Value>) -> Self {
        let mut values: Vec<Value> = values.into_iter().collect();
        values.sort();
        values.dedup();
        Self { values }
    }

    /// `{∅} ∪ behaviors` when `with_inactive`, otherwise just the behaviors.
    pub fn of_behaviors(
        with_inactive: bool,
        behaviors: impl IntoIterator<Item = BehaviorId>,
    ) -> Self {
        let inactive = with_inactive.then_some(Value::Inactive);
        Self::from_values(
            inactive
                .into_iter()
                .chain(behaviors.into_iter().map(Value::Behavior)),
        )
    }

    pub fn contains(&self, value: Value) -> bool {
        self.values.binary_search(&value).is_ok()
    }

    pub fn contains_inactive(&self) -> bool {
        self.values.first() == Some(&Value::Inactive)
    }

    pub fn has_behavior(&self) -> bool {
        self.values.last().is_some_and(|v| v.is_active())
    }

    pub fn behaviors(&self) -> impl Iterator<Item = BehaviorId> + '_ {
        self.values.iter().filter_map(|v| v.behavior())
    }

    pub fn iter(&self) -> impl Iterator<Item = Value> + '_ {
        self.values.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn single(&self) -> Option<Value> {
        match self.values.as_slice() {
            [v] => Some(*v),
            _ => None,
        }
    }

    pub fn remove(&mut self, value: Value) -> bool {
        match self.values.binary_search(&value) {
            Ok(i) => {
                self.values.remove(i);
                true
            }
            Err(_) => false,
        }
    }

    /// Keeps values satisfying `keep`; returns true if anything was removed.
    pub fn retain(&mut self, mut keep: impl FnMut(Value) -> bool) -> bool {
        let before = self.values.len();
        self.values.retain(|&v| keep(v));
        self.values.len() != before
    }
}

/// Current domain of every task, indexed by task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainTable {
    domains: Vec<Domain>,
}

impl DomainTable {
    pub fn new(domains: Vec<Domain>) -> Self {
        Self { domains }
    }

    /// Every task gets `{∅} ∪ candidates`; no initialization filtering.
    pub fn full(catalog: &Catalog) -> Self {
        Self {
            domains: catalog
                .task_ids()
                .map(|t| Domain::of_behaviors(true, catalog.candidates(t).iter().copied()))
                .collect(),
        }
    }

    pub fn get(&self, task: TaskId) -> &Domain {
        &self.domains[task.index()]
    }

    pub fn get_mut(&mut self, task: TaskId) -> &mut Domain {
        &mut self.domains[task.index()]
    }

    pub fn set(&mut self, task: TaskId, domain: Domain) {
        self.domains[task.index()] = domain;
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TaskId, &Domain)> {
        self.domains
            .iter()
            .enumerate()
            .map(|(i, d)| (TaskId::new(i), d))
    }

    pub fn has_empty_domain(&self) -> bool {
        self.domains.iter().any(Domain::is_empty)
    }

    /// Product of domain sizes, saturating.
    pub fn search_space(&self) -> u128 {
        self.domains
            .iter()
            .fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
    }

    /// The assignment formed by singleton domains, if every domain is a singleton.
    pub fn as_assignment(&self) -> Option<Assignment> {
        self.domains
            .iter()
            .map(Domain::single)
            .collect::<Option<Vec<_>>>()
            .map(Assignment::from_values)
    }

    pub fn render(&self, catalog: &Catalog) -> String {
        let mut out = String::new();
        for (t, d) in self.iter() {
            let vals: Vec<String> = d.iter().map(|v| v.display(catalog).to_string()).collect();
            out.push_str(&format!(
                "{}: {{{}}}\n",
                catalog.task_name(t),
                vals.join(", ")
            ));
        }
        out
    }
}

/// One value per task.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<Value>,
}

impl Assignment {
    pub fn inactive(num_tasks: usize) -> Self {
        Self {
            values: vec![Value::Inactive; num_tasks],
        }
    }

    pub fn from_values(values: Vec<Value>) -> Self {
        Self { values }
    }

    /// Builds an assignment from active behaviors; each behavior sets its own task.
    pub fn from_behaviors(
        catalog: &Catalog,
        behaviors: impl IntoIterator<Item = BehaviorId>,
    ) -> Self {
        let mut a = Self::inactive(catalog.num_tasks());
        for b in behaviors {
            a.set(catalog.task_of(b), Value::Behavior(b));
        }
        a
    }

    pub fn get(&self, task: TaskId) -> Value {
        self.values[task.index()]
    }

    pub fn set(&mut self, task: TaskId, value: Value) {
        self.values[task.index()] = value;
    }

    pub fn is_running(&self, task: TaskId) -> bool {
        self.values[task.index()].is_active()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TaskId, Value)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (TaskId::new(i), v))
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    /// Active behaviors in task order.
    pub fn active_behaviors(&self) -> impl Iterator<Item = BehaviorId> + '_ {
        self.values.iter().filter_map(|v| v.behavior())
    }

    pub fn running_tasks(&self) -> impl Iterator<Item = TaskId> + '_ {
        self.iter().filter(|(_, v)| v.is_active()).map(|(t, _)| t)
    }

    pub fn display<'a>(&'a self, catalog: &'a Catalog) -> AssignmentDisplay<'a> {
        AssignmentDisplay {
            assignment: self,
            catalog,
        }
    }
}

pub struct AssignmentDisplay<'a> {
    assignment: &'a Assignment,
    catalog: &'a Catalog,
}

impl fmt::Display for AssignmentDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (t, v)) in self.assignment.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(
                f,
                "{}={}",
                self.catalog.task_name(t),
                v.display(self.catalog)
            )?;
        }
        f.write_str("}")
    }
}
