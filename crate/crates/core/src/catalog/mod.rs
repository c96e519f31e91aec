//! Behavior catalog: tasks, behaviors, suitabilities and constraints.
//!
//! A [`Catalog`] is built from a [`CatalogDocument`] (the YAML file model) and is
//! valid by construction: every name resolves, suitabilities and thresholds lie in
//! `[0, 1]`, and the static requirement graph is acyclic. It is immutable after
//! load and can be shared freely between readers.

mod document;
mod graph;
mod validate;

use std::collections::HashMap;
use std::fmt;
use std::time::Duration;

pub use document::{
    BehaviorSpec, CatalogDocument, CompatibilityConstraint, ConstraintSection, RequirementSpec,
    TaskSpec,
};
pub use graph::Components;
pub use validate::{validate_document, ValidationReport, Violation};

use crate::situation::SituationCondition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaskId(u32);

impl TaskId {
    pub fn new(index: usize) -> Self {
        TaskId(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BehaviorId(u32);

impl BehaviorId {
    pub fn new(index: usize) -> Self {
        BehaviorId(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Resolved requirement edge of a behavior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Requirement {
    pub task: TaskId,
    pub min_performance: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown field: {message}")]
    UnknownField { message: String },
    #[error("invalid catalog:\n{0}")]
    Invalid(ValidationReport),
    #[error("failed to serialize catalog: {0}")]
    Serialize(String),
}

impl CatalogError {
    pub(crate) fn from_yaml(err: serde_yaml::Error) -> Self {
        let message = err.to_string();
        if message.contains("unknown field") {
            return CatalogError::UnknownField { message };
        }
        let (line, column) = err
            .location()
            .map(|l| (l.line(), l.column()))
            .unwrap_or((0, 0));
        CatalogError::Syntax {
            line,
            column,
            message,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Catalog {
    doc: CatalogDocument,
    task_index: HashMap<String, TaskId>,
    behavior_index: HashMap<String, BehaviorId>,
    behavior_task: Vec<TaskId>,
    candidates: Vec<Vec<BehaviorId>>,
    requirements: Vec<Vec<Requirement>>,
    incompatibilities: Vec<(TaskId, TaskId)>,
    incompatible_with: Vec<Vec<TaskId>>,
    components: Components,
    dependents_first: Vec<TaskId>,
}

impl PartialEq for Catalog {
    fn eq(&self, other: &Self) -> bool {
        // every other field is derived from the normalized document
        self.doc == other.doc
    }
}

/// Parses and validates catalog YAML.
pub fn parse_catalog(text: &str) -> Result<Catalog, CatalogError> {
    Catalog::from_document(parse_document(text)?)
}

/// Parses catalog YAML without validating it.
pub fn parse_document(text: &str) -> Result<CatalogDocument, CatalogError> {
    if text.trim().is_empty() {
        return Ok(CatalogDocument::default());
    }
    serde_yaml::from_str(text).map_err(CatalogError::from_yaml)
}

/// Validates a catalog document. An empty report means [`Catalog::from_document`] succeeds.
pub fn validate_catalog(doc: &CatalogDocument) -> ValidationReport {
    validate_document(doc)
}

impl Catalog {
    pub fn from_document(mut doc: CatalogDocument) -> Result<Self, CatalogError> {
        let report = validate_document(&doc);
        if !report.is_empty() {
            return Err(CatalogError::Invalid(report));
        }

        let task_index: HashMap<String, TaskId> = doc
            .tasks
            .iter()
            .enumerate()
            .map(|(i, t)| (t.name.clone(), TaskId::new(i)))
            .collect();
        let behavior_index: HashMap<String, BehaviorId> = doc
            .behaviors
            .iter()
            .enumerate()
            .map(|(i, b)| (b.name.clone(), BehaviorId::new(i)))
            .collect();

        let mut candidates = vec![Vec::new(); doc.tasks.len()];
        let mut behavior_task = Vec::with_capacity(doc.behaviors.len());
        let mut requirements = Vec::with_capacity(doc.behaviors.len());
        for (i, b) in doc.behaviors.iter().enumerate() {
            let task = task_index[&b.task];
            candidates[task.index()].push(BehaviorId::new(i));
            behavior_task.push(task);
            requirements.push(
                b.requirements
                    .iter()
                    .map(|r| Requirement {
                        task: task_index[&r.task],
                        min_performance: r.min_performance,
                    })
                    .collect(),
            );
        }

        // normalize incompatibilities: ordered by declaration index, deduplicated
        let mut pairs: Vec<(TaskId, TaskId)> = doc
            .constraints
            .incompatible
            .iter()
            .map(|c| {
                let a = task_index[&c.task_a];
                let b = task_index[&c.task_b];
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        pairs.sort();
        pairs.dedup();
        doc.constraints.incompatible = pairs
            .iter()
            .map(|&(a, b)| {
                CompatibilityConstraint::new(
                    doc.tasks[a.index()].name.clone(),
                    doc.tasks[b.index()].name.clone(),
                )
            })
            .collect();
        let mut incompatible_with = vec![Vec::new(); doc.tasks.len()];
        for &(a, b) in &pairs {
            incompatible_with[a.index()].push(b);
            incompatible_with[b.index()].push(a);
        }

        let mut catalog = Catalog {
            doc,
            task_index,
            behavior_index,
            behavior_task,
            candidates,
            requirements,
            incompatibilities: pairs,
            incompatible_with,
            components: Components::default_empty(),
            dependents_first: Vec::new(),
        };
        catalog.components = graph::compute_components(&catalog);
        catalog.dependents_first = graph::requirement_topological_order(&catalog)
            .expect("validated catalog has an acyclic requirement graph");
        Ok(catalog)
    }

    pub fn document(&self) -> &CatalogDocument {
        &self.doc
    }

    pub fn to_yaml(&self) -> Result<String, CatalogError> {
        serde_yaml::to_string(&self.doc).map_err(|e| CatalogError::Serialize(e.to_string()))
    }

    pub fn num_tasks(&self) -> usize {
        self.doc.tasks.len()
    }

    pub fn num_behaviors(&self) -> usize {
        self.doc.behaviors.len()
    }

    pub fn task_ids(&self) -> impl Iterator<Item = TaskId> + '_ {
        (0..self.num_tasks()).map(TaskId::new)
    }

    pub fn behavior_ids(&self) -> impl Iterator<Item = BehaviorId> + '_ {
        (0..self.num_behaviors()).map(BehaviorId::new)
    }

    pub fn task(&self, id: TaskId) -> &TaskSpec {
        &self.doc.tasks[id.index()]
    }

    pub fn behavior(&self, id: BehaviorId) -> &BehaviorSpec {
        &self.doc.behaviors[id.index()]
    }

    pub fn task_name(&self, id: TaskId) -> &str {
        &self.doc.tasks[id.index()].name
    }

    pub fn behavior_name(&self, id: BehaviorId) -> &str {
        &self.doc.behaviors[id.index()].name
    }

    pub fn task_id(&self, name: &str) -> Option<TaskId> {
        self.task_index.get(name).copied()
    }

    pub fn behavior_id(&self, name: &str) -> Option<BehaviorId> {
        self.behavior_index.get(name).copied()
    }

    pub fn task_of(&self, behavior: BehaviorId) -> TaskId {
        self.behavior_task[behavior.index()]
    }

    /// The domain of the task minus the inactive marker, in declaration order.
    pub fn candidates(&self, task: TaskId) -> &[BehaviorId] {
        &self.candidates[task.index()]
    }

    pub fn suitability(&self, behavior: BehaviorId) -> f64 {
        self.doc.behaviors[behavior.index()].suitability
    }

    pub fn requirements(&self, behavior: BehaviorId) -> &[Requirement] {
        &self.requirements[behavior.index()]
    }

    pub fn situation_conditions(&self, behavior: BehaviorId) -> &[SituationCondition] {
        &self.doc.behaviors[behavior.index()].situation_conditions
    }

    pub fn timeout(&self, behavior: BehaviorId) -> Option<Duration> {
        self.doc.behaviors[behavior.index()]
            .timeout_s
            .map(Duration::from_secs_f64)
    }

    pub fn min_performance(&self, task: TaskId) -> Option<f64> {
        self.doc.tasks[task.index()].min_performance
    }

    pub fn start_on_request(&self, task: TaskId) -> bool {
        self.doc.tasks[task.index()].start_on_request
    }

    pub fn reactive_start(&self, task: TaskId) -> bool {
        self.doc.tasks[task.index()].reactive_start
    }

    /// Normalized pairs `(a, b)` with `a < b`.
    pub fn incompatibilities(&self) -> &[(TaskId, TaskId)] {
        &self.incompatibilities
    }

    pub fn incompatible_with(&self, task: TaskId) -> &[TaskId] {
        &self.incompatible_with[task.index()]
    }

    pub fn are_incompatible(&self, a: TaskId, b: TaskId) -> bool {
        self.incompatible_with[a.index()].contains(&b)
    }

    pub fn components(&self) -> &Components {
        &self.components
    }

    /// Tasks ordered so that every task precedes the tasks its behaviors require.
    pub fn dependents_first(&self) -> &[TaskId] {
        &self.dependents_first
    }

    /// Number of compatibility, requirement and standalone performance constraints.
    pub fn constraint_count(&self) -> usize {
        self.incompatibilities.len()
            + self.requirements.iter().map(Vec::len).sum::<usize>()
            + self
                .doc
                .tasks
                .iter()
                .filter(|t| t.min_performance.is_some())
                .count()
    }
}

/// Partitions the tasks into groups connected by incompatibility or requirement edges.
pub fn connected_components(catalog: &Catalog) -> &Components {
    catalog.components()
}

impl Components {
    fn default_empty() -> Self {
        graph::empty_components()
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}
