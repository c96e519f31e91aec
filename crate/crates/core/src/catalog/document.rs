//! Serde model of the catalog file.

use serde::{Deserialize, Serialize};

use crate::situation::SituationCondition;

fn is_false(v: &bool) -> bool {
    !*v
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogDocument {
    #[serde(default)]
    pub tasks: Vec<TaskSpec>,
    #[serde(default)]
    pub behaviors: Vec<BehaviorSpec>,
    #[serde(default, skip_serializing_if = "ConstraintSection::is_empty")]
    pub constraints: ConstraintSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "is_false")]
    pub start_on_request: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub reactive_start: bool,
    /// Standalone `Performance(task) >= k` constraint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_performance: Option<f64>,
}

impl TaskSpec {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            start_on_request: false,
            reactive_start: false,
            min_performance: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorSpec {
    pub name: String,
    pub task: String,
    pub suitability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeout_s: Option<f64>,
    #[serde(default, rename = "situation", skip_serializing_if = "Vec::is_empty")]
    pub situation_conditions: Vec<SituationCondition>,
    #[serde(default, rename = "requires", skip_serializing_if = "Vec::is_empty")]
    pub requirements: Vec<RequirementSpec>,
}

impl BehaviorSpec {
    pub fn new(name: impl Into<String>, task: impl Into<String>, suitability: f64) -> Self {
        Self {
            name: name.into(),
            task: task.into(),
            suitability,
            timeout_s: None,
            situation_conditions: Vec::new(),
            requirements: Vec::new(),
        }
    }

    pub fn requires(mut self, task: impl Into<String>, min_performance: f64) -> Self {
        self.requirements.push(RequirementSpec {
            task: task.into(),
            min_performance,
        });
        self
    }

    pub fn when(mut self, key: impl Into<String>, value: impl Into<crate::Scalar>) -> Self {
        self.situation_conditions.push(SituationCondition {
            key: key.into(),
            value: value.into(),
        });
        self
    }
}

/// `behavior requires task` with an optional minimum performance of that task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequirementSpec {
    pub task: String,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub min_performance: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSection {
    #[serde(default)]
    pub incompatible: Vec<CompatibilityConstraint>,
}

impl ConstraintSection {
    pub fn is_empty(&self) -> bool {
        self.incompatible.is_empty()
    }
}

/// Two tasks that may not run at the same time. Written as a two-element list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(String, String)", into = "(String, String)")]
pub struct CompatibilityConstraint {
    pub task_a: String,
    pub task_b: String,
}

impl CompatibilityConstraint {
    pub fn new(a: impl Into<String>, b: impl Into<String>) -> Self {
        Self {
            task_a: a.into(),
            task_b: b.into(),
        }
    }
}

impl From<(String, String)> for CompatibilityConstraint {
    fn from((task_a, task_b): (String, String)) -> Self {
        Self { task_a, task_b }
    }
}

impl From<CompatibilityConstraint> for (String, String) {
    fn from(c: CompatibilityConstraint) -> Self {
        (c.task_a, c.task_b)
    }
}
