use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::document::CatalogDocument;

/// Upper bound on behavior timeouts, in seconds.
pub const MAX_TIMEOUT_S: f64 = 1e9;

/// A single catalog invariant violation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EmptyName {
        what: &'static str,
    },
    DuplicateTask {
        name: String,
    },
    DuplicateBehavior {
        name: String,
    },
    UnknownTask {
        behavior: String,
        task: String,
    },
    UnknownRequiredTask {
        behavior: String,
        task: String,
    },
    SelfRequirement {
        behavior: String,
        task: String,
    },
    SuitabilityOutOfRange {
        behavior: String,
        value: f64,
    },
    RequirementPerformanceOutOfRange {
        behavior: String,
        task: String,
        value: f64,
    },
    TaskPerformanceOutOfRange {
        task: String,
        value: f64,
    },
    InvalidTimeout {
        behavior: String,
        value: f64,
    },
    StartOnRequestAndReactive {
        task: String,
    },
    IncompatibleWithItself {
        task: String,
    },
    UnknownIncompatibleTask {
        task: String,
    },
    RequirementCycle {
        tasks: Vec<String>,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyName { what } => write!(f, "{what} with empty name"),
            Violation::DuplicateTask { name } => write!(f, "duplicate task name '{name}'"),
            Violation::DuplicateBehavior { name } => write!(f, "duplicate behavior name '{name}'"),
            Violation::UnknownTask { behavior, task } => {
                write!(f, "behavior '{behavior}' performs unknown task '{task}'")
            }
            Violation::UnknownRequiredTask { behavior, task } => {
                write!(f, "behavior '{behavior}' requires unknown task '{task}'")
            }
            Violation::SelfRequirement { behavior, task } => {
                write!(f, "behavior '{behavior}' requires its own task '{task}'")
            }
            Violation::SuitabilityOutOfRange { behavior, value } => {
                write!(
                    f,
                    "suitability out of range: behavior '{behavior}' has {value}"
                )
            }
            Violation::RequirementPerformanceOutOfRange {
                behavior,
                task,
                value,
            } => write!(
                f,
                "min_performance out of range: behavior '{behavior}' requires '{task}' at {value}"
            ),
            Violation::TaskPerformanceOutOfRange { task, value } => {
                write!(f, "min_performance out of range: task '{task}' has {value}")
            }
            Violation::InvalidTimeout { behavior, value } => {
                write!(f, "invalid timeout: behavior '{behavior}' has {value} s")
            }
            Violation::StartOnRequestAndReactive { task } => write!(
                f,
                "task '{task}' has both start_on_request and reactive_start"
            ),
            Violation::IncompatibleWithItself { task } => {
                write!(f, "task '{task}' declared incompatible with itself")
            }
            Violation::UnknownIncompatibleTask { task } => {
                write!(f, "incompatibility references unknown task '{task}'")
            }
            Violation::RequirementCycle { tasks } => {
                write!(f, "requirement cycle: {}", tasks.join(" -> "))
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn in_unit_interval(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

/// Checks every catalog invariant. Violations are data; this never fails.
pub fn validate_document(doc: &CatalogDocument) -> ValidationReport {
    let mut out = Vec::new();

    let mut task_names: HashMap<&str, usize> = HashMap::new();
    for (i, t) in doc.tasks.iter().enumerate() {
        if t.name.is_empty() {
            out.push(Violation::EmptyName { what: "task" });
        }
        if task_names.insert(&t.name, i).is_some() {
            out.push(Violation::DuplicateTask {
                name: t.name.clone(),
            });
        }
        if t.start_on_request && t.reactive_start {
            out.push(Violation::StartOnRequestAndReactive {
                task: t.name.clone(),
            });
        }
        if let Some(k) = t.min_performance {
            if !in_unit_interval(k) {
                out.push(Violation::TaskPerformanceOutOfRange {
                    task: t.name.clone(),
                    value: k,
                });
            }
        }
    }

    let mut behavior_names = HashSet::new();
    for b in &doc.behaviors {
        if b.name.is_empty() {
            out.push(Violation::EmptyName { what: "behavior" });
        }
        if !behavior_names.insert(b.name.as_str()) {
            out.push(Violation::DuplicateBehavior {
                name: b.name.clone(),
            });
        }
        if !task_names.contains_key(b.task.as_str()) {
            out.push(Violation::UnknownTask {
                behavior: b.name.clone(),
                task: b.task.clone(),
            });
        }
        if !in_unit_interval(b.suitability) {
            out.push(Violation::SuitabilityOutOfRange {
                behavior: b.name.clone(),
                value: b.suitability,
            });
        }
        if let Some(t) = b.timeout_s {
            if !t.is_finite() || t <= 0.0 || t > MAX_TIMEOUT_S {
                out.push(Violation::InvalidTimeout {
                    behavior: b.name.clone(),
                    value: t,
                });
            }
        }
        for r in &b.requirements {
            if !task_names.contains_key(r.task.as_str()) {
                out.push(Violation::UnknownRequiredTask {
                    behavior: b.name.clone(),
                    task: r.task.clone(),
                });
            } else if r.task == b.task {
                out.push(Violation::SelfRequirement {
                    behavior: b.name.clone(),
                    task: r.task.clone(),
                });
            }
            if !in_unit_interval(r.min_performance) {
                out.push(Violation::RequirementPerformanceOutOfRange {
                    behavior: b.name.clone(),
                    task: r.task.clone(),
                    value: r.min_performance,
                });
            }
        }
    }

    for c in &doc.constraints.incompatible {
        for t in [&c.task_a, &c.task_b] {
            if !task_names.contains_key(t.as_str()) {
                out.push(Violation::UnknownIncompatibleTask { task: t.clone() });
            }
        }
        if c.task_a == c.task_b {
            out.push(Violation::IncompatibleWithItself {
                task: c.task_a.clone(),
            });
        }
    }

    if let Some(cycle) = find_requirement_cycle(doc, &task_names) {
        out.push(Violation::RequirementCycle { tasks: cycle });
    }

    ValidationReport { violations: out }
}

/// Depth-first search over the static task graph (task of behavior -> required task).
/// Self-loops are reported separately and skipped here.
fn find_requirement_cycle(
    doc: &CatalogDocument,
    task_names: &HashMap<&str, usize>,
) -> Option<Vec<String>> {
    let n = doc.tasks.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for b in &doc.behaviors {
        let Some(&from) = task_names.get(b.task.as_str()) else {
            continue;
        };
        for r in &b.requirements {
            if let Some(&to) = task_names.get(r.task.as_str()) {
                if to != from && !adj[from].contains(&to) {
                    adj[from].push(to);
                }
            }
        }
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let mut mark = vec![Mark::New; n];
    let mut path: Vec<usize> = Vec::new();

    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        // iterative DFS: stack of (node, next child index)
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        mark[root] = Mark::Open;
        path.push(root);
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if let Some(&child) = adj[node].get(*next) {
                *next += 1;
                match mark[child] {
                    Mark::New => {
                        mark[child] = Mark::Open;
                        path.push(child);
                        stack.push((child, 0));
                    }
                    Mark::Open => {
                        let start = path.iter().position(|&p| p == child).unwrap_or(0);
                        let mut cycle: Vec<String> = path[start..]
                            .iter()
                            .map(|&i| doc.tasks[i].name.clone())
                            .collect();
                        cycle.push(doc.tasks[child].name.clone());
                        return Some(cycle);
                    }
                    Mark::Done => {}
                }
            } else {
                mark[node] = Mark::Done;
                path.pop();
                stack.pop();
            }
        }
    }
    None
}
