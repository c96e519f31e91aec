use crate::catalog::{Catalog, TaskId};
use crate::state::QueueEntry;
use crate::time::SimTime;

use std::time::Duration;

/// For each task, the reactive-start tasks incompatible with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReactiveIncompatibilitySet {
    sets: Vec<Vec<TaskId>>,
}

impl ReactiveIncompatibilitySet {
    pub fn from_catalog(catalog: &Catalog) -> Self {
        let sets = catalog
            .task_ids()
            .map(|t| {
                catalog
                    .incompatible_with(t)
                    .iter()
                    .copied()
                    .filter(|&o| catalog.reactive_start(o))
                    .collect()
            })
            .collect();
        Self { sets }
    }

    pub fn get(&self, task: TaskId) -> &[TaskId] {
        &self.sets[task.index()]
    }
}

/// Finished tasks schedule their reactive set at `now + delay`; started tasks
/// then cancel theirs.
pub fn update_reactive_queue(
    queue: &mut Vec<QueueEntry>,
    sets: &ReactiveIncompatibilitySet,
    started: &[TaskId],
    finished: &[TaskId],
    now: SimTime,
    delay: Duration,
) {
    for &f in finished {
        for &r in sets.get(f) {
            queue.retain(|e| e.task != r);
            queue.push(QueueEntry {
                task: r,
                due: now + delay,
            });
        }
    }
    for &s in started {
        for &r in sets.get(s) {
            queue.retain(|e| e.task != r);
        }
    }
}

/// Removes and returns every entry due at or before `now`, earliest first.
pub fn pop_due(queue: &mut Vec<QueueEntry>, now: SimTime) -> Vec<QueueEntry> {
    let mut due: Vec<QueueEntry> = queue.iter().copied().filter(|e| e.due <= now).collect();
    queue.retain(|e| e.due > now);
    due.sort_by_key(|e| (e.due, e.task));
    due
}
