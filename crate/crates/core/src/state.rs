//! Mutable coordinator state shared by initialization, optimization and the
//! coordination loop.

use crate::catalog::{Catalog, TaskId};
use crate::csp::{Assignment, Priority, SolverConfig};
use crate::situation::SituationStore;
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RequestRecord {
    pub task: TaskId,
    pub priority: Priority,
    /// Monotone; larger is more recent.
    pub sequence: u64,
    pub active: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueueEntry {
    pub task: TaskId,
    pub due: SimTime,
}

#[derive(Debug, Clone)]
pub struct CoordinatorState {
    pub current: Assignment,
    pub requests: Vec<RequestRecord>,
    pub reactive_queue: Vec<QueueEntry>,
    pub situation: SituationStore,
    pub clock: SimTime,
    pub config: SolverConfig,
    next_sequence: u64,
    solves: u64,
}

impl CoordinatorState {
    pub fn new(catalog: &Catalog, situation: SituationStore, config: SolverConfig) -> Self {
        Self {
            current: Assignment::inactive(catalog.num_tasks()),
            requests: Vec::new(),
            reactive_queue: Vec::new(),
            situation,
            clock: SimTime::ZERO,
            config,
            next_sequence: 0,
            solves: 0,
        }
    }

    pub fn live_request(&self, task: TaskId) -> Option<&RequestRecord> {
        self.requests
            .iter()
            .rev()
            .find(|r| r.active && r.task == task)
    }

    pub fn live_priority(&self, task: TaskId) -> Option<Priority> {
        self.live_request(task).map(|r| r.priority)
    }

    pub fn max_live_priority(&self) -> Option<Priority> {
        self.active_requests().map(|r| r.priority).max()
    }

    pub fn active_requests(&self) -> impl Iterator<Item = &RequestRecord> {
        self.requests.iter().filter(|r| r.active)
    }

    /// Adds a live record, superseding any older one for the same task.
    pub fn add_request(&mut self, task: TaskId, priority: Priority) -> RequestRecord {
        self.deactivate_request(task);
        let record = RequestRecord {
            task,
            priority,
            sequence: self.next_sequence,
            active: true,
        };
        self.next_sequence += 1;
        self.requests.push(record);
        record
    }

    /// Returns the record that was live, if any.
    pub fn deactivate_request(&mut self, task: TaskId) -> Option<RequestRecord> {
        let mut found = None;
        for r in self
            .requests
            .iter_mut()
            .filter(|r| r.active && r.task == task)
        {
            r.active = false;
            found = Some(*r);
        }
        found
    }

    /// Seed for the next solver invocation; advances the counter.
    pub fn next_solve_seed(&mut self) -> u64 {
        let seed = mix_seed(self.config.seed, self.solves);
        self.solves += 1;
        seed
    }

    pub fn solve_count(&self) -> u64 {
        self.solves
    }

    pub fn queued(&self, task: TaskId) -> Option<SimTime> {
        self.reactive_queue
            .iter()
            .find(|e| e.task == task)
            .map(|e| e.due)
    }
}

/// splitmix64 finalizer over seed and counter.
pub fn mix_seed(seed: u64, counter: u64) -> u64 {
    let mut z = seed ^ counter.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
