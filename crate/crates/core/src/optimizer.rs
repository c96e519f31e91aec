//! Repeated search with solution no-goods, keeping the lexicographic best.

use std::cmp::Ordering;
use std::fmt;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog::Catalog;
use crate::csp::{
    search, Assignment, ConstraintNetwork, DomainTable, NoGood, NoGoodSet, SearchContext,
    SearchOutcome,
};
use crate::state::CoordinatorState;

pub use crate::state::RequestRecord;

/// f1 satisfied-request ratio, f2 suitability product, f3 inactivity ratio
/// over non-requestable tasks, f4 change penalty. Compared in that order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObjectiveVector {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
}

impl ObjectiveVector {
    pub fn components(&self) -> [f64; 4] {
        [self.f1, self.f2, self.f3, self.f4]
    }

    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.components()
            .iter()
            .zip(other.components().iter())
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

impl PartialOrd for ObjectiveVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.lex_cmp(other))
    }
}

impl fmt::Display for ObjectiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.f1, self.f2, self.f3, self.f4)
    }
}

/// Behavior activations plus deactivations between two assignments.
pub fn change_count(old: &Assignment, new: &Assignment) -> usize {
    old.values()
        .iter()
        .zip(new.values())
        .filter(|(a, b)| a != b)
        .map(|(a, b)| a.is_active() as usize + b.is_active() as usize)
        .sum()
}

/// Objective of `candidate` against the requests and configuration in `state`.
pub fn objective_vector(
    catalog: &Catalog,
    candidate: &Assignment,
    state: &CoordinatorState,
) -> ObjectiveVector {
    let (mut n, mut r) = (0usize, 0usize);
    for req in state.active_requests() {
        n += 1;
        if candidate.is_running(req.task) {
            r += 1;
        }
    }
    let f1 = if n == 0 { 1.0 } else { r as f64 / n as f64 };

    let f2 = candidate
        .active_behaviors()
        .map(|b| catalog.suitability(b))
        .product();

    let (mut t, mut a) = (0usize, 0usize);
    for task in catalog.task_ids().filter(|&x| !catalog.start_on_request(x)) {
        t += 1;
        if candidate.is_running(task) {
            a += 1;
        }
    }
    let f3 = if t == 0 {
        1.0
    } else {
        (t - a) as f64 / t as f64
    };

    let f4 = 1.0 / (1.0 + change_count(&state.current, candidate) as f64);
    ObjectiveVector { f1, f2, f3, f4 }
}

pub struct Problem<'a> {
    pub catalog: &'a Catalog,
    pub network: &'a ConstraintNetwork,
    pub state: &'a CoordinatorState,
    /// Configuration the branching heuristics try to keep.
    pub running: &'a Assignment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub assignment: Assignment,
    pub objective: ObjectiveVector,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub best: Option<Solution>,
    /// Objective of every candidate, in the order found.
    pub found: Vec<ObjectiveVector>,
    pub timed_out: bool,
    pub elapsed: Duration,
}

impl SolveReport {
    pub fn into_best(self) -> Option<Solution> {
        self.best
    }
}

/// Up to `max_solutions` searches within one `max_search_time` budget.
pub fn solve_optimal(problem: &Problem<'_>, table: &DomainTable, seed: u64) -> SolveReport {
    let config = &problem.state.config;
    let started = Instant::now();
    let ctx = SearchContext {
        catalog: problem.catalog,
        network: problem.network,
        running: problem.running,
        deadline: started.checked_add(config.max_search_time),
    };
    let branching: Vec<bool> = table.iter().map(|(_, d)| d.len() > 1).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nogoods = NoGoodSet::new();
    let mut best: Option<Solution> = None;
    let mut found = Vec::new();
    let mut timed_out = false;

    for _ in 0..config.max_solutions.max(1) {
        let assignment = match search(&ctx, table, &mut nogoods, &mut rng) {
            SearchOutcome::Found(a) => a,
            SearchOutcome::Exhausted => break,
            SearchOutcome::TimedOut => {
                timed_out = true;
                break;
            }
        };
        let objective = objective_vector(problem.catalog, &assignment, problem.state);
        found.push(objective);
        let exclude = NoGood::new(
            assignment
                .iter()
                .filter(|(t, _)| branching[t.index()])
                .collect(),
        );
        if best
            .as_ref()
            .is_none_or(|b| objective.lex_cmp(&b.objective).is_gt())
        {
            best = Some(Solution {
                assignment,
                objective,
            });
        }
        match exclude {
            Some(ng) => {
                nogoods.insert(ng);
            }
            None => break,
        }
    }
    SolveReport {
        best,
        found,
        timed_out,
        elapsed: started.elapsed(),
    }
}
