//! Small random instances: catalog, consistent state and a trigger.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{
    BehaviorSpec, Catalog, CatalogDocument, CompatibilityConstraint, ConstraintSection, TaskSpec,
};
use crate::csp::{DomainTable, SolverConfig, TerminationCause, Trigger};
use crate::oracle::valid_assignments;
use crate::situation::SituationStore;
use crate::state::CoordinatorState;

pub const SITUATION_KEYS: [&str; 2] = ["k0", "k1"];

#[derive(Debug, Clone)]
pub struct Instance {
    pub catalog: Catalog,
    pub state: CoordinatorState,
    pub trigger: Trigger,
}

/// Random catalog with at most `max_tasks` tasks and `max_behaviors`
/// behaviors per task. Requirements point from lower to higher task index.
pub fn random_catalog<R: Rng>(rng: &mut R, max_tasks: usize, max_behaviors: usize) -> Catalog {
    let n = rng.gen_range(1..=max_tasks.max(1));
    let name = |i: usize| format!("x{}", i + 1);
    let mut tasks = Vec::new();
    for i in 0..n {
        let mut t = TaskSpec::new(name(i));
        match rng.gen_range(0..10) {
            0..=2 => t.start_on_request = true,
            3 => t.reactive_start = true,
            _ => {}
        }
        if rng.gen_bool(0.15) {
            t.min_performance = Some(tenth(rng, 3, 9));
        }
        tasks.push(t);
    }
    let mut behaviors = Vec::new();
    for i in 0..n {
        for k in 0..rng.gen_range(0..=max_behaviors) {
            let mut b = BehaviorSpec::new(format!("b{}_{k}", i + 1), name(i), tenth(rng, 3, 10));
            if i + 1 < n && rng.gen_bool(0.4) {
                let mut later: Vec<usize> = (i + 1..n).collect();
                later.shuffle(rng);
                for &j in later.iter().take(rng.gen_range(1..=2)) {
                    let k = if rng.gen_bool(0.3) {
                        tenth(rng, 4, 9)
                    } else {
                        0.0
                    };
                    b = b.requires(name(j), k);
                }
            }
            if rng.gen_bool(0.25) {
                b = b.when(*SITUATION_KEYS.choose(rng).unwrap(), rng.gen_bool(0.5));
            }
            behaviors.push(b);
        }
    }
    let mut incompatible = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(0.2) {
                incompatible.push(CompatibilityConstraint::new(name(a), name(b)));
            }
        }
    }
    let doc = CatalogDocument {
        tasks,
        behaviors,
        constraints: ConstraintSection { incompatible },
    };
    Catalog::from_document(doc).expect("random catalogs are valid")
}

fn tenth<R: Rng>(rng: &mut R, lo: u32, hi: u32) -> f64 {
    rng.gen_range(lo..=hi) as f64 / 10.0
}

pub fn random_situation<R: Rng>(rng: &mut R) -> SituationStore {
    SituationStore::from_values(SITUATION_KEYS.map(|k| (k, rng.gen_bool(0.5).into())))
}

/// A consistent state: the current assignment is drawn from the valid
/// assignments over full domains, and some running tasks carry requests.
pub fn random_state<R: Rng>(
    rng: &mut R,
    catalog: &Catalog,
    config: SolverConfig,
) -> CoordinatorState {
    let mut state = CoordinatorState::new(catalog, random_situation(rng), config);
    let valid =
        valid_assignments(catalog, &DomainTable::full(catalog), &state, u128::MAX).expect("no cap");
    if let Some(a) = valid.choose(rng) {
        state.current = a.clone();
    }
    for t in catalog.task_ids() {
        if state.current.is_running(t) && rng.gen_bool(0.5) {
            state.add_request(t, rng.gen_range(0..4));
        }
    }
    state
}

pub fn random_trigger<R: Rng>(rng: &mut R, catalog: &Catalog, state: &CoordinatorState) -> Trigger {
    let active: Vec<_> = state.current.active_behaviors().collect();
    let task = crate::catalog::TaskId::new(rng.gen_range(0..catalog.num_tasks()));
    match rng.gen_range(0..10) {
        0..=5 => Trigger::StartRequest {
            task,
            priority: rng.gen_range(0..4),
        },
        6 | 7 if !active.is_empty() => Trigger::BehaviorFinished {
            behavior: *active.choose(rng).unwrap(),
            cause: *TerminationCause::ALL.choose(rng).unwrap(),
        },
        _ => Trigger::StopRequest { task },
    }
}

/// Instance with at most 6 tasks and 3 behaviors per task.
pub fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let catalog = random_catalog(&mut rng, 6, 3);
    let config = SolverConfig {
        seed,
        ..Default::default()
    };
    let state = random_state(&mut rng, &catalog, config);
    let trigger = random_trigger(&mut rng, &catalog, &state);
    Instance {
        catalog,
        state,
        trigger,
    }
}
