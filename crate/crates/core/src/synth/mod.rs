//! Seeded catalog generators: layered catalogs for timing runs and small
//! random instances for cross-checking.

mod random;

use std::time::Duration;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{
    BehaviorSpec, Catalog, CatalogDocument, CompatibilityConstraint, TaskId, TaskSpec,
};
use crate::coordinator::SolveStats;
use crate::csp::{initialize_domains, ConstraintNetwork, DomainTable, SolverConfig, Trigger};
use crate::optimizer::{solve_optimal, Problem};
use crate::situation::SituationStore;
use crate::state::CoordinatorState;

pub use random::{
    random_catalog, random_instance, random_situation, random_state, random_trigger, Instance,
    SITUATION_KEYS,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub tasks: usize,
    pub behaviors_per_task: usize,
    pub requires_per_behavior: usize,
    pub layers: usize,
    /// Fraction of same-layer task pairs made incompatible.
    pub incompat_density: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            tasks: 12,
            behaviors_per_task: 3,
            requires_per_behavior: 2,
            layers: 3,
            incompat_density: 1.0 / 3.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("incompatibility density must lie in [0, 1]")]
    Density,
}

impl SynthParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.tasks == 0 {
            return Err(SynthError::NotPositive("tasks"));
        }
        if self.behaviors_per_task == 0 {
            return Err(SynthError::NotPositive("behaviors per task"));
        }
        if self.layers == 0 {
            return Err(SynthError::NotPositive("layers"));
        }
        if !(0.0..=1.0).contains(&self.incompat_density) {
            return Err(SynthError::Density);
        }
        Ok(())
    }

    /// Task indices of each layer, top layer first.
    pub fn layer_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let layers = self.layers.min(self.tasks);
        let (base, extra) = (self.tasks / layers, self.tasks % layers);
        let mut start = 0;
        (0..layers)
            .map(|l| {
                let len = base + usize::from(l < extra);
                let r = start..start + len;
                start += len;
                r
            })
            .collect()
    }
}

/// Behaviors of layer `l` require tasks of layer `l + 1`; incompatibilities
/// only join tasks of the same layer. No situation conditions, no
/// start-on-request tasks, so the full domains are the search space.
pub fn generate_catalog(params: &SynthParams) -> Result<Catalog, SynthError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let name = |i: usize| format!("T{i:02}");
    let layers = params.layer_ranges();

    let tasks = (0..params.tasks).map(|i| TaskSpec::new(name(i))).collect();
    let mut behaviors = Vec::new();
    for (l, range) in layers.iter().enumerate() {
        let below: Vec<usize> = layers
            .get(l + 1)
            .cloned()
            .map(Iterator::collect)
            .unwrap_or_default();
        for t in range.clone() {
            for k in 0..params.behaviors_per_task {
                let sigma = (rng.gen_range(50..=100) as f64) / 100.0;
                let mut b = BehaviorSpec::new(format!("{}_b{k}", name(t)), name(t), sigma);
                let picks =
                    below.choose_multiple(&mut rng, params.requires_per_behavior.min(below.len()));
                let mut picks: Vec<usize> = picks.copied().collect();
                picks.sort_unstable();
                for r in picks {
                    b = b.requires(name(r), 0.0);
                }
                behaviors.push(b);
            }
        }
    }

    let mut incompatible = Vec::new();
    for range in &layers {
        let ids: Vec<usize> = range.clone().collect();
        let mut pairs: Vec<(usize, usize)> = ids
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| ids[i + 1..].iter().map(move |&b| (a, b)))
            .collect();
        let count = (pairs.len() as f64 * params.incompat_density).round() as usize;
        pairs.shuffle(&mut rng);
        pairs.truncate(count);
        pairs.sort_unstable();
        incompatible.extend(
            pairs
                .into_iter()
                .map(|(a, b)| CompatibilityConstraint::new(name(a), name(b))),
        );
    }

    let doc = CatalogDocument {
        tasks,
        behaviors,
        constraints: crate::catalog::ConstraintSection { incompatible },
    };
    Ok(Catalog::from_document(doc).expect("generated catalogs are valid"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub max_solutions: usize,
    pub stats: SolveStats,
    /// Runs that produced a configuration.
    pub solved: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub constraints: usize,
    pub search_space: u128,
    pub rows: Vec<BenchRow>,
}

/// Times `solve_optimal` for a start request of the first top-layer task on
/// an idle robot, `runs` times per entry of `max_solutions`. Domain
/// initialization is outside the timed region.
pub fn run_bench(
    catalog: &Catalog,
    max_solutions: &[usize],
    runs: usize,
    seed: u64,
) -> BenchReport {
    let network = ConstraintNetwork::from_catalog(catalog);
    let task = TaskId::new(0);
    let mut rows = Vec::new();
    for &m in max_solutions {
        let mut stats = SolveStats::default();
        let mut solved = 0;
        for run in 0..runs {
            let config = SolverConfig {
                max_solutions: m,
                max_search_time: Duration::from_secs(10),
                seed: seed.wrapping_add(run as u64),
                ..Default::default()
            };
            let mut state = CoordinatorState::new(catalog, SituationStore::new(), config);
            state.add_request(task, 1);
            let trigger = Trigger::StartRequest { task, priority: 1 };
            let table = initialize_domains(catalog, &state, &trigger, 1).expect("task 0 exists");
            let running = state.current.clone();
            let problem = Problem {
                catalog,
                network: &network,
                state: &state,
                running: &running,
            };
            let report = solve_optimal(&problem, &table, state.clone().next_solve_seed());
            stats.record(report.elapsed, report.timed_out);
            solved += usize::from(report.best.is_some());
        }
        rows.push(BenchRow {
            max_solutions: m,
            stats,
            solved,
        });
    }
    BenchReport {
        constraints: catalog.constraint_count(),
        search_space: DomainTable::full(catalog).search_space(),
        rows,
    }
}
