#![allow(dead_code)]

use std::time::Duration;

use behavior_coord::csp::{
    initialize_domains, solve_scope, Domain, DomainTable, Priority, TerminationCause, Trigger,
    Value,
};
use behavior_coord::optimizer::{solve_optimal, Problem, SolveReport};
use behavior_coord::synth::Instance;
use behavior_coord::{Catalog, CoordinatorState};

/// State and priority floor for a single solve of `inst.trigger`, set up
/// the way the coordinator does before its first solve.
pub fn prepare(inst: &Instance) -> (CoordinatorState, Priority) {
    let mut state = inst.state.clone();
    let floor = match inst.trigger {
        Trigger::StartRequest { task, priority } => {
            state.add_request(task, priority);
            priority
        }
        Trigger::StopRequest { task } => state.deactivate_request(task).map_or(0, |r| r.priority),
        Trigger::BehaviorFinished { behavior, .. } => state
            .live_priority(inst.catalog.task_of(behavior))
            .unwrap_or(0),
    };
    (state, floor)
}

pub fn domains(inst: &Instance, state: &CoordinatorState, floor: Priority) -> DomainTable {
    initialize_domains(&inst.catalog, state, &inst.trigger, floor).expect("trigger is valid")
}

/// Exhaustive optimizer run: as many searches as the table has assignments.
pub fn solve_exhaustive(
    catalog: &Catalog,
    state: &mut CoordinatorState,
    table: &DomainTable,
    seed: u64,
) -> SolveReport {
    state.config.max_solutions = table.search_space().clamp(1, 1 << 20) as usize;
    state.config.max_search_time = Duration::from_secs(30);
    let network = behavior_coord::csp::ConstraintNetwork::from_catalog(catalog);
    let state = &*state;
    let problem = Problem {
        catalog,
        network: &network,
        state,
        running: &state.current,
    };
    solve_optimal(&problem, table, seed)
}

/// Initialization rules applied without looking at the situation: every
/// candidate stays in play wherever the policy allows it.
pub fn policy_domains(
    catalog: &Catalog,
    state: &CoordinatorState,
    trigger: &Trigger,
    floor: Priority,
) -> DomainTable {
    let scope = solve_scope(catalog, state, trigger);
    let trigger_task = trigger.task(catalog);
    let all = |t| catalog.candidates(t).iter().copied();
    let domains = catalog
        .task_ids()
        .map(|task| {
            let current = state.current.get(task);
            if task == trigger_task {
                match *trigger {
                    Trigger::StartRequest { .. } => Domain::of_behaviors(false, all(task)),
                    Trigger::StopRequest { .. } => Domain::inactive_only(),
                    Trigger::BehaviorFinished {
                        cause: TerminationCause::GoalAchieved,
                        ..
                    } => Domain::inactive_only(),
                    Trigger::BehaviorFinished { behavior, cause }
                        if !cause.is_success() && retry_excludes(cause) =>
                    {
                        Domain::of_behaviors(true, all(task).filter(|&b| b != behavior))
                    }
                    Trigger::BehaviorFinished { .. } => Domain::of_behaviors(true, all(task)),
                }
            } else if !scope[task.index()] {
                Domain::singleton(current)
            } else if catalog.start_on_request(task) && !current.is_active() {
                Domain::inactive_only()
            } else {
                let mut d = Domain::of_behaviors(true, all(task));
                if current.is_active() && state.live_priority(task).is_some_and(|p| p > floor) {
                    d.remove(Value::Inactive);
                }
                d
            }
        })
        .collect();
    DomainTable::new(domains)
}

fn retry_excludes(cause: TerminationCause) -> bool {
    matches!(
        cause,
        TerminationCause::ProcessFailure
            | TerminationCause::TimeOut
            | TerminationCause::WrongProgress
    )
}
