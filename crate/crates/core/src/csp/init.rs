use crate::catalog::{BehaviorId, Catalog, TaskId};
use crate::situation::SituationStore;
use crate::state::CoordinatorState;

use super::{CspError, Domain, DomainTable, Priority, TerminationCause, Trigger, Value};

/// Candidates of `task` whose situation conditions all hold.
pub fn situation_feasible_set(
    catalog: &Catalog,
    task: TaskId,
    situation: &SituationStore,
) -> Result<Vec<BehaviorId>, CspError> {
    if task.index() >= catalog.num_tasks() {
        return Err(CspError::UnknownTask(task.to_string()));
    }
    Ok(catalog
        .candidates(task)
        .iter()
        .copied()
        .filter(|&b| situation.holds_all(catalog.situation_conditions(b)))
        .collect())
}

/// Tasks whose domains are opened for this trigger: the trigger task's
/// connected component plus any component where a running behavior has
/// become situation-infeasible.
pub fn solve_scope(catalog: &Catalog, state: &CoordinatorState, trigger: &Trigger) -> Vec<bool> {
    let components = catalog.components();
    let mut open = vec![false; components.len()];
    open[components.component_of(trigger.task(catalog))] = true;
    for b in state.current.active_behaviors() {
        if !state.situation.holds_all(catalog.situation_conditions(b)) {
            open[components.component_of(catalog.task_of(b))] = true;
        }
    }
    catalog
        .task_ids()
        .map(|t| open[components.component_of(t)])
        .collect()
}

/// Initial domains for one solve. `priority_floor` is the request priority
/// for a start request and the escalation level otherwise; running tasks
/// requested strictly above it keep running.
pub fn initialize_domains(
    catalog: &Catalog,
    state: &CoordinatorState,
    trigger: &Trigger,
    priority_floor: Priority,
) -> Result<DomainTable, CspError> {
    trigger.check(catalog)?;
    let trigger_task = trigger.task(catalog);
    let scope = solve_scope(catalog, state, trigger);
    let feasible = |t| situation_feasible_set(catalog, t, &state.situation);

    let mut domains = Vec::with_capacity(catalog.num_tasks());
    for task in catalog.task_ids() {
        let current = state.current.get(task);
        let domain = if task == trigger_task {
            match *trigger {
                Trigger::StartRequest { .. } => Domain::of_behaviors(false, feasible(task)?),
                Trigger::StopRequest { .. } => Domain::inactive_only(),
                Trigger::BehaviorFinished { behavior, cause } => match cause {
                    TerminationCause::GoalAchieved => Domain::inactive_only(),
                    TerminationCause::ProcessFailure
                    | TerminationCause::TimeOut
                    | TerminationCause::WrongProgress => Domain::of_behaviors(
                        true,
                        feasible(task)?.into_iter().filter(|&b| b != behavior),
                    ),
                    TerminationCause::SituationChange | TerminationCause::Interrupted => {
                        Domain::of_behaviors(true, feasible(task)?)
                    }
                },
            }
        } else if !scope[task.index()] {
            Domain::singleton(current)
        } else if catalog.start_on_request(task) && !current.is_active() {
            Domain::inactive_only()
        } else {
            let mut d = Domain::of_behaviors(true, feasible(task)?);
            let protected = state
                .live_priority(task)
                .is_some_and(|p| p > priority_floor);
            if current.is_active() && protected {
                d.remove(Value::Inactive);
            }
            d
        };
        domains.push(domain);
    }
    Ok(DomainTable::new(domains))
}
