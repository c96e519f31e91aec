//! The coordination loop: requests, solves, deltas and the reactive queue.

mod delta;
mod reactive;
mod stats;

use crate::catalog::{Catalog, TaskId};
use crate::csp::{
    check_assignment, initialize_domains, situation_feasible_set, Assignment, AssignmentViolation,
    ConstraintNetwork, CspError, DomainTable, Priority, SolverConfig, TerminationCause, Trigger,
    Value,
};
use crate::optimizer::{solve_optimal, ObjectiveVector, Problem, Solution};
use crate::situation::SituationStore;
use crate::state::{CoordinatorState, QueueEntry};
use crate::time::SimTime;

pub use delta::{diff_assignments, ActivationDelta, DeltaEntry, Subject};
pub use reactive::{pop_due, update_reactive_queue, ReactiveIncompatibilitySet};
pub use stats::SolveStats;

/// Inputs and result of one solver invocation, kept when auditing.
#[derive(Debug, Clone)]
pub struct SolveAudit {
    pub table: DomainTable,
    pub state: CoordinatorState,
    pub objective: Option<ObjectiveVector>,
    pub timed_out: bool,
}

pub struct Coordinator<'c> {
    catalog: &'c Catalog,
    network: ConstraintNetwork,
    reactive: ReactiveIncompatibilitySet,
    state: CoordinatorState,
    stats: SolveStats,
    audit: Option<Vec<SolveAudit>>,
}

/// Outcome of the solve stage of one event.
struct Resolution {
    assignment: Assignment,
    floor: Priority,
    fallback: bool,
}

impl<'c> Coordinator<'c> {
    /// Every reactive task is queued at `start + reactive_delay`.
    pub fn new(
        catalog: &'c Catalog,
        situation: SituationStore,
        config: SolverConfig,
        start: SimTime,
    ) -> Result<Self, CspError> {
        config.validate()?;
        let mut state = CoordinatorState::new(catalog, situation, config);
        state.clock = start;
        for t in catalog.task_ids().filter(|&t| catalog.reactive_start(t)) {
            state.reactive_queue.push(QueueEntry {
                task: t,
                due: start + config.reactive_delay,
            });
        }
        Ok(Self {
            catalog,
            network: ConstraintNetwork::from_catalog(catalog),
            reactive: ReactiveIncompatibilitySet::from_catalog(catalog),
            state,
            stats: SolveStats::default(),
            audit: None,
        })
    }

    /// Starts from an existing configuration instead of all-inactive.
    pub fn with_state(catalog: &'c Catalog, state: CoordinatorState) -> Result<Self, CspError> {
        state.config.validate()?;
        if state.current.len() != catalog.num_tasks() {
            return Err(CspError::InvalidConfig(
                "assignment size does not match the catalog",
            ));
        }
        Ok(Self {
            catalog,
            network: ConstraintNetwork::from_catalog(catalog),
            reactive: ReactiveIncompatibilitySet::from_catalog(catalog),
            state,
            stats: SolveStats::default(),
            audit: None,
        })
    }

    pub fn catalog(&self) -> &'c Catalog {
        self.catalog
    }

    pub fn state(&self) -> &CoordinatorState {
        &self.state
    }

    pub fn situation_mut(&mut self) -> &mut SituationStore {
        &mut self.state.situation
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    pub fn network(&self) -> &ConstraintNetwork {
        &self.network
    }

    pub fn enable_audit(&mut self) {
        self.audit.get_or_insert_with(Vec::new);
    }

    pub fn take_audit(&mut self) -> Vec<SolveAudit> {
        self.audit.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn violations(&self) -> Vec<AssignmentViolation> {
        check_assignment(&self.state.current, self.catalog, &self.state.situation)
    }

    /// Processes the events in order, then the reactive entries due by `now`.
    pub fn run_cycle(
        &mut self,
        events: &[Trigger],
        now: SimTime,
    ) -> Result<Vec<ActivationDelta>, CspError> {
        self.state.clock = self.state.clock.max(now);
        let mut out = Vec::new();
        for e in events {
            let d = self.handle_event(*e)?;
            if !d.is_empty() {
                out.push(d);
            }
        }
        for entry in pop_due(&mut self.state.reactive_queue, self.state.clock) {
            let task = entry.task;
            if self.state.current.is_running(task) {
                continue;
            }
            if situation_feasible_set(self.catalog, task, &self.state.situation)?.is_empty() {
                continue;
            }
            let d = self.start(task, 0, true)?;
            if !d.is_empty() {
                out.push(d);
            }
        }
        Ok(out)
    }

    pub fn handle_event(&mut self, event: Trigger) -> Result<ActivationDelta, CspError> {
        event.check(self.catalog)?;
        match event {
            Trigger::StartRequest { task, priority } => self.start(task, priority, false),
            Trigger::StopRequest { task } => self.stop(task),
            Trigger::BehaviorFinished { behavior, cause } => self.finished(behavior, cause),
        }
    }

    fn start(
        &mut self,
        task: TaskId,
        priority: Priority,
        internal: bool,
    ) -> Result<ActivationDelta, CspError> {
        let before = self.state.current.clone();
        self.state.add_request(task, priority);
        let trigger = Trigger::StartRequest { task, priority };
        match self.solve_at(&trigger, priority, &before)? {
            Some(a) => Ok(self.commit(
                &before,
                &before,
                Resolution {
                    assignment: a,
                    floor: priority,
                    fallback: false,
                },
                None,
            )),
            None if internal => {
                self.state.deactivate_request(task);
                Ok(ActivationDelta::default())
            }
            None => {
                let assignment = self.fallback(before.clone());
                let mut delta = self.commit(
                    &before,
                    &before,
                    Resolution {
                        assignment,
                        floor: priority,
                        fallback: true,
                    },
                    None,
                );
                delta.activations.push(DeltaEntry {
                    subject: Subject::Task(task),
                    priority,
                    success: false,
                    cause: None,
                });
                self.state.deactivate_request(task);
                Ok(delta)
            }
        }
    }

    fn stop(&mut self, task: TaskId) -> Result<ActivationDelta, CspError> {
        let before = self.state.current.clone();
        let floor = self
            .state
            .deactivate_request(task)
            .map_or(0, |r| r.priority);
        let trigger = Trigger::StopRequest { task };
        let res = match self.solve_at(&trigger, floor, &before)? {
            Some(assignment) => Resolution {
                assignment,
                floor,
                fallback: false,
            },
            None => {
                let mut base = before.clone();
                base.set(task, Value::Inactive);
                Resolution {
                    assignment: self.fallback(base),
                    floor,
                    fallback: true,
                }
            }
        };
        Ok(self.commit(&before, &before, res, None))
    }

    fn finished(
        &mut self,
        behavior: crate::BehaviorId,
        cause: TerminationCause,
    ) -> Result<ActivationDelta, CspError> {
        let task = self.catalog.task_of(behavior);
        if self.state.current.get(task) != Value::Behavior(behavior) {
            return Ok(ActivationDelta::default());
        }
        let before = self.state.current.clone();
        if cause == TerminationCause::GoalAchieved {
            self.state.deactivate_request(task);
        }
        let label = self.state.live_priority(task);
        let mut baseline = before.clone();
        baseline.set(task, Value::Inactive);
        self.state.current = baseline.clone();

        let trigger = Trigger::BehaviorFinished { behavior, cause };
        let mut res = None;
        match label {
            Some(p) => {
                if let Some(a) = self.solve_at(&trigger, p, &before)? {
                    res = Some(Resolution {
                        assignment: a,
                        floor: p,
                        fallback: false,
                    });
                }
            }
            None => {
                for floor in self.escalation_floors() {
                    if let Some(a) = self.solve_at(&trigger, floor, &before)? {
                        res = Some(Resolution {
                            assignment: a,
                            floor,
                            fallback: false,
                        });
                        break;
                    }
                }
            }
        }
        let res = match res {
            Some(r) => r,
            None => Resolution {
                assignment: self.fallback(baseline.clone()),
                floor: label.unwrap_or(0),
                fallback: true,
            },
        };
        let termination = DeltaEntry {
            subject: Subject::Behavior(behavior),
            priority: label.unwrap_or(res.floor),
            success: cause.is_success(),
            cause: Some(cause),
        };
        Ok(self.commit(&before, &baseline, res, Some(termination)))
    }

    /// Floors tried in order for a non-requested termination. Floors between
    /// two live priorities give identical domains, so only those are tried;
    /// the last one protects nothing.
    fn escalation_floors(&self) -> Vec<Priority> {
        let mut floors: Vec<Priority> = std::iter::once(0)
            .chain(self.state.active_requests().map(|r| r.priority))
            .collect();
        floors.sort_unstable();
        floors.dedup();
        floors
    }

    fn solve_at(
        &mut self,
        trigger: &Trigger,
        floor: Priority,
        running: &Assignment,
    ) -> Result<Option<Assignment>, CspError> {
        let table = initialize_domains(self.catalog, &self.state, trigger, floor)?;
        let seed = self.state.next_solve_seed();
        let problem = Problem {
            catalog: self.catalog,
            network: &self.network,
            state: &self.state,
            running,
        };
        let report = solve_optimal(&problem, &table, seed);
        self.stats.record(report.elapsed, report.timed_out);
        if let Some(audit) = self.audit.as_mut() {
            audit.push(SolveAudit {
                table,
                state: self.state.clone(),
                objective: report.best.as_ref().map(|s| s.objective),
                timed_out: report.timed_out,
            });
        }
        Ok(report.best.map(|Solution { assignment, .. }| assignment))
    }

    /// Deactivates, to a fixpoint, every behavior that violates a constraint
    /// in `assignment`.
    fn fallback(&self, mut assignment: Assignment) -> Assignment {
        loop {
            let violations = check_assignment(&assignment, self.catalog, &self.state.situation);
            if violations.is_empty() {
                return assignment;
            }
            for v in violations {
                let task = match v {
                    AssignmentViolation::NotACandidate { task, .. }
                    | AssignmentViolation::RequirementUnmet { task, .. }
                    | AssignmentViolation::RequiredPerformance { task, .. }
                    | AssignmentViolation::TaskPerformance { task, .. }
                    | AssignmentViolation::SituationInfeasible { task, .. } => task,
                    AssignmentViolation::Incompatible { b, .. } => b,
                };
                assignment.set(task, Value::Inactive);
            }
        }
    }

    /// Installs the resolved assignment and returns the labeled delta.
    /// `before` is the configuration prior to the event, `baseline` the one
    /// the diff is taken against.
    fn commit(
        &mut self,
        before: &Assignment,
        baseline: &Assignment,
        res: Resolution,
        termination: Option<DeltaEntry>,
    ) -> ActivationDelta {
        let mut delta = diff_assignments(self.catalog, baseline, &res.assignment);
        for e in delta
            .deactivations
            .iter_mut()
            .chain(delta.activations.iter_mut())
        {
            let task = match e.subject {
                Subject::Behavior(b) => self.catalog.task_of(b),
                Subject::Task(t) => t,
            };
            e.priority = self.state.live_priority(task).unwrap_or(res.floor);
        }
        if res.fallback {
            for e in &mut delta.deactivations {
                e.success = false;
            }
        }
        if let Some(t) = termination {
            delta.deactivations.insert(0, t);
        }

        self.state.current = res.assignment;
        let idle: Vec<TaskId> = self
            .catalog
            .task_ids()
            .filter(|&t| !self.state.current.is_running(t))
            .collect();
        for t in idle {
            self.state.deactivate_request(t);
        }

        let started: Vec<TaskId> = self
            .catalog
            .task_ids()
            .filter(|&t| !before.is_running(t) && self.state.current.is_running(t))
            .collect();
        let finished: Vec<TaskId> = self
            .catalog
            .task_ids()
            .filter(|&t| before.is_running(t) && !self.state.current.is_running(t))
            .collect();
        update_reactive_queue(
            &mut self.state.reactive_queue,
            &self.reactive,
            &started,
            &finished,
            self.state.clock,
            self.state.config.reactive_delay,
        );
        delta
    }
}

#[cfg(test)]
mod tests;
