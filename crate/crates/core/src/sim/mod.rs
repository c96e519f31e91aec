//! Deterministic stand-in for behavior execution: scripted events, managed
//! behavior lifecycles and the replay loop.

mod managed;
mod scenario;

use std::collections::BTreeSet;

use crate::catalog::{BehaviorId, Catalog};
use crate::coordinator::{ActivationDelta, Coordinator, SolveStats};
use crate::csp::{Assignment, CspError, SolverConfig, TerminationCause, Trigger};
use crate::situation::SituationStore;
use crate::time::SimTime;
use crate::trace::{delta_lines, TraceLine};

pub use managed::{BehaviorManager, ManagedBehavior, Status, Transition};
pub use scenario::{
    parse_scenario, parse_scenario_document, BehaviorFinished, RawEvent, Scenario, ScenarioAction,
    ScenarioDocument, ScenarioError, ScenarioEvent, SetSituation, StartTask, StopTask,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("behavior {0} is already active")]
    AlreadyActive(String),
    #[error("behavior {0} is not active")]
    NotActive(String),
    #[error("behavior {0} activated in a situation that does not allow it")]
    Infeasible(String),
    #[error("managed behaviors diverged from the coordinator at {0}")]
    Desync(SimTime),
    #[error(transparent)]
    Csp(#[from] CspError),
}

/// Applies one scripted event. Situation changes also yield SITUATION_CHANGE
/// terminations for every active behavior whose conditions now fail.
pub fn apply_scenario_event(
    catalog: &Catalog,
    situation: &mut SituationStore,
    manager: &BehaviorManager,
    event: &ScenarioEvent,
) -> Vec<Trigger> {
    match &event.action {
        ScenarioAction::StartTask { task, priority } => {
            vec![Trigger::StartRequest {
                task: *task,
                priority: *priority,
            }]
        }
        ScenarioAction::StopTask { task } => vec![Trigger::StopRequest { task: *task }],
        ScenarioAction::BehaviorFinished { behavior, cause } => {
            vec![Trigger::BehaviorFinished {
                behavior: *behavior,
                cause: *cause,
            }]
        }
        ScenarioAction::SetSituation { key, value } => {
            situation.set(key.clone(), value.clone(), event.at);
            manager
                .active()
                .into_iter()
                .filter(|&b| !situation.holds_all(catalog.situation_conditions(b)))
                .map(|b| Trigger::BehaviorFinished {
                    behavior: b,
                    cause: TerminationCause::SituationChange,
                })
                .collect()
        }
    }
}

/// Result of replaying a scenario.
#[derive(Debug, Clone)]
pub struct Replay {
    pub trace: Vec<TraceLine>,
    pub deltas: Vec<(SimTime, ActivationDelta)>,
    pub final_assignment: Assignment,
    pub stats: SolveStats,
    pub transitions: Vec<Transition>,
}

impl Replay {
    pub fn activations(&self) -> usize {
        self.deltas.iter().map(|(_, d)| d.activated().count()).sum()
    }

    pub fn deactivations(&self) -> usize {
        self.deltas.iter().map(|(_, d)| d.deactivations.len()).sum()
    }

    pub fn failures(&self) -> usize {
        self.deltas.iter().map(|(_, d)| d.failures()).sum()
    }
}

/// Coordinator plus managed behaviors, stepped on simulated time.
pub struct Simulation<'c> {
    catalog: &'c Catalog,
    coordinator: Coordinator<'c>,
    manager: BehaviorManager,
    trace: Vec<TraceLine>,
    deltas: Vec<(SimTime, ActivationDelta)>,
}

impl<'c> Simulation<'c> {
    pub fn new(
        catalog: &'c Catalog,
        situation: SituationStore,
        config: SolverConfig,
    ) -> Result<Self, SimError> {
        Ok(Self {
            catalog,
            coordinator: Coordinator::new(catalog, situation, config, SimTime::ZERO)?,
            manager: BehaviorManager::new(catalog),
            trace: Vec::new(),
            deltas: Vec::new(),
        })
    }

    pub fn coordinator(&self) -> &Coordinator<'c> {
        &self.coordinator
    }

    pub fn coordinator_mut(&mut self) -> &mut Coordinator<'c> {
        &mut self.coordinator
    }

    pub fn manager(&self) -> &BehaviorManager {
        &self.manager
    }

    pub fn trace(&self) -> &[TraceLine] {
        &self.trace
    }

    /// One cycle at `now`: timeouts, then `events`, then due reactive starts.
    pub fn step(
        &mut self,
        now: SimTime,
        events: &[ScenarioEvent],
    ) -> Result<Vec<ActivationDelta>, SimError> {
        let mut triggers = self.manager.poll_timeouts(now);
        for e in events {
            let situation = self.coordinator.situation_mut();
            triggers.extend(apply_scenario_event(
                self.catalog,
                situation,
                &self.manager,
                e,
            ));
        }
        let deltas = self.coordinator.run_cycle(&triggers, now)?;
        for d in &deltas {
            self.apply(d, now)?;
            self.trace.extend(delta_lines(self.catalog, d, now));
            self.deltas.push((now, d.clone()));
        }
        let expected: BTreeSet<BehaviorId> = self
            .coordinator
            .state()
            .current
            .active_behaviors()
            .collect();
        if self.manager.active() != expected {
            return Err(SimError::Desync(now));
        }
        Ok(deltas)
    }

    fn apply(&mut self, delta: &ActivationDelta, now: SimTime) -> Result<(), SimError> {
        for e in &delta.deactivations {
            let Some(b) = e.subject.behavior() else {
                continue;
            };
            if !self.manager.is_active(b) {
                // already stopped by its own termination or a timeout poll
                continue;
            }
            let cause = e.cause.unwrap_or(TerminationCause::Interrupted);
            self.manager.terminate(self.catalog, b, cause, now)?;
        }
        let situation = &self.coordinator.state().situation;
        for b in delta.activated() {
            self.manager.activate(self.catalog, b, situation, now)?;
        }
        Ok(())
    }

    /// Earliest pending wake-up: reactive entry or timeout.
    fn next_internal(&self) -> Option<SimTime> {
        let queue = self
            .coordinator
            .state()
            .reactive_queue
            .iter()
            .map(|e| e.due)
            .min();
        match (queue, self.manager.next_timeout()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// Replays scripted events and internal wake-ups up to the horizon.
    pub fn run(&mut self, scenario: &Scenario) -> Result<(), SimError> {
        let horizon = scenario.horizon(self.coordinator.state().config.reactive_delay);
        let mut i = 0;
        loop {
            let next_event = scenario.events.get(i).map(|e| e.at);
            let now = match (next_event, self.next_internal()) {
                (Some(a), Some(b)) => a.min(b),
                (a, b) => match a.or(b) {
                    Some(t) => t,
                    None => break,
                },
            };
            if now > horizon {
                break;
            }
            let start = i;
            while i < scenario.events.len() && scenario.events[i].at == now {
                i += 1;
            }
            self.step(now, &scenario.events[start..i])?;
        }
        Ok(())
    }

    pub fn finish(self) -> Replay {
        Replay {
            trace: self.trace,
            deltas: self.deltas,
            final_assignment: self.coordinator.state().current.clone(),
            stats: *self.coordinator.stats(),
            transitions: self.manager.log().to_vec(),
        }
    }
}

/// Replays `scenario` from its initial situation.
pub fn replay(
    catalog: &Catalog,
    scenario: &Scenario,
    config: SolverConfig,
) -> Result<Replay, SimError> {
    let mut sim = Simulation::new(catalog, scenario.initial_situation.clone(), config)?;
    sim.run(scenario)?;
    Ok(sim.finish())
}
