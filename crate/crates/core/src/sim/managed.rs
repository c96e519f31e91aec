use std::collections::BTreeSet;

use crate::catalog::{BehaviorId, Catalog};
use crate::csp::{TerminationCause, Trigger};
use crate::situation::SituationStore;
use crate::time::SimTime;

use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Inactive,
    Active,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManagedBehavior {
    pub behavior: BehaviorId,
    pub status: Status,
    pub activation_time: Option<SimTime>,
    pub timeout: Option<std::time::Duration>,
}

/// One lifecycle transition, for the replay log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub at: SimTime,
    pub behavior: BehaviorId,
    pub active: bool,
    pub cause: Option<TerminationCause>,
}

/// Scripted stand-in for the execution managers of every behavior.
#[derive(Debug, Clone)]
pub struct BehaviorManager {
    behaviors: Vec<ManagedBehavior>,
    log: Vec<Transition>,
}

impl BehaviorManager {
    pub fn new(catalog: &Catalog) -> Self {
        let behaviors = catalog
            .behavior_ids()
            .map(|b| ManagedBehavior {
                behavior: b,
                status: Status::Inactive,
                activation_time: None,
                timeout: catalog.timeout(b),
            })
            .collect();
        Self {
            behaviors,
            log: Vec::new(),
        }
    }

    pub fn get(&self, behavior: BehaviorId) -> &ManagedBehavior {
        &self.behaviors[behavior.index()]
    }

    pub fn is_active(&self, behavior: BehaviorId) -> bool {
        self.get(behavior).status == Status::Active
    }

    pub fn active(&self) -> BTreeSet<BehaviorId> {
        self.behaviors
            .iter()
            .filter(|m| m.status == Status::Active)
            .map(|m| m.behavior)
            .collect()
    }

    pub fn log(&self) -> &[Transition] {
        &self.log
    }

    pub fn activate(
        &mut self,
        catalog: &Catalog,
        behavior: BehaviorId,
        situation: &SituationStore,
        now: SimTime,
    ) -> Result<(), SimError> {
        let name = || catalog.behavior_name(behavior).to_string();
        if self.is_active(behavior) {
            return Err(SimError::AlreadyActive(name()));
        }
        if !situation.holds_all(catalog.situation_conditions(behavior)) {
            return Err(SimError::Infeasible(name()));
        }
        let m = &mut self.behaviors[behavior.index()];
        m.status = Status::Active;
        m.activation_time = Some(now);
        self.log.push(Transition {
            at: now,
            behavior,
            active: true,
            cause: None,
        });
        Ok(())
    }

    /// Coordinator-initiated stop; recorded as INTERRUPTED.
    pub fn deactivate(
        &mut self,
        catalog: &Catalog,
        behavior: BehaviorId,
        now: SimTime,
    ) -> Result<(), SimError> {
        self.terminate(catalog, behavior, TerminationCause::Interrupted, now)
    }

    pub fn terminate(
        &mut self,
        catalog: &Catalog,
        behavior: BehaviorId,
        cause: TerminationCause,
        now: SimTime,
    ) -> Result<(), SimError> {
        if !self.is_active(behavior) {
            return Err(SimError::NotActive(
                catalog.behavior_name(behavior).to_string(),
            ));
        }
        self.behaviors[behavior.index()].status = Status::Inactive;
        self.log.push(Transition {
            at: now,
            behavior,
            active: false,
            cause: Some(cause),
        });
        Ok(())
    }

    /// TIME_OUT for every active behavior whose elapsed time strictly exceeds
    /// its timeout. Reported behaviors become inactive.
    pub fn poll_timeouts(&mut self, now: SimTime) -> Vec<Trigger> {
        let mut out = Vec::new();
        for m in &mut self.behaviors {
            let (Status::Active, Some(timeout), Some(since)) =
                (m.status, m.timeout, m.activation_time)
            else {
                continue;
            };
            if now.saturating_since(since) > timeout {
                m.status = Status::Inactive;
                self.log.push(Transition {
                    at: now,
                    behavior: m.behavior,
                    active: false,
                    cause: Some(TerminationCause::TimeOut),
                });
                out.push(Trigger::BehaviorFinished {
                    behavior: m.behavior,
                    cause: TerminationCause::TimeOut,
                });
            }
        }
        out
    }

    /// Earliest instant at which `poll_timeouts` would fire.
    pub fn next_timeout(&self) -> Option<SimTime> {
        self.behaviors
            .iter()
            .filter(|m| m.status == Status::Active)
            .filter_map(|m| {
                Some(m.activation_time? + m.timeout? + std::time::Duration::from_millis(1))
            })
            .min()
    }
}
