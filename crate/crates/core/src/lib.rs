//! Behavior coordination by constraint-based configuration search.
//!
//! A [`Catalog`] describes tasks, the behaviors able to perform them and the
//! constraints between them. On every event the [`coordinator`] solves for the
//! set of active behaviors that best satisfies the live requests, and reports
//! the change as an ordered activation delta.

pub mod catalog;
pub mod coordinator;
pub mod csp;
pub mod input;
pub mod optimizer;
pub mod oracle;
pub mod sim;
pub mod situation;
pub mod state;
pub mod synth;
pub mod time;
pub mod trace;

pub use catalog::{parse_catalog, BehaviorId, Catalog, CatalogError, TaskId};
pub use coordinator::{ActivationDelta, Coordinator};
pub use csp::{Assignment, SolverConfig, TerminationCause, Trigger};
pub use optimizer::{objective_vector, solve_optimal, ObjectiveVector};
pub use sim::{parse_scenario, replay, Scenario};
pub use situation::{Scalar, SituationStore};
pub use state::CoordinatorState;
pub use time::SimTime;
