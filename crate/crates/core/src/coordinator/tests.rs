use std::collections::BTreeSet;

use super::*;
use crate::csp::testing::{aerial, mini, target_following};
use crate::parse_catalog;

fn names(c: &Catalog, entries: &[DeltaEntry]) -> Vec<String> {
    entries
        .iter()
        .map(|e| e.subject.name(c).to_string())
        .collect()
}

fn active(c: &Catalog, co: &Coordinator<'_>) -> BTreeSet<String> {
    co.state()
        .current
        .active_behaviors()
        .map(|b| c.behavior_name(b).to_string())
        .collect()
}

fn start(c: &Catalog, task: &str, priority: Priority) -> Trigger {
    Trigger::StartRequest {
        task: c.task_id(task).unwrap(),
        priority,
    }
}

fn finished(c: &Catalog, behavior: &str, cause: TerminationCause) -> Trigger {
    Trigger::BehaviorFinished {
        behavior: c.behavior_id(behavior).unwrap(),
        cause,
    }
}

#[test]
fn target_following_sequence() {
    let c = target_following();
    let store = SituationStore::from_values([
        ("target_in_range", true.into()),
        ("target_image_small", true.into()),
        ("target_near", false.into()),
    ]);
    let mut co = Coordinator::new(&c, store, SolverConfig::default(), SimTime::ZERO).unwrap();

    let d = co
        .handle_event(start(&c, "ControlMotionAggressiveManeuvers", 1))
        .unwrap();
    assert_eq!(
        names(&c, &d.activations),
        ["MPCMotionControllerHighAcceleration"]
    );

    let d = co.handle_event(start(&c, "ApproachTarget", 1)).unwrap();
    assert!(d.deactivations.is_empty());
    assert_eq!(
        names(&c, &d.activations),
        ["LongRangeTargetRecognition", "MotionPlannerCloseTarget"]
    );

    co.situation_mut()
        .set("target_near", true.into(), SimTime::from_millis(5000));
    let d = co
        .handle_event(finished(
            &c,
            "MotionPlannerCloseTarget",
            TerminationCause::SituationChange,
        ))
        .unwrap();
    assert_eq!(
        names(&c, &d.deactivations),
        ["MotionPlannerCloseTarget", "LongRangeTargetRecognition"]
    );
    assert!(d.deactivations[0].is_termination());
    assert_eq!(
        names(&c, &d.activations),
        [
            "CloseRangeTargetRecognition",
            "PNPLocalizer",
            "MotionPlannerCloseTarget"
        ]
    );
    let expected: BTreeSet<String> = [
        "PNPLocalizer",
        "CloseRangeTargetRecognition",
        "MotionPlannerCloseTarget",
        "MPCMotionControllerHighAcceleration",
    ]
    .map(String::from)
    .into();
    assert_eq!(active(&c, &co), expected);
    assert!(co.violations().is_empty());
}

#[test]
fn restart_of_running_task_is_empty() {
    let c = mini();
    let mut co = Coordinator::new(
        &c,
        SituationStore::new(),
        SolverConfig::default(),
        SimTime::ZERO,
    )
    .unwrap();
    co.handle_event(start(&c, "A", 1)).unwrap();
    let d = co.handle_event(start(&c, "A", 1)).unwrap();
    assert!(d.is_empty());
}

#[test]
fn stale_termination_is_ignored() {
    let c = mini();
    let mut co = Coordinator::new(
        &c,
        SituationStore::new(),
        SolverConfig::default(),
        SimTime::ZERO,
    )
    .unwrap();
    let d = co
        .handle_event(finished(&c, "a1", TerminationCause::TimeOut))
        .unwrap();
    assert!(d.is_empty());
}

#[test]
fn goal_achieved_ends_request() {
    let c = mini();
    let mut co = Coordinator::new(
        &c,
        SituationStore::new(),
        SolverConfig::default(),
        SimTime::ZERO,
    )
    .unwrap();
    co.handle_event(start(&c, "A", 1)).unwrap();
    let d = co
        .handle_event(finished(&c, "a1", TerminationCause::GoalAchieved))
        .unwrap();
    assert_eq!(names(&c, &d.deactivations), ["a1", "b1"]);
    assert!(d.deactivations[0].success);
    assert!(d.activations.is_empty());
    assert_eq!(co.state().active_requests().count(), 0);
}

#[test]
fn failure_switches_behavior_and_keeps_request() {
    let c = mini();
    let mut co = Coordinator::new(
        &c,
        SituationStore::new(),
        SolverConfig::default(),
        SimTime::ZERO,
    )
    .unwrap();
    co.handle_event(start(&c, "A", 1)).unwrap();
    let d = co
        .handle_event(finished(&c, "a1", TerminationCause::ProcessFailure))
        .unwrap();
    assert!(!d.deactivations[0].success);
    assert_eq!(names(&c, &d.activations), ["a2"]);
    assert_eq!(co.state().live_priority(c.task_id("A").unwrap()), Some(1));
}

#[test]
fn stop_request_deactivates_chain() {
    let c = mini();
    let mut co = Coordinator::new(
        &c,
        SituationStore::new(),
        SolverConfig::default(),
        SimTime::ZERO,
    )
    .unwrap();
    co.handle_event(start(&c, "A", 2)).unwrap();
    let d = co
        .handle_event(Trigger::StopRequest {
            task: c.task_id("A").unwrap(),
        })
        .unwrap();
    assert_eq!(names(&c, &d.deactivations), ["a1", "b1"]);
    assert!(d.deactivations.iter().all(|e| e.priority == 2));
    assert!(co.state().current.active_behaviors().next().is_none());
    let again = co
        .handle_event(Trigger::StopRequest {
            task: c.task_id("A").unwrap(),
        })
        .unwrap();
    assert!(again.is_empty());
}

#[test]
fn infeasible_start_fails_without_changes() {
    let c = aerial();
    let mut co = Coordinator::new(
        &c,
        SituationStore::from_values([("flying", false.into())]),
        SolverConfig::default(),
        SimTime::ZERO,
    )
    .unwrap();
    let d = co.handle_event(start(&c, "Land", 1)).unwrap();
    assert_eq!(d.activations.len(), 1);
    assert!(!d.activations[0].success);
    assert_eq!(d.activated().count(), 0);
    assert_eq!(co.state().active_requests().count(), 0);
}

#[test]
fn higher_priority_task_is_protected() {
    let c = aerial();
    let store =
        SituationStore::from_values([("flying", true.into()), ("gps_available", true.into())]);
    let mut co = Coordinator::new(&c, store, SolverConfig::default(), SimTime::ZERO).unwrap();
    co.handle_event(start(&c, "FollowPath", 3)).unwrap();
    let d = co.handle_event(start(&c, "Rotate", 1)).unwrap();
    assert!(d.deactivations.is_empty());
    assert!(!d.activations[0].success);
    assert!(co
        .state()
        .current
        .is_running(c.task_id("FollowPath").unwrap()));

    // equal priority preempts
    let d = co.handle_event(start(&c, "Rotate", 3)).unwrap();
    assert_eq!(names(&c, &d.deactivations), ["FollowPathPlanner"]);
    assert_eq!(
        co.state().live_priority(c.task_id("FollowPath").unwrap()),
        None
    );
}

const ESCALATION: &str = "
tasks:
  - {name: Loc}
  - {name: Planner, start_on_request: true}
  - {name: Operator, start_on_request: true}
behaviors:
  - {name: l1, task: Loc, suitability: 1.0}
  - {name: l2, task: Loc, suitability: 0.6}
  - {name: pl, task: Planner, suitability: 1.0, requires: [{task: Loc, min_performance: 0.9}]}
  - {name: op, task: Operator, suitability: 1.0, requires: [{task: Loc, min_performance: 0.5}]}
";

#[test]
fn escalation_stops_lowest_priority_first() {
    let c = parse_catalog(ESCALATION).unwrap();
    let mut co = Coordinator::new(
        &c,
        SituationStore::new(),
        SolverConfig::default(),
        SimTime::ZERO,
    )
    .unwrap();
    co.handle_event(start(&c, "Planner", 1)).unwrap();
    co.handle_event(start(&c, "Operator", 2)).unwrap();
    let d = co
        .handle_event(finished(&c, "l1", TerminationCause::ProcessFailure))
        .unwrap();
    let expected: BTreeSet<String> = ["op", "l2"].map(String::from).into();
    assert_eq!(active(&c, &co), expected);
    assert_eq!(names(&c, &d.deactivations), ["l1", "pl"]);
    assert_eq!(names(&c, &d.activations), ["l2"]);
    assert_eq!(
        co.state().live_priority(c.task_id("Operator").unwrap()),
        Some(2)
    );
    assert_eq!(
        co.state().live_priority(c.task_id("Planner").unwrap()),
        None
    );
}

#[test]
fn non_requested_failure_escalates_to_stop() {
    let c = parse_catalog(
        "tasks: [{name: Loc}, {name: Op, start_on_request: true}]\n\
         behaviors:\n  - {name: l1, task: Loc, suitability: 1}\n  - {name: op, task: Op, suitability: 1, requires: [{task: Loc}]}\n",
    )
    .unwrap();
    let mut co = Coordinator::new(
        &c,
        SituationStore::new(),
        SolverConfig::default(),
        SimTime::ZERO,
    )
    .unwrap();
    co.handle_event(start(&c, "Op", 5)).unwrap();
    let d = co
        .handle_event(finished(&c, "l1", TerminationCause::ProcessFailure))
        .unwrap();
    assert_eq!(names(&c, &d.deactivations), ["l1", "op"]);
    assert!(d.deactivations[1].success);
    assert_eq!(d.deactivations[1].priority, 5);
    assert!(co.state().current.active_behaviors().next().is_none());
}

#[test]
fn total_failure_falls_back_safely() {
    let c = parse_catalog(
        "tasks: [{name: Loc}, {name: Op, start_on_request: true}]\n\
         behaviors:\n  - {name: l1, task: Loc, suitability: 1}\n  - {name: op, task: Op, suitability: 1, requires: [{task: Loc}]}\n",
    )
    .unwrap();
    let mut co = Coordinator::new(
        &c,
        SituationStore::new(),
        SolverConfig::default(),
        SimTime::ZERO,
    )
    .unwrap();
    co.handle_event(start(&c, "Op", 5)).unwrap();
    // Loc is requested too, so no escalation: floor 1 keeps Op protected
    co.handle_event(start(&c, "Loc", 1)).unwrap();
    let d = co
        .handle_event(finished(&c, "l1", TerminationCause::ProcessFailure))
        .unwrap();
    assert_eq!(names(&c, &d.deactivations), ["l1", "op"]);
    assert!(d.deactivations.iter().all(|e| !e.success));
    assert!(co.state().current.active_behaviors().next().is_none());
    assert!(co.violations().is_empty());
    assert_eq!(co.state().active_requests().count(), 0);
}

#[test]
fn reactive_hover_after_delay() {
    let c = aerial();
    let store =
        SituationStore::from_values([("flying", true.into()), ("gps_available", true.into())]);
    let config = SolverConfig::default();
    let mut co = Coordinator::new(&c, store, config, SimTime::ZERO).unwrap();
    // bootstrap entry is cancelled by the first motion start
    let d = co
        .run_cycle(&[start(&c, "FollowPath", 1)], SimTime::ZERO)
        .unwrap();
    assert_eq!(d.len(), 1);
    assert!(co.state().reactive_queue.is_empty());

    let t1 = SimTime::from_millis(1000);
    co.run_cycle(
        &[finished(
            &c,
            "FollowPathPlanner",
            TerminationCause::GoalAchieved,
        )],
        t1,
    )
    .unwrap();
    assert_eq!(
        co.state().queued(c.task_id("Hover").unwrap()),
        Some(t1 + config.reactive_delay)
    );

    assert!(co
        .run_cycle(&[], SimTime::from_millis(1499))
        .unwrap()
        .is_empty());
    let d = co.run_cycle(&[], SimTime::from_millis(1500)).unwrap();
    assert_eq!(d.len(), 1);
    assert!(names(&c, &d[0].activations).contains(&"HoverPID".to_string()));
    assert!(d[0].activations.iter().all(|e| e.priority == 0));
}

#[test]
fn reactive_start_cancelled_by_next_motion() {
    let c = aerial();
    let store =
        SituationStore::from_values([("flying", true.into()), ("gps_available", true.into())]);
    let mut co = Coordinator::new(&c, store, SolverConfig::default(), SimTime::ZERO).unwrap();
    co.run_cycle(&[start(&c, "FollowPath", 1)], SimTime::ZERO)
        .unwrap();
    co.run_cycle(
        &[finished(
            &c,
            "FollowPathPlanner",
            TerminationCause::GoalAchieved,
        )],
        SimTime::from_millis(1000),
    )
    .unwrap();
    co.run_cycle(&[start(&c, "Rotate", 1)], SimTime::from_millis(1200))
        .unwrap();
    let d = co.run_cycle(&[], SimTime::from_millis(5000)).unwrap();
    assert!(d.is_empty());
    assert!(!co.state().current.is_running(c.task_id("Hover").unwrap()));
}

#[test]
fn delta_applies_to_previous_set() {
    let c = target_following();
    let store = SituationStore::from_values([
        ("target_in_range", false.into()),
        ("target_image_small", true.into()),
        ("target_near", false.into()),
    ]);
    let mut co = Coordinator::new(&c, store, SolverConfig::default(), SimTime::ZERO).unwrap();
    let mut prev: BTreeSet<_> = BTreeSet::new();
    let events = [
        start(&c, "ApproachTarget", 1),
        start(&c, "ControlMotionAggressiveManeuvers", 2),
        Trigger::StopRequest {
            task: c.task_id("ControlMotionAggressiveManeuvers").unwrap(),
        },
    ];
    for e in events {
        let d = co.handle_event(e).unwrap();
        let now: BTreeSet<_> = co.state().current.active_behaviors().collect();
        assert_eq!(d.apply(&prev), now);
        prev = now;
        assert!(co.violations().is_empty());
    }
}
