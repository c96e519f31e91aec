//! One PASS/FAIL line per acceptance criterion. Exits non-zero on any FAIL.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use behavior_coord::catalog::{BehaviorSpec, CatalogDocument, TaskSpec};
use behavior_coord::csp::{
    check_assignment, propagate, search, ConstraintNetwork, Domain, DomainTable, NoGood, NoGoodSet,
    SearchContext, SearchOutcome, Trigger, Value,
};
use behavior_coord::oracle::{enumerate_optimal, valid_assignments};
use behavior_coord::sim::Replay;
use behavior_coord::synth::{
    generate_catalog, random_instance, random_trigger, run_bench, SynthParams,
};
use behavior_coord::{
    parse_catalog, parse_scenario, replay, Assignment, Catalog, Coordinator, SolverConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TARGET_CATALOG: &str = include_str!("../../core/data/target_following.catalog.yaml");
const TARGET_SCENARIO: &str = include_str!("../../core/data/target_following.scenario.yaml");
const AERIAL_CATALOG: &str = include_str!("../../core/data/aerial.catalog.yaml");

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let mut solved = 0;
    for seed in 0..250u64 {
        let inst = random_instance(seed);
        let (mut state, floor) = common::prepare(&inst);
        let table = common::domains(&inst, &state, floor);
        let report = common::solve_exhaustive(&inst.catalog, &mut state, &table, seed);
        let oracle =
            enumerate_optimal(&inst.catalog, &table, &state, 1 << 20).map_err(|e| e.to_string())?;
        let got = report.best.as_ref().map(|s| s.objective);
        ensure(got == oracle.best_vector, || {
            format!(
                "seed {seed}: solver {got:?} vs oracle {:?}",
                oracle.best_vector
            )
        })?;
        if let Some(s) = report.best {
            let v = check_assignment(&s.assignment, &inst.catalog, &state.situation);
            ensure(v.is_empty(), || {
                format!("seed {seed}: {} violations", v.len())
            })?;
            solved += 1;
        }
    }
    Ok(format!(
        "250 instances, {solved} with solutions, {:.2?}",
        started.elapsed()
    ))
}

fn active_names(catalog: &Catalog, a: &Assignment) -> BTreeSet<String> {
    a.active_behaviors()
        .map(|b| catalog.behavior_name(b).to_string())
        .collect()
}

fn scenario_replay() -> Outcome {
    let catalog = parse_catalog(TARGET_CATALOG).map_err(|e| e.to_string())?;
    let scenario = parse_scenario(TARGET_SCENARIO, &catalog).map_err(|e| e.to_string())?;
    let r = replay(&catalog, &scenario, SolverConfig::default()).map_err(|e| e.to_string())?;
    let approach = &r.deltas[1].1;
    ensure(
        approach.activated().count() == 2 && approach.deactivations.is_empty(),
        || {
            format!(
                "request delta: {} activations",
                approach.activated().count()
            )
        },
    )?;
    let change = &r.deltas[2].1;
    ensure(
        change.deactivations.len() == 2 && change.activated().count() == 3,
        || {
            format!(
                "termination delta: -{} +{}",
                change.deactivations.len(),
                change.activated().count()
            )
        },
    )?;
    let expected: BTreeSet<String> = [
        "MPCMotionControllerHighAcceleration",
        "MotionPlannerCloseTarget",
        "CloseRangeTargetRecognition",
        "PNPLocalizer",
    ]
    .map(String::from)
    .into();
    ensure(
        active_names(&catalog, &r.final_assignment) == expected,
        || "final active set differs".into(),
    )?;
    for (_, delta) in &r.deltas {
        requirements_first(&catalog, delta)?;
    }
    Ok("+2, then -2/+3, final set matches".into())
}

fn requirements_first(
    catalog: &Catalog,
    delta: &behavior_coord::ActivationDelta,
) -> Result<(), String> {
    let activated: Vec<_> = delta.activated().collect();
    for (i, &b) in activated.iter().enumerate() {
        for req in catalog.requirements(b) {
            let later = activated[i + 1..]
                .iter()
                .any(|&x| catalog.task_of(x) == req.task);
            ensure(!later, || {
                format!(
                    "{} activated before its requirement",
                    catalog.behavior_name(b)
                )
            })?;
        }
    }
    Ok(())
}

fn nogood_regression() -> Outcome {
    let tasks = (1..=5).map(|i| TaskSpec::new(format!("x{i}"))).collect();
    let doc = CatalogDocument {
        tasks,
        behaviors: vec![
            BehaviorSpec::new("b1", "x1", 1.0).requires("x3", 0.8),
            BehaviorSpec::new("b2", "x2", 1.0),
            BehaviorSpec::new("b3", "x3", 0.9).requires("x4", 0.0),
            BehaviorSpec::new("b3_alt", "x3", 0.85),
            BehaviorSpec::new("b4", "x4", 0.8),
            BehaviorSpec::new("b5", "x5", 1.0),
        ],
        constraints: Default::default(),
    };
    let catalog = Catalog::from_document(doc).map_err(|e| e.to_string())?;
    let t = |n: &str| catalog.task_id(n).unwrap();
    let b = |n: &str| Value::Behavior(catalog.behavior_id(n).unwrap());
    let table = DomainTable::new(vec![
        Domain::singleton(b("b1")),
        Domain::inactive_only(),
        Domain::from_values([b("b3"), b("b3_alt")]),
        Domain::singleton(b("b4")),
        Domain::singleton(b("b5")),
    ]);
    let network = ConstraintNetwork::from_catalog(&catalog);
    let running = Assignment::inactive(catalog.num_tasks());
    let ctx = SearchContext {
        catalog: &catalog,
        network: &network,
        running: &running,
        deadline: None,
    };
    let mut nogoods = NoGoodSet::new();
    let outcome = search(
        &ctx,
        &table,
        &mut nogoods,
        &mut ChaCha8Rng::seed_from_u64(0),
    );
    let expected = NoGood::new(vec![
        (t("x1"), b("b1")),
        (t("x3"), b("b3")),
        (t("x4"), b("b4")),
    ])
    .unwrap();
    ensure(nogoods.contains(&expected), || {
        format!("learned {} no-goods, none matching", nogoods.len())
    })?;
    match outcome {
        SearchOutcome::Found(a) => {
            ensure(!expected.matches(&a), || {
                "returned the rejected assignment".into()
            })?;
            let v = check_assignment(&a, &catalog, &Default::default());
            ensure(v.is_empty(), || format!("{} violations", v.len()))?;
            Ok(format!(
                "no-good {{x1=b1, x3=b3, x4=b4}} learned, then x3={}",
                a.get(t("x3")).display(&catalog)
            ))
        }
        SearchOutcome::Exhausted => Ok("no-good learned, then no solution".into()),
        SearchOutcome::TimedOut => Err("timed out".into()),
    }
}

fn reactive_script(rotate_at: f64) -> String {
    format!(
        "initial_situation: {{flying: true, gps_available: true}}\nduration: 6\nscript:\n\
         \x20 - {{at: 0, start_task: {{task: FollowPath, priority: 1}}}}\n\
         \x20 - {{at: 2, behavior_finished: {{behavior: FollowPathPlanner, cause: GOAL_ACHIEVED}}}}\n\
         \x20 - {{at: {rotate_at}, start_task: {{task: Rotate, priority: 1}}}}\n"
    )
}

fn hover_starts(catalog: &Catalog, r: &Replay) -> Vec<(u64, u32)> {
    let hover = catalog.task_id("Hover").unwrap();
    r.trace
        .iter()
        .filter(|l| l.change == behavior_coord::trace::Change::Activate && l.success)
        .filter(|l| {
            catalog
                .behavior_id(&l.behavior)
                .is_some_and(|b| catalog.task_of(b) == hover)
        })
        .map(|l| (l.time.as_millis(), l.priority))
        .collect()
}

fn reactive_delay() -> Outcome {
    let catalog = parse_catalog(AERIAL_CATALOG).map_err(|e| e.to_string())?;
    let run = |at: f64| -> Result<Replay, String> {
        let s = parse_scenario(&reactive_script(at), &catalog).map_err(|e| e.to_string())?;
        replay(&catalog, &s, SolverConfig::default()).map_err(|e| e.to_string())
    };
    let short = hover_starts(&catalog, &run(2.3)?);
    ensure(short.is_empty(), || {
        format!("gap 0.3 s: hover started {short:?}")
    })?;
    let long = hover_starts(&catalog, &run(3.0)?);
    ensure(long == [(2500, 0)], || {
        format!("gap 1.0 s: hover starts {long:?}")
    })?;
    Ok("gap 0.3 s: none; gap 1.0 s: once at 2.500 with P=0".into())
}

fn priority_fuzz() -> Outcome {
    let mut starts = 0;
    for seed in 0..150u64 {
        let inst = random_instance(seed);
        let catalog = &inst.catalog;
        let mut coord =
            Coordinator::with_state(catalog, inst.state.clone()).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31));
        for _ in 0..20 {
            let trigger = random_trigger(&mut rng, catalog, coord.state());
            let before = coord.state().clone();
            coord.handle_event(trigger).map_err(|e| e.to_string())?;
            let Trigger::StartRequest { task, priority } = trigger else {
                continue;
            };
            starts += 1;
            for t in catalog
                .task_ids()
                .filter(|&t| t != task && before.current.is_running(t))
            {
                let q = before.live_priority(t);
                ensure(
                    !q.is_some_and(|q| q > priority) || coord.state().current.is_running(t),
                    || {
                        format!(
                            "seed {seed}: {} (P={q:?}) stopped by P={priority}",
                            catalog.task_name(t)
                        )
                    },
                )?;
            }
        }
    }
    Ok(format!("150 runs, {starts} start requests"))
}

fn bench() -> Outcome {
    let catalog = generate_catalog(&SynthParams::default()).map_err(|e| e.to_string())?;
    let report = run_bench(&catalog, &[1, 5], 50, 1);
    let mean = |i: usize| report.rows[i].stats.mean().unwrap_or(Duration::MAX);
    let (m1, m5) = (mean(0), mean(1));
    let line = format!(
        "c={} s={} m=1 mean {:.3} ms, m=5 mean {:.3} ms",
        report.constraints,
        report.search_space,
        m1.as_secs_f64() * 1e3,
        m5.as_secs_f64() * 1e3
    );
    ensure(
        m1 < Duration::from_millis(50) && m5 < Duration::from_millis(250),
        || line.clone(),
    )?;
    Ok(line)
}

fn jsonl_determinism() -> Outcome {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_bcoord"))
            .args(["coordinate", "--seed", "7", "--format", "jsonl"])
            .arg(format!("{data}target_following.catalog.yaml"))
            .arg(format!("{data}target_following.scenario.yaml"))
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success(), || format!("exit {:?}", a.status.code()))?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || {
        "outputs differ".into()
    })?;
    Ok(format!("{} bytes identical", a.stdout.len()))
}

fn propagation_soundness() -> Outcome {
    let mut checked = 0;
    for seed in 1000..1050u64 {
        let inst = random_instance(seed);
        let (state, floor) = common::prepare(&inst);
        let reference = common::policy_domains(&inst.catalog, &state, &inst.trigger, floor);
        let mut table = common::domains(&inst, &state, floor);
        let network = ConstraintNetwork::from_catalog(&inst.catalog);
        let consistent = propagate(&inst.catalog, &network, &mut table);
        let valid = valid_assignments(&inst.catalog, &reference, &state, 1 << 20)
            .map_err(|e| e.to_string())?;
        ensure(consistent || valid.is_empty(), || {
            format!("seed {seed}: wiped out a satisfiable table")
        })?;
        for a in &valid {
            for (t, v) in a.iter() {
                ensure(table.get(t).contains(v), || {
                    format!(
                        "seed {seed}: {} pruned from {}",
                        v.display(&inst.catalog),
                        inst.catalog.task_name(t)
                    )
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("50 instances, {checked} valid values kept"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("target-following replay", scenario_replay),
        ("no-good regression", nogood_regression),
        ("reactive delay", reactive_delay),
        ("priority safety", priority_fuzz),
        ("solve timing", bench),
        ("jsonl determinism", jsonl_determinism),
        ("propagation soundness", propagation_soundness),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
