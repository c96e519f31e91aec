use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use behavior_coord::catalog::{parse_document, validate_catalog, CatalogError};
use behavior_coord::coordinator::{SolveAudit, SolveStats};
use behavior_coord::input::{parse_state, parse_trigger};
use behavior_coord::oracle::{enumerate_optimal, DEFAULT_CAP};
use behavior_coord::sim::{parse_scenario, Simulation};
use behavior_coord::synth::{generate_catalog, run_bench, SynthParams};
use behavior_coord::trace::{delta_lines, name_width, text_header, TraceLine};
use behavior_coord::{
    Catalog, Coordinator, CoordinatorState, SimTime, SituationStore, SolverConfig,
};

const EXIT_VIOLATIONS: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NO_SOLUTION: u8 = 3;
const EXIT_ORACLE_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(
    name = "bcoord",
    version,
    about = "Coordinate robot behaviors by constraint-based configuration search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a catalog file.
    Check { catalog: PathBuf },
    /// Solve a single trigger against a catalog and optional state.
    Solve(SolveArgs),
    /// Replay a scenario and print the activation trace.
    Coordinate(CoordinateArgs),
    /// Time the solver on a synthetic layered catalog.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct SolverFlags {
    #[arg(long, env = "COORD_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    max_solutions: usize,
    #[arg(long, default_value_t = 50)]
    max_time_ms: u64,
    /// Delay before a reactive task starts, in milliseconds.
    #[arg(long, default_value_t = 500)]
    delta_ms: u64,
    /// Cross-check every solve against exhaustive enumeration.
    #[arg(long)]
    oracle: bool,
}

impl SolverFlags {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            max_solutions: self.max_solutions,
            max_search_time: Duration::from_millis(self.max_time_ms),
            seed: self.seed,
            reactive_delay: Duration::from_millis(self.delta_ms),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    catalog: PathBuf,
    /// YAML with `situation`, `active` and `requests`.
    #[arg(long)]
    state: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverFlags,
    /// `start TASK [--priority N]`, `stop TASK` or `finished BEHAVIOR [--cause CAUSE]`
    #[arg(required = true, num_args = 1.., trailing_var_arg = true, allow_hyphen_values = true)]
    trigger: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Jsonl,
}

#[derive(Args)]
struct CoordinateArgs {
    catalog: PathBuf,
    scenario: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 12)]
    tasks: usize,
    #[arg(long, default_value_t = 3)]
    behaviors: usize,
    #[arg(long, default_value_t = 2)]
    requires: usize,
    #[arg(long, default_value_t = 3)]
    layers: usize,
    /// Fraction of same-layer task pairs made incompatible.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    density: f64,
    #[arg(long, env = "COORD_SEED", default_value_t = 0)]
    seed: u64,
    /// Timed solves per value of m.
    #[arg(long, default_value_t = 20)]
    runs: usize,
    /// Values of max_solutions to time.
    #[arg(long, value_delimiter = ',', default_value = "1,5")]
    m: Vec<usize>,
    /// Also write the generated catalog here.
    #[arg(long)]
    emit_catalog: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn input(message: impl std::fmt::Display) -> Self {
        Self::new(EXIT_INPUT, message.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { catalog } => cmd_check(&catalog),
        Command::Solve(args) => cmd_solve(&args),
        Command::Coordinate(args) => cmd_coordinate(&args),
        Command::Bench(args) => cmd_bench(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn catalog_failure(err: CatalogError) -> Failure {
    match err {
        CatalogError::Invalid(report) => {
            Failure::new(EXIT_VIOLATIONS, report.to_string().trim_end().to_string())
        }
        CatalogError::UnknownField { .. } => Failure::new(EXIT_VIOLATIONS, err.to_string()),
        other => Failure::input(other),
    }
}

fn load_catalog(path: &Path) -> Result<Catalog, Failure> {
    behavior_coord::parse_catalog(&read(path)?).map_err(catalog_failure)
}

fn cmd_check(path: &Path) -> CmdResult {
    let doc = parse_document(&read(path)?).map_err(catalog_failure)?;
    let report = validate_catalog(&doc);
    if !report.is_empty() {
        return Err(Failure::new(
            EXIT_VIOLATIONS,
            report.to_string().trim_end().to_string(),
        ));
    }
    let catalog = Catalog::from_document(doc).map_err(catalog_failure)?;
    println!(
        "ok: {} tasks, {} behaviors, {} constraints",
        catalog.num_tasks(),
        catalog.num_behaviors(),
        catalog.constraint_count()
    );
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> CmdResult {
    let catalog = load_catalog(&args.catalog)?;
    let config = args.solver.config();
    config.validate().map_err(Failure::input)?;
    let state = match &args.state {
        Some(p) => parse_state(&read(p)?, &catalog, config).map_err(Failure::input)?,
        None => CoordinatorState::new(&catalog, SituationStore::new(), config),
    };
    let trigger = parse_trigger(&args.trigger, &catalog).map_err(Failure::input)?;

    let mut coordinator = Coordinator::with_state(&catalog, state).map_err(Failure::input)?;
    coordinator.enable_audit();
    let delta = coordinator.handle_event(trigger).map_err(Failure::input)?;
    let audit = coordinator.take_audit();
    let solved = audit.last().is_none_or(|a| a.objective.is_some());
    if !solved {
        return Err(Failure::new(
            EXIT_NO_SOLUTION,
            "no consistent configuration",
        ));
    }

    let current = &coordinator.state().current;
    let width = catalog
        .task_ids()
        .map(|t| catalog.task_name(t).len())
        .max()
        .unwrap_or(0);
    for (task, value) in current.iter() {
        println!(
            "{:<width$}  {}",
            catalog.task_name(task),
            value.display(&catalog)
        );
    }
    if let Some(v) = audit.last().and_then(|a| a.objective) {
        println!("f = ({:.6}, {:.6}, {:.6}, {:.6})", v.f1, v.f2, v.f3, v.f4);
    }
    let lines = delta_lines(&catalog, &delta, SimTime::ZERO);
    if lines.is_empty() {
        println!("no changes");
    } else {
        let w = name_width(&catalog);
        for l in &lines {
            println!("{}", l.to_text(w));
        }
    }
    if args.solver.oracle {
        cross_check(&catalog, &audit)?;
    }
    Ok(())
}

fn cmd_coordinate(args: &CoordinateArgs) -> CmdResult {
    let catalog = load_catalog(&args.catalog)?;
    let scenario = parse_scenario(&read(&args.scenario)?, &catalog).map_err(Failure::input)?;
    let config = args.solver.config();
    config.validate().map_err(Failure::input)?;

    let mut sim = Simulation::new(&catalog, scenario.initial_situation.clone(), config)
        .map_err(Failure::input)?;
    if args.solver.oracle {
        sim.coordinator_mut().enable_audit();
    }
    sim.run(&scenario).map_err(Failure::input)?;
    let audit = sim.coordinator_mut().take_audit();
    let replay = sim.finish();

    print_trace(&catalog, &replay.trace, args.format);
    eprintln!(
        "activations: {}  deactivations: {}  failures: {}",
        replay.activations(),
        replay.deactivations(),
        replay.failures()
    );
    eprintln!("{}", timing_summary(&replay.stats));
    if args.solver.oracle {
        cross_check(&catalog, &audit)?;
    }
    Ok(())
}

fn print_trace(catalog: &Catalog, trace: &[TraceLine], format: Format) {
    match format {
        Format::Text => {
            let w = name_width(catalog);
            println!("{}", text_header(w));
            for l in trace {
                println!("{}", l.to_text(w));
            }
        }
        Format::Jsonl => {
            for l in trace {
                println!("{}", l.to_json());
            }
        }
    }
}

fn ms(d: Option<Duration>) -> String {
    d.map_or_else(
        || "-".to_string(),
        |d| format!("{:.3}", d.as_secs_f64() * 1e3),
    )
}

fn timing_summary(stats: &SolveStats) -> String {
    format!(
        "solves: {}  timeouts: {}  t_mean: {} ms  t_min: {} ms  t_max: {} ms",
        stats.count,
        stats.timeouts,
        ms(stats.mean()),
        ms(stats.min),
        ms(stats.max)
    )
}

fn cross_check(catalog: &Catalog, audit: &[SolveAudit]) -> CmdResult {
    let mut mismatches = 0;
    for (i, a) in audit.iter().enumerate() {
        match enumerate_optimal(catalog, &a.table, &a.state, DEFAULT_CAP) {
            Ok(r) if r.best_vector == a.objective => {}
            Ok(r) => {
                mismatches += 1;
                eprintln!(
                    "oracle mismatch on solve {i}: solver {:?}, oracle {:?}",
                    a.objective, r.best_vector
                );
            }
            Err(e) => eprintln!("oracle skipped solve {i}: {e}"),
        }
    }
    eprintln!(
        "oracle: {} solves checked, {mismatches} mismatches",
        audit.len()
    );
    if mismatches > 0 {
        return Err(Failure::new(
            EXIT_ORACLE_MISMATCH,
            "oracle disagrees with the solver",
        ));
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> CmdResult {
    let params = SynthParams {
        tasks: args.tasks,
        behaviors_per_task: args.behaviors,
        requires_per_behavior: args.requires,
        layers: args.layers,
        incompat_density: args.density,
        seed: args.seed,
    };
    let catalog = generate_catalog(&params).map_err(Failure::input)?;
    if let Some(path) = &args.emit_catalog {
        let yaml = catalog.to_yaml().map_err(Failure::input)?;
        std::fs::write(path, yaml)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
    }
    if args.m.contains(&0) || args.runs == 0 {
        return Err(Failure::input("m and runs must be positive"));
    }
    let report = run_bench(&catalog, &args.m, args.runs, args.seed);
    println!(
        "tasks: {}  behaviors/task: {}  requires/behavior: {}  layers: {}",
        args.tasks, args.behaviors, args.requires, args.layers
    );
    println!("c: {}", report.constraints);
    println!(
        "s: {} ({:.2e})",
        report.search_space, report.search_space as f64
    );
    for row in &report.rows {
        println!(
            "m={}: t_mean {} ms  t_min {} ms  t_max {} ms  ({} runs, {} solved, {} timeouts)",
            row.max_solutions,
            ms(row.stats.mean()),
            ms(row.stats.min),
            ms(row.stats.max),
            row.stats.count,
            row.solved,
            row.stats.timeouts
        );
    }
    Ok(())
}
