//! `ccus-plan` command-line front end.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 solver failure,
//! 3 oracle disagreement.

use ccus_plan::engine::{
    build_model, rel_close, solve, PlanningError, PlanningOptions, PlanningRequest, PlanningSolution, RobustMethod,
    UncertaintySpec, PRICE_RANGE, TAX_RANGE,
};
use ccus_plan::instance::{builtin_instance, load_instance, InstanceError, PlanningInstance};
use ccus_plan::milp::{export_lp, SolveError, Solver, SolverConfig};
use ccus_plan::oracle::{verify_solution, OracleError, OracleOptions};
use ccus_plan::report::{emit_reports, Case};
use ccus_plan::sweep::{parse_axis, run_sweep, SweepError, SweepMode};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// `println!` that stops quietly when stdout is closed (e.g. piped to `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(name = "ccus-plan", version, about = "CCUS/PtG retrofit planning for electricity-gas systems")]
struct Cli {
    /// TOML file with a `[solver]` table (backend, path).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one planning problem and write reports.
    Solve(SolveArgs),
    /// Deterministic solves over a tax × price grid.
    Sweep(SweepArgs),
    /// Check a solution file against the brute-force oracle.
    Verify(VerifyArgs),
    /// Write the MILP of a planning problem in LP format.
    ExportLp(ExportArgs),
}

#[derive(Args)]
struct InstanceArgs {
    /// Builtin name (toy3, toy3-ccus, mesh6) or path to an instance JSON file.
    #[arg(long, default_value = "toy3-ccus")]
    instance: String,
    /// Representative days per year.
    #[arg(long)]
    day_weight: Option<f64>,
    /// Uniform cap on PtG modules per plant.
    #[arg(long)]
    module_cap: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    NoCcus,
    Det,
    Stoch,
    Robust,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Corner,
    VertexEpigraph,
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long, value_enum, default_value = "det")]
    mode: ModeArg,
    /// Carbon tax in $/ton.
    #[arg(long, default_value_t = 50.0)]
    tax: f64,
    /// Carbon price in $/ton.
    #[arg(long, default_value_t = 40.0)]
    price: f64,
    /// Scenario grid for `stoch`, evenly spaced over the box.
    #[arg(long, default_value = "5x5")]
    grid: String,
    /// Tax and price ranges `LO:HI,LO:HI` for `stoch` and `robust`.
    #[arg(long = "box")]
    bounds: Option<String>,
    #[arg(long, value_enum, default_value = "corner")]
    robust_method: MethodArg,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Relative MIP gap.
    #[arg(long, default_value_t = 1e-6)]
    gap: f64,
    /// Wall-clock limit per solve in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// `LO:HI:STEP` or a comma list.
    #[arg(long, default_value = "0:120:10")]
    tax_axis: String,
    #[arg(long, default_value = "0:80:10")]
    price_axis: String,
    /// Solve without CCUS in every cell.
    #[arg(long)]
    no_ccus: bool,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, default_value_t = 1e-4)]
    gap: f64,
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Solution JSON written by `solve`.
    solution: PathBuf,
    /// Largest number of integer assignments to enumerate.
    #[arg(long, default_value_t = 4096)]
    budget: u128,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    Validation(String),
    Solver(String),
    Disagreement(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Solver(_) => 2,
            Failure::Disagreement(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Solver(m) | Failure::Disagreement(m) => m,
        }
    }
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        Failure::Solver(e.to_string())
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<PlanningError> for Failure {
    fn from(e: PlanningError) -> Self {
        match e {
            PlanningError::Solver(_) | PlanningError::NoSolution { .. } | PlanningError::InfeasibleRecourse { .. } => {
                Failure::Solver(e.to_string())
            }
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::BudgetExceeded { .. } | OracleError::UnboundedDomain(_) => Failure::Validation(e.to_string()),
            _ => Failure::Solver(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Validation(format!("{}: {e}", path.display()))
}

fn load(args: &InstanceArgs) -> Result<PlanningInstance, Failure> {
    let path = Path::new(&args.instance);
    let inst = if path.extension().is_some_and(|e| e == "json") || path.is_file() {
        load_instance(path)?
    } else {
        builtin_instance(&args.instance)?
    };
    Ok(match args.day_weight {
        Some(w) => inst.with_day_weight(w)?,
        None => inst,
    })
}

fn solver(config: Option<&Path>) -> Result<Box<dyn Solver>, Failure> {
    let cfg = match config {
        Some(path) => SolverConfig::from_toml_file(path).map_err(|e| Failure::Validation(e.to_string()))?,
        None => SolverConfig::default(),
    };
    Ok(cfg.with_env_overrides().build()?)
}

fn parse_range(text: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::Validation(format!("cannot parse range `{text}`; expected LO:HI"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

type BoxRanges = ((f64, f64), (f64, f64));

fn parse_box(text: Option<&str>) -> Result<BoxRanges, Failure> {
    let Some(text) = text else {
        return Ok((TAX_RANGE, PRICE_RANGE));
    };
    let (tax, price) = text
        .split_once(',')
        .ok_or_else(|| Failure::Validation(format!("cannot parse box `{text}`; expected LO:HI,LO:HI")))?;
    Ok((parse_range(tax)?, parse_range(price)?))
}

fn parse_grid(text: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Validation(format!("cannot parse grid `{text}`; expected NxM"));
    let (n, m) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((n.trim().parse().map_err(|_| bad())?, m.trim().parse().map_err(|_| bad())?))
}

fn request(p: &ProblemArgs) -> Result<PlanningRequest, Failure> {
    let finite = |name: &str, v: f64| {
        if v.is_finite() && v >= 0.0 {
            Ok(v)
        } else {
            Err(Failure::Validation(format!("--{name} must be a nonnegative number")))
        }
    };
    Ok(match p.mode {
        ModeArg::NoCcus => PlanningRequest::NoCcus {
            tax: finite("tax", p.tax)?,
        },
        ModeArg::Det => PlanningRequest::Deterministic {
            tax: finite("tax", p.tax)?,
            price: finite("price", p.price)?,
        },
        ModeArg::Stoch => {
            let (n, m) = parse_grid(&p.grid)?;
            let (tax_range, price_range) = parse_box(p.bounds.as_deref())?;
            let spec = UncertaintySpec::even_grid(n, m, tax_range, price_range);
            spec.validate()?;
            PlanningRequest::Stochastic { spec }
        }
        ModeArg::Robust => {
            let (tax_range, price_range) = parse_box(p.bounds.as_deref())?;
            let spec = UncertaintySpec::Box { tax_range, price_range };
            spec.validate()?;
            let method = match p.robust_method {
                MethodArg::Corner => RobustMethod::Corner,
                MethodArg::VertexEpigraph => RobustMethod::VertexEpigraph,
            };
            PlanningRequest::Robust { spec, method }
        }
    })
}

fn summary(sol: &PlanningSolution) {
    say!("mode: {}", sol.mode);
    say!("status: {}", sol.metadata.status);
    say!("total cost: {}", sol.total());
    say!("investment: {}", sol.cost_breakdown.investment());
    for m in &sol.first_stage.modules {
        say!("ptg modules at {}: {}", m.plant, m.modules);
    }
    for s in sol.first_stage.siting.iter().filter(|s| s.selected) {
        say!("site: {} -> {}", s.plant, s.gas_node);
    }
    if let Some((tax, price)) = sol.worst_corner {
        say!("worst corner: tax={tax} price={price}");
    }
}

fn run_solve(args: &SolveArgs, config: Option<&Path>) -> Result<(), Failure> {
    let inst = load(&args.instance)?;
    let req = request(&args.problem)?;
    let mut options = PlanningOptions::default().with_gap(args.gap);
    options.solve.time_limit = args.time_limit;
    options.module_cap = args.instance.module_cap;
    let solver = solver(config)?;
    let sol = solve(&inst, &req, solver.as_ref(), &options)?;
    summary(&sol);
    let label = sol.mode.to_string();
    let written = emit_reports(&args.out, &[Case { label: &label, solution: &sol }], None)
        .map_err(|e| Failure::Validation(e.to_string()))?;
    let json = args.out.join("solution.json");
    std::fs::write(&json, sol.to_json()).map_err(|e| io_failure(&json, e))?;
    for path in written.iter().chain([&json]) {
        say!("wrote {}", path.display());
    }
    Ok(())
}

fn run_sweep_cmd(args: &SweepArgs, config: Option<&Path>) -> Result<(), Failure> {
    let inst = load(&args.instance)?;
    let taxes = parse_axis(&args.tax_axis)?;
    let prices = parse_axis(&args.price_axis)?;
    let mut options = PlanningOptions::default().with_gap(args.gap);
    options.solve.time_limit = args.time_limit;
    options.module_cap = args.instance.module_cap;
    let mode = if args.no_ccus {
        SweepMode::NoCcus
    } else {
        SweepMode::Deterministic
    };
    let solver = solver(config)?;
    let grid = run_sweep(&inst, &taxes, &prices, mode, solver.as_ref(), &options, args.jobs)?;
    let solved = grid.solved().count();
    say!("cells: {} solved: {} failed: {}", grid.cells.len(), solved, grid.cells.len() - solved);
    for cell in grid.cells.iter().filter(|c| !c.status.is_solved()) {
        log::warn!("cell tax={} price={}: {:?}", cell.tax, cell.price, cell.status);
    }
    let written = emit_reports(&args.out, &[], Some(&grid)).map_err(|e| Failure::Validation(e.to_string()))?;
    for path in written {
        say!("wrote {}", path.display());
    }
    Ok(())
}

fn run_verify(args: &VerifyArgs, config: Option<&Path>) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&args.solution).map_err(|e| io_failure(&args.solution, e))?;
    let sol = PlanningSolution::from_json(&text).map_err(|e| io_failure(&args.solution, e))?;
    let options = PlanningOptions {
        module_cap: sol.module_cap,
        ..PlanningOptions::default()
    };
    let built = build_model(&sol.instance, &sol.request, &options)?;
    let solver = solver(config)?;
    let oracle = OracleOptions {
        budget: args.budget,
        jobs: args.jobs,
        ..OracleOptions::default()
    };
    let report = verify_solution(built.model(), sol.metadata.objective, solver.as_ref(), &oracle)?;
    say!("assignments enumerated: {}", report.enumerated);
    say!("feasible assignments: {}", report.feasible);
    let Some(best) = report.best_objective else {
        return Err(Failure::Disagreement("oracle found no feasible assignment".into()));
    };
    say!("oracle objective: {best}");
    say!("claimed objective: {}", sol.metadata.objective);
    let total_ok = ccus_plan::oracle::agreement(best, sol.total()).agrees;
    let sums_ok = rel_close(sol.cost_breakdown.recomputed_total(), sol.total(), 1e-9);
    if report.agrees() && total_ok && sums_ok {
        say!("agreement: yes");
        Ok(())
    } else {
        say!("agreement: no");
        Err(Failure::Disagreement(format!(
            "solution does not match the oracle optimum {best} (objective {}, total {})",
            sol.metadata.objective,
            sol.total()
        )))
    }
}

fn run_export(args: &ExportArgs) -> Result<(), Failure> {
    let inst = load(&args.instance)?;
    let req = request(&args.problem)?;
    let options = PlanningOptions {
        module_cap: args.instance.module_cap,
        ..PlanningOptions::default()
    };
    let built = build_model(&inst, &req, &options)?;
    let text = export_lp(built.model());
    match &args.output {
        Some(path) => std::fs::write(path, text).map_err(|e| io_failure(path, e))?,
        None => {
            use std::io::Write as _;
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = cli.config.as_deref();
    let outcome = match &cli.command {
        Command::Solve(a) => run_solve(a, config),
        Command::Sweep(a) => run_sweep_cmd(a, config),
        Command::Verify(a) => run_verify(a, config),
        Command::ExportLp(a) => run_export(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
