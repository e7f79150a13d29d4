//! Command-line front end: `solve`, `sweep`, `residual` and `diagnose`.
//!
//! Output is deterministic: byte-identical invocations produce byte-identical
//! files (15 significant digits in CSV, 9 in markdown, LF line endings).
//! Errors print exactly one diagnostic line to stderr and exit nonzero:
//! 1 for usage problems, 2 for config parsing, 3 for solver failures,
//! 4 when the residual optimizer is infeasible.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{convergence_diagnostics, result_table};
use crate::error::Error;
use crate::homotopy::PStrategy;
use crate::problem::{builtin, load_problem, ProblemSpec};
use crate::residual::{optimize_c0, C0Mode, SolverConfig};

#[derive(Parser, Debug)]
#[command(
    name = "greenham",
    version,
    about = "Series solutions of nonlocal elliptic boundary value problems",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve and tabulate exact/ADM/OHAM values with absolute errors
    Solve(SolveArgs),
    /// Sample the discrete residual E_n(c0) over a range of c0
    Sweep(SweepArgs),
    /// Report the discrete residual of a single series
    Residual(ResidualArgs),
    /// Convergence ratios, onset index and the a-posteriori tail bound
    Diagnose(DiagnoseArgs),
}

#[derive(Args, Debug)]
struct ProblemArgs {
    /// Built-in example id
    #[arg(
        long,
        value_parser = clap::value_parser!(u32).range(1..=4),
        required_unless_present = "config",
        conflicts_with = "config"
    )]
    example: Option<u32>,
    /// Problem config file (key=value lines; see the book)
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolverArgs {
    /// Series order n
    #[arg(long, default_value_t = 2)]
    order: usize,
    /// Reading of the nonlocal scalar
    #[arg(long = "p-strategy", value_parser = parse_strategy, default_value = "frozen")]
    p_strategy: PStrategy,
    /// Residual grid size M
    #[arg(long = "m-points", default_value_t = 100)]
    m_points: usize,
}

#[derive(Args, Debug)]
struct C0Arg {
    /// Control parameter: `optimal` or a fixed value such as -1
    #[arg(long, value_parser = parse_c0, default_value = "optimal", allow_hyphen_values = true)]
    c0: C0Mode,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output format; defaults to md on stdout and csv when writing a file
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum OutFormat {
    Csv,
    Md,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    c0: C0Arg,
    /// Evaluation grid as start:end:step
    #[arg(long, default_value = "0:1:0.1")]
    grid: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Left end of the c0 range
    #[arg(long, allow_hyphen_values = true)]
    from: f64,
    /// Right end of the c0 range
    #[arg(long, allow_hyphen_values = true)]
    to: f64,
    /// Number of equispaced samples (>= 2)
    #[arg(long)]
    steps: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ResidualArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    c0: C0Arg,
    /// Include the pointwise residuals in markdown output
    #[arg(long)]
    pointwise: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    c0: C0Arg,
    /// Grid size for the max-norm estimates
    #[arg(long = "norm-grid", default_value_t = 201)]
    norm_grid: usize,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_strategy(s: &str) -> Result<PStrategy, String> {
    PStrategy::from_str(s)
}

fn parse_c0(s: &str) -> Result<C0Mode, String> {
    if s == "optimal" {
        return Ok(C0Mode::Optimize);
    }
    let v: f64 = s
        .parse()
        .map_err(|_| format!("expected `optimal` or a number, got {s:?}"))?;
    if v == 0.0 {
        return Err("c0 must be nonzero".to_string());
    }
    Ok(C0Mode::Fixed(v))
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::Config(_) | Error::InvalidProblem { .. } | Error::UnknownExample(_) => 2,
            Error::OptimizationInfeasible { .. } | Error::MinimizerAtBracketEdge { .. } => 4,
            _ => 3,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

/// Parses `std::env::args`, runs the requested command, and returns the
/// process exit code. All diagnostics go to stderr as a single line.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{err}");
                return 0;
            }
            let line = err
                .to_string()
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .to_string();
            eprintln!("{line}");
            return 1;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Residual(args) => run_residual(args),
        Command::Diagnose(args) => run_diagnose(args),
    }
}

fn load(problem: &ProblemArgs) -> Result<(ProblemSpec, String), Failure> {
    match (problem.example, &problem.config) {
        (Some(id), None) => Ok((builtin(id)?, format!("example {id}"))),
        (None, Some(path)) => Ok((load_problem(path)?, path.display().to_string())),
        _ => Err(Failure::usage(
            "exactly one of --example or --config is required",
        )),
    }
}

fn solver_config(solver: &SolverArgs, c0_mode: C0Mode) -> SolverConfig {
    SolverConfig {
        order: solver.order,
        c0_mode,
        p_strategy: solver.p_strategy,
        residual_points: solver.m_points,
        ..SolverConfig::default()
    }
}

fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, end, step] = parts.as_slice() else {
        return Err(Failure::usage(format!(
            "grid must be start:end:step, got {text:?}"
        )));
    };
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Failure::usage(format!("grid component {s:?} is not a number")))
    };
    let (start, end, step) = (parse(start)?, parse(end)?, parse(step)?);
    if step.is_nan() || step <= 0.0 || end < start {
        return Err(Failure::usage(format!(
            "grid needs start <= end and step > 0, got {text:?}"
        )));
    }
    let n = ((end - start) / step).round() as usize;
    let points = (0..=n)
        .map(|i| {
            if n == 0 {
                start
            } else {
                start + (end - start) * i as f64 / n as f64
            }
        })
        .collect();
    Ok(points)
}

fn emit(output: &OutputArgs, csv: String, md: String) -> Result<(), Failure> {
    let format = match (output.format, &output.out) {
        (Some(f), _) => f,
        (None, Some(_)) => OutFormat::Csv,
        (None, None) => OutFormat::Md,
    };
    let body = match format {
        OutFormat::Csv => csv,
        OutFormat::Md => md,
    };
    match &output.out {
        Some(path) => fs::write(path, body)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

/// 15 significant digits, scientific; CSV cells.
fn csv_num(v: f64) -> String {
    format!("{v:.14e}")
}

/// 9 significant digits, scientific; markdown cells.
fn md_num(v: f64) -> String {
    format!("{v:.8e}")
}

fn opt_cell(v: Option<f64>, fmt: fn(f64) -> String, empty: &str) -> String {
    v.map(fmt).unwrap_or_else(|| empty.to_string())
}

fn run_solve(args: SolveArgs) -> Result<(), Failure> {
    let (spec, source) = load(&args.problem)?;
    let grid = parse_grid(&args.grid)?;
    let config = solver_config(&args.solver, args.c0.c0);
    let mut table = result_table(&spec, &config, &grid)?;
    table.meta.source = source;

    let mut csv = String::from("x,exact,adm,oham,err_adm,err_oham\n");
    for r in &table.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            csv_num(r.x),
            opt_cell(r.exact, csv_num, ""),
            csv_num(r.adm),
            csv_num(r.oham),
            opt_cell(r.err_adm, csv_num, ""),
            opt_cell(r.err_oham, csv_num, ""),
        );
    }

    let meta = &table.meta;
    let mut md = String::new();
    let _ = writeln!(md, "# solve: {}", meta.source);
    let _ = writeln!(md);
    let _ = writeln!(md, "- order: {}", meta.order);
    let _ = writeln!(md, "- p-strategy: {}", meta.strategy);
    let _ = writeln!(md, "- M: {}", meta.m_points);
    let _ = writeln!(md, "- c0 (oham): {}", md_num(meta.c0_oham));
    let _ = writeln!(md, "- c0 (adm): {}", md_num(meta.c0_adm));
    let _ = writeln!(md);
    let _ = writeln!(md, "| x | exact | adm | oham | err_adm | err_oham |");
    let _ = writeln!(md, "|---|-------|-----|------|---------|----------|");
    for r in &table.rows {
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} | {} | {} |",
            md_num(r.x),
            opt_cell(r.exact, md_num, "-"),
            md_num(r.adm),
            md_num(r.oham),
            opt_cell(r.err_adm, md_num, "-"),
            opt_cell(r.err_oham, md_num, "-"),
        );
    }
    emit(&args.output, csv, md)
}

fn run_sweep(args: SweepArgs) -> Result<(), Failure> {
    if args.steps < 2 {
        return Err(Failure::usage("sweep needs --steps >= 2"));
    }
    if !(args.from < args.to && args.to < 0.0) {
        return Err(Failure::usage(format!(
            "sweep range must satisfy from < to < 0, got {}..{}",
            args.from, args.to
        )));
    }
    let (spec, source) = load(&args.problem)?;
    let config = solver_config(&args.solver, C0Mode::Optimize);

    let mut rows: Vec<(f64, Result<f64, String>)> = Vec::with_capacity(args.steps);
    for i in 0..args.steps {
        let c0 = args.from + (args.to - args.from) * i as f64 / (args.steps - 1) as f64;
        let outcome = crate::residual::residual_report_at(&spec, &config, c0)
            .map(|r| r.e_n)
            .map_err(|e| e.to_string().replace(',', ";"));
        rows.push((c0, outcome));
    }
    let any_failed = rows.iter().any(|(_, r)| r.is_err());

    let mut csv = String::new();
    let _ = writeln!(csv, "c0,E{}", if any_failed { ",error" } else { "" });
    for (c0, outcome) in &rows {
        match outcome {
            Ok(e) if any_failed => {
                let _ = writeln!(csv, "{},{},", csv_num(*c0), csv_num(*e));
            }
            Ok(e) => {
                let _ = writeln!(csv, "{},{}", csv_num(*c0), csv_num(*e));
            }
            Err(msg) => {
                let _ = writeln!(csv, "{},,{}", csv_num(*c0), msg);
            }
        }
    }

    let mut md = String::new();
    let _ = writeln!(md, "# sweep: {source}");
    let _ = writeln!(md);
    let _ = writeln!(
        md,
        "- order: {}, p-strategy: {}, M: {}",
        args.solver.order, args.solver.p_strategy, args.solver.m_points
    );
    let _ = writeln!(md);
    let _ = writeln!(md, "| c0 | E | note |");
    let _ = writeln!(md, "|----|---|------|");
    for (c0, outcome) in &rows {
        match outcome {
            Ok(e) => {
                let _ = writeln!(md, "| {} | {} | |", md_num(*c0), md_num(*e));
            }
            Err(msg) => {
                let _ = writeln!(md, "| {} | - | {msg} |", md_num(*c0));
            }
        }
    }
    emit(&args.output, csv, md)
}

fn run_residual(args: ResidualArgs) -> Result<(), Failure> {
    let (spec, source) = load(&args.problem)?;
    let config = solver_config(&args.solver, args.c0.c0);
    let (c0, report) = optimize_c0(&spec, &config)?;

    let mut csv = String::from("c0,E,p_phi\n");
    let _ = writeln!(
        csv,
        "{},{},{}",
        csv_num(c0),
        csv_num(report.e_n),
        csv_num(report.p_of_phi)
    );

    let mut md = String::new();
    let _ = writeln!(md, "# residual: {source}");
    let _ = writeln!(md);
    let _ = writeln!(
        md,
        "- order: {}, p-strategy: {}, M: {}",
        args.solver.order, args.solver.p_strategy, args.solver.m_points
    );
    let _ = writeln!(md, "- c0: {}", md_num(c0));
    let _ = writeln!(md, "- E: {}", md_num(report.e_n));
    let _ = writeln!(md, "- p[phi]: {}", md_num(report.p_of_phi));
    if args.pointwise {
        let _ = writeln!(md);
        let _ = writeln!(md, "| x | N[phi](x) |");
        let _ = writeln!(md, "|---|-----------|");
        for (x, r) in &report.pointwise {
            let _ = writeln!(md, "| {} | {} |", md_num(*x), md_num(*r));
        }
    }
    emit(&args.output, csv, md)
}

fn run_diagnose(args: DiagnoseArgs) -> Result<(), Failure> {
    if args.norm_grid < 2 {
        return Err(Failure::usage("diagnose needs --norm-grid >= 2"));
    }
    let (spec, source) = load(&args.problem)?;
    let mut config = solver_config(&args.solver, args.c0.c0);
    config.norm_grid = args.norm_grid;
    let diag = convergence_diagnostics(&spec, &config)?;
    let conv = &diag.convergence;

    let fmt_k0 = conv
        .k0
        .map(|k| k.to_string())
        .unwrap_or_else(|| "none".to_string());
    let fmt_respected = match diag.bound_respected {
        Some(true) => "yes",
        Some(false) => "no (flagged: sampled ratios understate the tail)",
        None => "n/a",
    };

    let mut csv = String::from("key,value\n");
    for (k, d) in conv.deltas.iter().enumerate() {
        let _ = writeln!(csv, "delta_{k},{}", opt_cell(*d, csv_num, ""));
    }
    let _ = writeln!(csv, "c0,{}", csv_num(diag.c0));
    let _ = writeln!(csv, "k0,{fmt_k0}");
    let _ = writeln!(csv, "delta_max,{}", opt_cell(conv.delta_max, csv_num, ""));
    let _ = writeln!(csv, "bound,{}", opt_cell(conv.bound, csv_num, ""));
    let _ = writeln!(
        csv,
        "observed_max_err,{}",
        opt_cell(diag.observed_max_err, csv_num, "")
    );
    let _ = writeln!(
        csv,
        "bound_respected,{}",
        match diag.bound_respected {
            Some(true) => "yes",
            Some(false) => "no",
            None => "",
        }
    );

    let mut md = String::new();
    let _ = writeln!(md, "# diagnose: {source}");
    let _ = writeln!(md);
    let _ = writeln!(
        md,
        "- order: {}, p-strategy: {}, norm grid: {}",
        args.solver.order, args.solver.p_strategy, args.norm_grid
    );
    let _ = writeln!(md, "- c0: {}", md_num(diag.c0));
    let _ = writeln!(md);
    let _ = writeln!(md, "| k | delta_k = |y_k+1|/|y_k| |");
    let _ = writeln!(md, "|---|--------------------------|");
    for (k, d) in conv.deltas.iter().enumerate() {
        let _ = writeln!(md, "| {k} | {} |", opt_cell(*d, md_num, "undefined"));
    }
    let _ = writeln!(md);
    let _ = writeln!(md, "- k0: {fmt_k0}");
    let _ = writeln!(
        md,
        "- delta_max: {}",
        opt_cell(conv.delta_max, md_num, "none")
    );
    let _ = writeln!(md, "- tail bound: {}", opt_cell(conv.bound, md_num, "none"));
    match diag.observed_max_err {
        Some(err) => {
            let _ = writeln!(md, "- observed max error: {}", md_num(err));
            let _ = writeln!(md, "- bound respected: {fmt_respected}");
        }
        None => {
            let _ = writeln!(md, "- observed max error: n/a (no exact solution)");
        }
    }
    emit(&args.output, csv, md)
}
