use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use coneinf::bench::{format_table, rows_to_json, run_bench};
use coneinf::generate::generate_normal;
use coneinf::io::{
    ball_result_to_json, balls_to_csv, format_instance, parse_balls_csv, parse_instance,
    parse_solution_json, solution_to_json, Format,
};
use coneinf::oracle::{brute_force_meb_points, subgradient_oracle};
use coneinf::reductions::{
    largest_enclosed_ball, min_enclosing_and_intersecting, min_enclosing_ball,
    min_intersecting_ball, BallResult,
};
use coneinf::{kkt_check, solve, Ball, Error, Instance, PivotRule, SolverConfig};
use serde_json::json;

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "coneinf", version, about = "Second-order cone infimum and ball geometry solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a raw point instance.
    Solve {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Smallest ball enclosing the input balls.
    Meb {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Smallest ball meeting every input ball.
    Intersect {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Largest ball inside every input ball.
    Enclosed {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Smallest ball enclosing one group of balls and meeting another.
    Mixed {
        /// Balls to enclose (CSV `r,c_1,...,c_d`).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Balls to meet.
        #[arg(long)]
        intersect: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Write a random standard-normal instance.
    Gen {
        #[arg(short, long)]
        n: usize,
        #[arg(short, long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Mean iteration counts over random instances.
    Bench {
        /// Comma-separated `n x m` cells, e.g. `10x100,10x1000`.
        #[arg(long, default_value = "10x100,10x1000,100x100")]
        grid: String,
        #[arg(long, default_value_t = 25)]
        datasets: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the rows as JSON here.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Print JSON instead of the table.
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Check a solution file against its instance.
    Verify {
        #[command(flatten)]
        io: IoArgs,
        /// Solution JSON written by `solve`.
        #[arg(long)]
        solution: PathBuf,
        /// Tolerance of the optimality check, relative to the instance scale.
        #[arg(long, default_value_t = 1e-7)]
        eps: f64,
        /// Iterations of the subgradient lower bound; 0 skips it.
        #[arg(long, default_value_t = 100_000)]
        oracle_iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct IoArgs {
    /// Input file; `-` or absent reads stdin.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file; absent writes stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Instance format of the input (defaults to the file extension), or the
    /// output format for ball answers.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long)]
    eps_feas: Option<f64>,
    #[arg(long, value_enum, default_value_t = PivotArg::MostInfeasible)]
    pivot: PivotArg,
    #[arg(long)]
    max_iters: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PivotArg {
    MostInfeasible,
    First,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, Failure> {
        let mut cfg = SolverConfig {
            max_iterations: self.max_iters,
            pivot_rule: match self.pivot {
                PivotArg::MostInfeasible => PivotRule::MostInfeasible,
                PivotArg::First => PivotRule::FirstViolated,
            },
            ..SolverConfig::default()
        };
        if let Some(eps) = self.eps_feas {
            if !(eps.is_finite() && eps >= 0.0) {
                return Err(Failure::usage(anyhow!("--eps-feas must be a nonnegative number")));
            }
            cfg.eps_feas = eps;
        }
        Ok(cfg)
    }
}

struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl Failure {
    fn usage(err: anyhow::Error) -> Self {
        Self { code: EXIT_USAGE, err }
    }

    fn solver(err: anyhow::Error) -> Self {
        Self { code: EXIT_SOLVER, err }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_input_error() { EXIT_PARSE } else { EXIT_SOLVER };
        Self { code, err: e.into() }
    }
}

type CmdResult = Result<(), Failure>;

fn read_text(path: Option<&Path>) -> Result<String, Failure> {
    match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p)
            .with_context(|| format!("reading {}", p.display()))
            .map_err(|err| Failure { code: EXIT_PARSE, err }),
        _ => std::io::read_to_string(std::io::stdin())
            .context("reading stdin")
            .map_err(|err| Failure { code: EXIT_PARSE, err }),
    }
}

fn write_text(path: Option<&Path>, text: &str) -> CmdResult {
    let text = if text.ends_with('\n') { text.to_string() } else { format!("{text}\n") };
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(Failure::solver),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_path<T>(path: Option<&Path>, r: coneinf::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        if let Some(p) = path {
            f.err = f.err.context(format!("in {}", p.display()));
        }
        f
    })
}

fn read_instance(io: &IoArgs) -> Result<Instance, Failure> {
    let path = io.input.as_deref();
    let format = io
        .format
        .map(Format::from)
        .or_else(|| path.map(Format::from_path))
        .unwrap_or(Format::Csv);
    let text = read_text(path)?;
    with_path(path, parse_instance(&text, format))
}

fn read_balls(path: Option<&Path>) -> Result<Vec<Ball>, Failure> {
    let text = read_text(path)?;
    with_path(path, parse_balls_csv(&text))
}

fn write_ball(res: &BallResult, output: Option<&Path>, format: Option<FormatArg>) -> CmdResult {
    let text = match format.unwrap_or(FormatArg::Json) {
        FormatArg::Json => ball_result_to_json(res),
        FormatArg::Csv => balls_to_csv(std::slice::from_ref(&res.ball)),
    };
    write_text(output, &text)
}

fn parse_grid(grid: &str) -> Result<Vec<(usize, usize)>, Failure> {
    grid.split(',')
        .map(|cell| {
            let (n, m) = cell.trim().split_once(['x', 'X']).ok_or_else(|| {
                Failure::usage(anyhow!("grid cell {cell:?} is not of the form NxM"))
            })?;
            let n: usize = n.trim().parse().map_err(|_| Failure::usage(anyhow!("bad n in {cell:?}")))?;
            let m: usize = m.trim().parse().map_err(|_| Failure::usage(anyhow!("bad m in {cell:?}")))?;
            if n < 2 || m < 1 {
                return Err(Failure::usage(anyhow!("grid cell {cell:?} needs n >= 2 and m >= 1")));
            }
            Ok((n, m))
        })
        .collect()
}

fn verify(io: &IoArgs, solution: &Path, eps: f64, oracle_iters: usize, seed: u64) -> CmdResult {
    let inst = read_instance(io)?;
    let text = read_text(Some(solution))?;
    let rec = with_path(Some(solution), parse_solution_json(&text))?;
    let dual = with_path(Some(solution), rec.certificate(&inst))?;
    let x = rec.point();
    let kkt = kkt_check(&inst, &x, &dual, eps);
    let scale = inst.scale();
    let mut passed = kkt.passed;
    let mut report = json!({
        "kkt": {
            "primal": kkt.primal,
            "dual_cone": kkt.dual_cone,
            "dual_sum": kkt.dual_sum,
            "complementarity": kkt.complementarity,
            "threshold": kkt.threshold,
            "passed": kkt.passed,
        }
    });
    if oracle_iters > 0 {
        let (bound, _) = subgradient_oracle(&inst, oracle_iters, seed);
        let ok = rec.x0 >= bound - 1e-9 * scale;
        passed &= ok;
        report["subgradient"] = json!({ "lower_bound": bound, "gap": rec.x0 - bound, "passed": ok });
    }
    // equal heights are a point set: the optimum is the enclosing ball
    let h = inst.point(0).height;
    let d = inst.n() - 1;
    if inst.points().iter().all(|p| p.height == h) && inst.m() <= 15 && d <= 4 {
        let pts: Vec<_> = inst.points().iter().map(|p| p.spatial.clone()).collect();
        let (_, r) = brute_force_meb_points(&pts, d);
        let expected = h - r;
        let ok = (rec.x0 - expected).abs() <= 1e-8 * scale;
        passed &= ok;
        report["brute_force"] = json!({ "x0": expected, "passed": ok });
    }
    report["passed"] = json!(passed);
    write_text(io.output.as_deref(), &serde_json::to_string_pretty(&report).expect("json value"))?;
    if passed {
        Ok(())
    } else {
        Err(Failure::solver(anyhow!("verification failed")))
    }
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Solve { io, solver } => {
            let inst = read_instance(&io)?;
            let res = solve(&inst, &solver.config()?)?;
            write_text(io.output.as_deref(), &solution_to_json(&res))
        }
        Command::Meb { io, solver } => {
            let balls = read_balls(io.input.as_deref())?;
            let res = min_enclosing_ball(&balls, &solver.config()?)?;
            write_ball(&res, io.output.as_deref(), io.format)
        }
        Command::Intersect { io, solver } => {
            let balls = read_balls(io.input.as_deref())?;
            let res = min_intersecting_ball(&balls, &solver.config()?)?;
            write_ball(&res, io.output.as_deref(), io.format)
        }
        Command::Enclosed { io, solver } => {
            let balls = read_balls(io.input.as_deref())?;
            let res = largest_enclosed_ball(&balls, &solver.config()?)?;
            write_ball(&res, io.output.as_deref(), io.format)
        }
        Command::Mixed { input, intersect, output, format, solver } => {
            if input.is_none() && intersect.is_none() {
                return Err(Failure::usage(anyhow!("mixed needs --input, --intersect or both")));
            }
            let enclose = match input.as_deref() {
                Some(p) => read_balls(Some(p))?,
                None => Vec::new(),
            };
            let meet = match intersect.as_deref() {
                Some(p) => read_balls(Some(p))?,
                None => Vec::new(),
            };
            let res = min_enclosing_and_intersecting(&enclose, &meet, &solver.config()?)?;
            write_ball(&res, output.as_deref(), format)
        }
        Command::Gen { n, m, seed, output, format } => {
            let inst = generate_normal(n, m, seed).map_err(|e| Failure::usage(e.into()))?;
            write_text(output.as_deref(), &format_instance(&inst, format.into()))
        }
        Command::Bench { grid, datasets, seed, output, format, solver } => {
            let grid = parse_grid(&grid)?;
            let rows = run_bench(&grid, datasets, seed, &solver.config()?);
            let json = rows_to_json(&rows);
            if let Some(p) = output.as_deref() {
                write_text(Some(p), &json)?;
            }
            match format {
                Some(FormatArg::Json) => write_text(None, &json)?,
                _ => write_text(None, &format_table(&rows))?,
            }
            if rows.iter().any(|r| !r.failures.is_empty()) {
                return Err(Failure::solver(anyhow!("some datasets failed; see the excluded lines")));
            }
            Ok(())
        }
        Command::Verify { io, solution, eps, oracle_iters, seed } => verify(&io, &solution, eps, oracle_iters, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
