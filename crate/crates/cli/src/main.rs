//! `fdfe`: solves, identity checks, convergence studies and 2D verifications
//! for the 1D Poisson finite-difference / finite-element pair.
//!
//! Exit codes: 0 success, 1 numerical or check failure, 2 usage error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fdfe_core::analysis::{self, MeshFamily};
use fdfe_core::assembly::DEFAULT_QUAD_ORDER;
use fdfe_core::geometry2d::{self, BubbleCase, DiagonalCase, Triangle};
use fdfe_core::mesh::MeshDescriptor;
use fdfe_core::pipeline::{self, Problem};
use fdfe_core::{Error as CoreError, Execution, Mesh1D};

use output::{OutputFormat, Report};

const PROBLEMS: [&str; 4] = Problem::BUILTIN_NAMES;

#[derive(Debug, Parser)]
#[command(name = "fdfe", version, about = "FD / FE discretizations of -u'' = f on non-uniform meshes")]
struct Cli {
    /// Run data-parallel loops on one thread
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve with finite differences or finite elements and print nodal values
    Solve(SolveArgs),
    /// Run one identity check and compare its residual with a tolerance
    Verify(VerifyArgs),
    /// Errors, bounds and observed rates over a mesh family
    Convergence(ConvergenceArgs),
    /// 2D identities: diagonal Green identity or bubble mean identity
    #[command(name = "2d")]
    TwoD(TwoDArgs),
    /// Write a mesh in the node-file format
    Mesh(MeshArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Fd,
    Fe,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long, value_parser = PROBLEMS)]
    problem: String,
    /// uniform:<n> | graded:<beta>:<n> | perturbed:<rho>:<n>:<seed> | file:<path>
    #[arg(long)]
    mesh: MeshDescriptor,
    #[arg(long, default_value_t = DEFAULT_QUAD_ORDER)]
    quad_order: usize,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    /// ||S G - I||_max
    Inverse,
    /// FD solve vs dense G W f
    Wt,
    /// (f, phi_j) vs the second difference of u at the nodes
    Dual,
    /// a_h(u_FE - u_FD, v) vs F_h(v) on random v
    Fh,
}

impl Check {
    fn default_tol(self) -> f64 {
        1e-10
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    check: Check,
    #[arg(long)]
    mesh: MeshDescriptor,
    #[arg(long, value_parser = PROBLEMS, default_value = "sine")]
    problem: String,
    /// Defaults to 1e-10 for every check
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_QUAD_ORDER)]
    quad_order: usize,
    /// Seed for the random test vectors of the fh check
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of random test vectors for the fh check
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// Largest element count for checks that build the dense Green matrix
    #[arg(long, default_value_t = 4096)]
    max_n: usize,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Levels {
    lo: u32,
    hi: u32,
}

impl std::str::FromStr for Levels {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got '{s}'"))?;
        let lo: u32 = a.trim().parse().map_err(|_| format!("bad level '{a}'"))?;
        let hi: u32 = b.trim().trim_start_matches('=').parse().map_err(|_| format!("bad level '{b}'"))?;
        if lo < 1 || hi <= lo {
            return Err(format!("need b > a >= 1 (at least two levels), got {lo}..{hi}"));
        }
        if hi > 24 {
            return Err(format!("level {hi} is too fine (max 24)"));
        }
        Ok(Levels { lo, hi })
    }
}

#[derive(Debug, Args)]
struct ConvergenceArgs {
    #[arg(long, value_parser = PROBLEMS)]
    problem: String,
    /// uniform | graded:<beta> | perturbed:<rho>:<seed> (an `{n}` slot is accepted)
    #[arg(long)]
    family: MeshFamily,
    /// Inclusive level range a..b; level k uses n = 2^k elements
    #[arg(long)]
    levels: Levels,
    #[arg(long, default_value_t = DEFAULT_QUAD_ORDER)]
    quad_order: usize,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Case2d {
    Diagonal,
    Bubble,
}

#[derive(Debug, Args)]
struct TwoDArgs {
    #[arg(value_enum)]
    case: Case2d,
    /// diagonal: sinsin | poly | zero; bubble: constant | antisym | linear | zero
    #[arg(long)]
    builtin: Option<String>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    refine: Option<u32>,
    /// Side length of the equilateral triangle (bubble)
    #[arg(long, default_value_t = 1.0)]
    side: f64,
    /// Explicit triangle x1,y1,x2,y2,x3,y3 (bubble); must be equilateral
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    vertices: Option<Vec<f64>>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct MeshArgs {
    #[arg(long)]
    mesh: MeshDescriptor,
    /// Write to a file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    /// A numerical stage failed.
    Numerical { stage: &'static str, source: CoreError },
    /// A check ran and did not pass; details were already printed.
    CheckFailed(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Numerical { stage, source } => write!(f, "{stage} failed: {source}"),
            CliError::CheckFailed(m) => write!(f, "{m}"),
        }
    }
}

fn numerical(stage: &'static str) -> impl FnOnce(CoreError) -> CliError {
    move |source| CliError::Numerical { stage, source }
}

fn usage(e: impl fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn load_mesh(desc: &MeshDescriptor) -> Result<Mesh1D, CliError> {
    desc.build().map_err(usage)
}

fn load_problem(name: &str) -> Result<Problem, CliError> {
    Problem::builtin(name).map_err(usage)
}

fn check_quad_order(q: usize) -> Result<(), CliError> {
    if q == 0 {
        return Err(usage("--quad-order must be >= 1"));
    }
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> Result<String, CliError> {
    check_quad_order(args.quad_order)?;
    let problem = load_problem(&args.problem)?;
    let mesh = load_mesh(&args.mesh)?;
    let sol = match args.method {
        MethodArg::Fd => pipeline::solve_fd(&problem, &mesh).map_err(numerical("fd solve"))?,
        MethodArg::Fe => pipeline::solve_fe(&problem, &mesh, args.quad_order).map_err(numerical("fe solve"))?,
    };
    let u = problem.u_exact();
    let mut report = Report::new(&["node", "value", "exact", "error"])
        .meta("method", sol.method.to_string().as_str())
        .meta("problem", problem.name())
        .meta("mesh", args.mesh.to_string().as_str())
        .meta("n", mesh.n())
        .meta("residual", sol.residual);
    let mut max_err: Option<f64> = None;
    for (&x, &v) in mesh.interior().iter().zip(&sol.values) {
        let exact = u.map(|u| u(x));
        let err = exact.map(|e| (e - v).abs());
        if let Some(e) = err {
            max_err = Some(max_err.map_or(e, |m: f64| m.max(e)));
        }
        report.push(vec![x.into(), v.into(), exact.into(), err.into()]);
    }
    report = report.meta("max_error", max_err);
    Ok(report.render(args.format))
}

fn random_vectors(len: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..len).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

fn cmd_verify(args: &VerifyArgs, exec: Execution) -> Result<String, CliError> {
    check_quad_order(args.quad_order)?;
    let tol = args.tol.unwrap_or(args.check.default_tol());
    if !(tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let mesh = load_mesh(&args.mesh)?;
    let problem = load_problem(&args.problem)?;
    let dense = matches!(args.check, Check::Inverse | Check::Wt);
    if dense && mesh.n() > args.max_n {
        return Err(usage(format!(
            "n = {} exceeds --max-n {} for the dense Green matrix check",
            mesh.n(),
            args.max_n
        )));
    }
    let residual = match args.check {
        Check::Inverse => pipeline::inverse_identity_check_with(&mesh, exec),
        Check::Wt => {
            let fd = pipeline::solve_fd(&problem, &mesh).map_err(numerical("fd solve"))?;
            let w = pipeline::green_nodal_fd_with(&problem, &mesh, exec).map_err(numerical("green product"))?;
            fd.values.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        }
        Check::Dual => {
            pipeline::dual_identity_check(&problem, &mesh, args.quad_order).map_err(numerical("dual identity"))?
        }
        Check::Fh => {
            let fd = pipeline::solve_fd(&problem, &mesh).map_err(numerical("fd solve"))?;
            let fe = pipeline::solve_fe(&problem, &mesh, args.quad_order).map_err(numerical("fe solve"))?;
            let gap: Vec<f64> = fe.values.iter().zip(&fd.values).map(|(a, b)| a - b).collect();
            let mut worst: f64 = 0.0;
            for v in random_vectors(mesh.interior_len(), args.samples, args.seed) {
                let lhs = analysis::energy_bilinear(&gap, &v, &mesh).map_err(numerical("energy form"))?;
                let rhs = analysis::fh_functional(problem.rhs().as_ref(), &v, &mesh, args.quad_order)
                    .map_err(numerical("F_h functional"))?;
                worst = worst.max((lhs - rhs).abs());
            }
            worst
        }
    };
    let passed = residual < tol;
    let check = format!("{:?}", args.check).to_lowercase();
    let mut report = Report::new(&[])
        .meta("check", check.as_str())
        .meta("mesh", args.mesh.to_string().as_str());
    if !matches!(args.check, Check::Inverse) {
        report = report.meta("problem", problem.name());
    }
    let report = report
        .meta("residual", residual)
        .meta("tol", tol)
        .meta("status", if passed { "pass" } else { "FAIL" });
    let text = report.render(args.format);
    if passed {
        Ok(text)
    } else {
        print!("{text}");
        Err(CliError::CheckFailed(format!(
            "check {check} failed: residual {residual:e} >= tol {tol:e}"
        )))
    }
}

fn cmd_convergence(args: &ConvergenceArgs, exec: Execution) -> Result<String, CliError> {
    check_quad_order(args.quad_order)?;
    let problem = load_problem(&args.problem)?;
    let report = analysis::convergence_study(
        &problem,
        &args.family,
        args.levels.lo..=args.levels.hi,
        args.quad_order,
        exec,
    )
    .map_err(numerical("convergence study"))?;
    let text = match args.format {
        OutputFormat::Csv => report.to_csv().map_err(numerical("csv output"))?,
        OutputFormat::Json => {
            let mut s = report.to_json().map_err(numerical("json output"))?;
            s.push('\n');
            s
        }
        OutputFormat::Table => {
            let mut t = Report::new(&analysis::CSV_HEADER.split(',').collect::<Vec<_>>())
                .meta("problem", report.problem.as_str())
                .meta("family", report.family.as_str())
                .meta("sup_f_prime", report.sup_norms.f_prime)
                .meta("sup_f_second", report.sup_norms.f_second)
                .meta("sup_norms", if report.sup_norms.estimated { "estimated" } else { "closed form" });
            for r in &report.rows {
                t.push(vec![
                    r.n.into(),
                    r.h.into(),
                    r.err_inf_fd.into(),
                    r.bound_inf.into(),
                    r.err_energy_gap.into(),
                    r.bound_energy_gap.into(),
                    r.err_energy_fd.into(),
                    r.rate_inf.into(),
                    r.rate_gap.into(),
                ]);
            }
            t.render(OutputFormat::Table)
        }
    };
    match report.first_violation() {
        None => Ok(text),
        Some(e) => {
            print!("{text}");
            Err(CliError::CheckFailed(format!("bound violated: {e}")))
        }
    }
}

fn parse_triangle(args: &TwoDArgs) -> Result<Triangle, CliError> {
    let tri = match &args.vertices {
        Some(v) if v.len() != 6 => {
            return Err(usage(format!("--vertices needs 6 numbers, got {}", v.len())));
        }
        Some(v) => Triangle::new([v[0], v[1]], [v[2], v[3]], [v[4], v[5]]).map_err(usage)?,
        None => Triangle::equilateral(args.side).map_err(usage)?,
    };
    tri.require_equilateral().map_err(usage)?;
    Ok(tri)
}

fn cmd_2d(args: &TwoDArgs, exec: Execution) -> Result<String, CliError> {
    let (result, tol, mut report) = match args.case {
        Case2d::Diagonal => {
            if args.vertices.is_some() {
                return Err(usage("--vertices applies to the bubble case only"));
            }
            let case = DiagonalCase::from_name(args.builtin.as_deref().unwrap_or("sinsin")).map_err(usage)?;
            let degree = args.degree.unwrap_or(10);
            let refine = args.refine.unwrap_or(6);
            check_2d_params(degree, refine)?;
            let r = case.run(degree, refine, exec).map_err(numerical("diagonal identity"))?;
            let report = Report::new(&[])
                .meta("case", "diagonal")
                .meta("builtin", args.builtin.as_deref().unwrap_or("sinsin"))
                .meta("degree", degree)
                .meta("refine", refine as usize)
                .meta("label", "lhs is the finite-difference-style quadrature of the line integral of u over the diagonal")
                .meta("exact_lhs", case.exact_line_integral());
            (r, args.tol.unwrap_or(case.default_tolerance()), report)
        }
        Case2d::Bubble => {
            let case = BubbleCase::from_name(args.builtin.as_deref().unwrap_or("constant")).map_err(usage)?;
            let tri = parse_triangle(args)?;
            let degree = args.degree.unwrap_or(6);
            let refine = args.refine.unwrap_or(0);
            check_2d_params(degree, refine)?;
            let r = case.run(&tri, degree, refine, exec).map_err(numerical("bubble identity"))?;
            let lap = geometry2d::bubble_laplacian_check(&tri, 100).map_err(numerical("bubble laplacian"))?;
            let report = Report::new(&[])
                .meta("case", "bubble")
                .meta("builtin", args.builtin.as_deref().unwrap_or("constant"))
                .meta("degree", degree)
                .meta("refine", refine as usize)
                .meta("area", tri.area())
                .meta("neg_laplacian_b", geometry2d::bubble_laplacian_constant(&tri))
                .meta("laplacian_residual", lap);
            (r, args.tol.unwrap_or(case.default_tolerance()), report)
        }
    };
    let passed = result.residual < tol;
    report = report
        .meta("lhs", result.lhs)
        .meta("rhs", result.rhs)
        .meta("residual", result.residual)
        .meta("tol", tol)
        .meta("status", if passed { "pass" } else { "FAIL" });
    let text = report.render(args.format);
    if passed {
        Ok(text)
    } else {
        print!("{text}");
        Err(CliError::CheckFailed(format!("residual {:e} >= tol {tol:e}", result.residual)))
    }
}

fn check_2d_params(degree: usize, refine: u32) -> Result<(), CliError> {
    if degree == 0 || degree > geometry2d::MAX_RULE_DEGREE {
        return Err(usage(format!("--degree must lie in 1..={}", geometry2d::MAX_RULE_DEGREE)));
    }
    if refine > 9 {
        return Err(usage("--refine must be <= 9"));
    }
    Ok(())
}

fn cmd_mesh(args: &MeshArgs) -> Result<String, CliError> {
    let mesh = load_mesh(&args.mesh)?;
    let text = mesh.to_node_text();
    match &args.output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| numerical("mesh write")(CoreError::from(e)))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a, exec),
        Command::Convergence(a) => cmd_convergence(a, exec),
        Command::TwoD(a) => cmd_2d(a, exec),
        Command::Mesh(a) => cmd_mesh(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e @ CliError::Usage(_)) => {
            eprintln!("error: {e}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
