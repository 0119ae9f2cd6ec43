#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qcqpx_cli::generate::{generate, Family, GenerateArgs};
use qcqpx_cli::render::{render_svg, RenderSpec, DEFAULT_RESOLUTION};
use qcqpx_cli::report::{default_bbox, solve_instance, verify_set, VerifyOptions};
use qcqpx_cli::{exit, parse_list, read_instance, table1, write_text, CliError, CliResult};
use qcqpx_core::sdp::SolverOptions;
use qcqpx_core::verify::{BoundingBox, Condition};
use qcqpx_core::{InstanceFile, SymMatrix};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  a verification check failed, or extraction failed on an optimal SDP
  2  usage or parse error
  3  I/O error
  4  SDP unbounded
  5  SDP infeasible
  6  iteration limit reached
  7  table1 rows do not match the expected values";

#[derive(Parser)]
#[command(name = "qcqpx", version, about = "QCQP instances with exact SDP relaxations", after_help = EXIT_CODES)]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Solver tolerance on residuals and gap.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for the falsifier sample sequence.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 200)]
    max_iter: usize,
    /// Primal objective magnitude, relative to 1+‖Q‖, treated as unbounded.
    #[arg(long, global = true, default_value_t = 1e8)]
    unbounded_threshold: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an instance file for a named family.
    Generate {
        #[arg(value_enum)]
        family: Family,
        #[command(flatten)]
        args: GenerateArgs,
        /// Output path; the file goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the SDP relaxation and extract a rank-1 solution.
    Solve {
        file: PathBuf,
        /// Objective: a name from the file's objectives, a JSON lower
        /// triangle, or a path to a file holding one. Defaults to the file's Q.
        #[arg(long)]
        objective: Option<String>,
    },
    /// Check the sufficient conditions on a constraint set.
    Verify {
        file: PathBuf,
        /// Conditions to check; all of them when omitted.
        #[arg(long = "condition", value_enum)]
        conditions: Vec<CondArg>,
        /// Sample count for the sampling falsifier.
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        /// Search box `lo,hi` or `lo1,hi1,lo2,hi2,…`.
        #[arg(long, allow_hyphen_values = true)]
        bbox: Option<String>,
        #[arg(long, default_value_t = qcqpx_core::verify::DEFAULT_ANGLE_GRID)]
        angle_grid: usize,
    },
    /// Draw the restricted zones of a planar set as SVG.
    Render {
        file: PathBuf,
        /// Plot box `lo,hi` or `x0,x1,y0,y1`.
        #[arg(long, allow_hyphen_values = true)]
        bbox: Option<String>,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve and extract all six rows of the reference example.
    Table1,
}

#[derive(Clone, Copy, ValueEnum)]
enum CondArg {
    #[value(name = "D")]
    D,
    #[value(name = "Dprime")]
    Dprime,
    #[value(name = "Cprime")]
    Cprime,
    #[value(name = "Bprime")]
    Bprime,
}

impl From<CondArg> for Condition {
    fn from(c: CondArg) -> Self {
        match c {
            CondArg::D => Condition::D,
            CondArg::Dprime => Condition::Dprime,
            CondArg::Cprime => Condition::Cprime,
            CondArg::Bprime => Condition::BprimeFalsifier,
        }
    }
}

fn parse_bbox(s: &str, dim: usize) -> CliResult<BoundingBox> {
    let v = parse_list(s)?;
    let b = if v.len() == 2 {
        BoundingBox::new(vec![v[0]; dim], vec![v[1]; dim])
    } else if v.len() == 2 * dim {
        BoundingBox::new(v.iter().step_by(2).copied().collect(), v.iter().skip(1).step_by(2).copied().collect())
    } else {
        return Err(CliError::usage(format!("--bbox needs 2 or {} numbers, got {}", 2 * dim, v.len())));
    };
    Ok(b?)
}

fn resolve_objective(file: &InstanceFile, arg: Option<&str>) -> CliResult<SymMatrix> {
    let Some(arg) = arg else {
        return Ok(file.objective(None)?);
    };
    if file.objectives.contains_key(arg) {
        return Ok(file.objective(Some(arg))?);
    }
    let text = if arg.trim_start().starts_with('[') {
        arg.to_string()
    } else if Path::new(arg).exists() {
        std::fs::read_to_string(arg).map_err(|e| CliError::io(Path::new(arg), e))?
    } else {
        let known: Vec<&str> = file.objectives.keys().map(String::as_str).collect();
        return Err(CliError::usage(format!(
            "objective '{arg}' is not a name in the file {known:?}, a JSON array or an existing path"
        )));
    };
    let lower: Vec<f64> =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("objective must be a JSON array: {e}")))?;
    Ok(SymMatrix::from_lower(file.n, lower)?)
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> CliResult<()> {
    if json {
        let s = serde_json::to_string_pretty(value).map_err(|e| CliError::usage(e.to_string()))?;
        println!("{s}");
    } else {
        print!("{}", text());
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<i32> {
    let opts = SolverOptions {
        tol: cli.tol,
        max_iter: cli.max_iter,
        unbounded_threshold: cli.unbounded_threshold,
        ..SolverOptions::default()
    };
    match cli.command {
        Command::Generate { family, args, out } => {
            let g = generate(family, &args)?;
            let text = g.file.to_json()?;
            match &out {
                Some(p) => write_text(p, &(text + "\n"))?,
                None => println!("{text}"),
            }
            let summary = format!(
                "{} constraints, n = {}; D: {}; Cprime: {}\n",
                g.file.constraints.len(),
                g.file.n,
                if g.d.passed { "pass" } else { "fail" },
                if g.cprime.passed { "pass" } else { "fail" },
            );
            if out.is_some() && !cli.json {
                print!("{summary}");
            } else {
                eprint!("{summary}");
            }
            Ok(exit::OK)
        }
        Command::Solve { file, objective } => {
            let f = read_instance(&file)?;
            let q = resolve_objective(&f, objective.as_deref())?;
            let inst = qcqpx_core::QcqpInstance::new(q, f.h_matrix()?, f.constraint_set()?)?;
            let rep = solve_instance(&inst, &opts)?;
            emit(cli.json, &rep, || rep.to_text())?;
            Ok(rep.exit_code())
        }
        Command::Verify {
            file,
            conditions,
            samples,
            bbox,
            angle_grid,
        } => {
            let f = read_instance(&file)?;
            let set = f.constraint_set()?;
            let conds: Vec<Condition> = if conditions.is_empty() {
                vec![Condition::D, Condition::Dprime, Condition::Cprime, Condition::BprimeFalsifier]
            } else {
                conditions.into_iter().map(Condition::from).collect()
            };
            let bbox = bbox.map(|b| parse_bbox(&b, f.n.saturating_sub(1))).transpose()?;
            let vopts = VerifyOptions {
                samples,
                seed: cli.seed,
                angle_grid,
            };
            let rep = verify_set(&set, &conds, bbox, &vopts)?;
            let labels: Vec<String> = f.constraints.iter().map(|c| c.label.clone()).collect();
            emit(cli.json, &rep, || rep.to_text(&labels))?;
            Ok(if rep.all_passed() { exit::OK } else { exit::CHECK_FAILED })
        }
        Command::Render {
            file,
            bbox,
            resolution,
            out,
        } => {
            let f = read_instance(&file)?;
            if f.n != 3 {
                return Err(CliError::usage(format!("render needs n = 3, got {}", f.n)));
            }
            let set = f.constraint_set()?;
            let bbox = match bbox {
                Some(b) => parse_bbox(&b, 2)?,
                None => default_bbox(&set)?.unwrap_or(BoundingBox::square(-5.0, 5.0)?),
            };
            let svg = render_svg(&set, &RenderSpec::new(bbox, resolution)?)?;
            write_text(&out, &svg)?;
            Ok(exit::OK)
        }
        Command::Table1 => {
            let rep = table1::run(&opts)?;
            emit(cli.json, &rep, || rep.to_text())?;
            Ok(if rep.passed { exit::OK } else { exit::MISMATCH })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
