//! `mipo`: batch front end. Every invocation prints one JSON report on
//! stdout; progress notes go to stderr.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use mipo_core::instance::{self, Instance};
use mipo_core::integer_opt::{bounds, oracle_optimize};
use mipo_core::mixed_opt::{constancy_grid, fptas_maximize, is_constant, range_bounds, weak_maximize};
use mipo_core::numeric::{format_rat, parse_rat};
use mipo_core::{Error, ExactInt, ExactRat, FptasOptions, GuaranteeKind, Solution};

#[derive(Parser)]
#[command(name = "mipo", version, about = "Certified polynomial maximization over mixed-integer points of polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximately maximize the objective.
    Optimize {
        instance: PathBuf,
        /// Accuracy as an exact rational in (0, 1), e.g. 1/4.
        #[arg(long, default_value = "1/2", value_parser = rational)]
        epsilon: ExactRat,
        /// Use the weak scheme, which accepts objectives of any sign.
        #[arg(long, conflicts_with = "oracle")]
        weak: bool,
        /// Grid size to use instead of the certified one.
        #[arg(long, value_parser = integer)]
        grid_m: Option<ExactInt>,
        /// Exact optimum by enumerating the grid (default grid: Δ max(1, (D+1) d1)).
        #[arg(long)]
        oracle: bool,
        /// Refuse grids whose box estimate exceeds this many points.
        #[arg(long, default_value = "5000000", value_parser = integer)]
        max_points: ExactInt,
    },
    /// Moment bounds L_k <= f* <= U_k over the integer points.
    Bounds {
        instance: PathBuf,
        #[arg(long)]
        k: u32,
    },
    /// Number of points of the 1/m grid.
    Count {
        instance: PathBuf,
        #[arg(long, value_parser = integer)]
        grid_m: ExactInt,
    },
    /// Decide whether the objective is constant on the feasible set.
    Constant { instance: PathBuf },
    /// Range bounds L_i <= f_min <= f_max <= U_i.
    Range {
        instance: PathBuf,
        #[arg(long, default_value = "1/2", value_parser = rational)]
        delta: ExactRat,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "5000000", value_parser = integer)]
        max_points: ExactInt,
    },
    /// Integral scaling factor Δ.
    Delta { instance: PathBuf },
    /// Emit a built-in instance.
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, value_parser = integer, required_if_eq("family", "an1"))]
        a: Option<ExactInt>,
        #[arg(long, value_parser = integer, required_if_eq("family", "an1"))]
        b: Option<ExactInt>,
        #[arg(long, value_parser = integer, required_if_eq("family", "an1"))]
        c: Option<ExactInt>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    An1,
    Parity,
}

fn rational(s: &str) -> Result<ExactRat, String> {
    parse_rat(s).map_err(|e| e.to_string())
}

fn integer(s: &str) -> Result<ExactInt, String> {
    s.trim().parse::<ExactInt>().map_err(|_| format!("invalid integer {s:?}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Status {
    Ok,
    Infeasible,
    Unbounded,
    Constant,
    RefusedSize,
    Error,
    InternalError,
}

impl Status {
    fn exit_code(self) -> u8 {
        match self {
            Status::Ok | Status::Constant => 0,
            Status::Error => 2,
            Status::Infeasible | Status::Unbounded => 3,
            Status::RefusedSize => 4,
            Status::InternalError => 5,
        }
    }
}

/// A failed command: status plus a message and optional details.
struct Failure {
    status: Status,
    message: String,
    details: Option<Value>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (status, details) = match &e {
            Error::Infeasible | Error::EmptyFeasibleSet => (Status::Infeasible, None),
            Error::Unbounded => (Status::Unbounded, None),
            Error::RefusedSize { m, estimate, limit } => (
                Status::RefusedSize,
                Some(json!({
                    "m": m.to_string(),
                    "estimate": estimate.to_string(),
                    "limit": limit.to_string(),
                })),
            ),
            _ => (Status::Error, None),
        };
        Failure {
            status,
            message: e.to_string(),
            details,
        }
    }
}

fn input_error(message: String) -> Failure {
    Failure {
        status: Status::Error,
        message,
        details: None,
    }
}

struct Outcome {
    status: Status,
    body: Value,
}

fn load(path: &PathBuf) -> Result<Instance, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    let inst = Instance::from_json(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    eprintln!(
        "loaded {} (d1 = {}, d2 = {}, {} constraints, degree {})",
        inst.name.as_deref().unwrap_or("instance"),
        inst.polytope.d1(),
        inst.polytope.d2(),
        inst.polytope.num_rows(),
        inst.objective.degree()
    );
    Ok(inst)
}

fn solution_json(solution: &Solution) -> Result<Value, Failure> {
    solution.replay().map_err(|what| Failure {
        status: Status::InternalError,
        message: format!("certificate failed to replay: {what}"),
        details: None,
    })?;
    Ok(serde_json::to_value(solution).expect("solution serializes"))
}

fn solution_outcome(solution: Solution) -> Result<Outcome, Failure> {
    let status = if solution.guarantee.kind == GuaranteeKind::Constant {
        Status::Constant
    } else {
        Status::Ok
    };
    Ok(Outcome {
        status,
        body: json!({ "solution": solution_json(&solution)? }),
    })
}

fn run(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Optimize {
            instance,
            epsilon,
            weak,
            grid_m,
            oracle,
            max_points,
        } => {
            let inst = load(&instance)?;
            let (p, f) = (&inst.polytope, &inst.objective);
            if oracle {
                p.checked_bound()?;
                let m = grid_m.unwrap_or_else(|| constancy_grid(p, &f.clear_denominators().0));
                eprintln!("enumerating the 1/{m} grid");
                let result = oracle_optimize(p.enumerate_grid_points(&m)?, f)?;
                return Ok(Outcome {
                    status: Status::Ok,
                    body: json!({
                        "grid_m": m.to_string(),
                        "solution": solution_json(&result.max)?,
                        "minimum": solution_json(&result.min)?,
                    }),
                });
            }
            let options = FptasOptions {
                max_grid_points: max_points,
                grid_override: grid_m,
            };
            let solution = if weak {
                eprintln!("running the weak scheme with epsilon = {}", format_rat(&epsilon));
                weak_maximize(p, f, &epsilon, &options)?
            } else {
                eprintln!("running the FPTAS with epsilon = {}", format_rat(&epsilon));
                fptas_maximize(p, f, &epsilon, &options)?
            };
            solution_outcome(solution)
        }
        Command::Bounds { instance, k } => {
            let inst = load(&instance)?;
            let pair = bounds(&inst.polytope, &inst.objective, k)?;
            Ok(Outcome {
                status: Status::Ok,
                body: json!({ "bounds": pair }),
            })
        }
        Command::Count { instance, grid_m } => {
            let inst = load(&instance)?;
            inst.polytope.checked_bound()?;
            let count = inst.polytope.count_grid_points(&grid_m)?;
            Ok(Outcome {
                status: Status::Ok,
                body: json!({ "grid_m": grid_m.to_string(), "count": count.to_string() }),
            })
        }
        Command::Constant { instance } => {
            let inst = load(&instance)?;
            let verdict = is_constant(&inst.polytope, &inst.objective)?;
            let witness = verdict.witness.as_ref().map(|(p, v)| {
                json!({ "point": p, "value": format_rat(v) })
            });
            Ok(Outcome {
                status: if verdict.constant { Status::Constant } else { Status::Ok },
                body: json!({
                    "constant": verdict.constant,
                    "grid_m": verdict.m.to_string(),
                    "point": verdict.point,
                    "value": format_rat(&verdict.value),
                    "witness": witness,
                }),
            })
        }
        Command::Range {
            instance,
            delta,
            n,
            max_points,
        } => {
            let inst = load(&instance)?;
            let (fi, multiplier) = inst.objective.clear_denominators();
            let options = FptasOptions {
                max_grid_points: max_points,
                grid_override: None,
            };
            let trace = range_bounds(&inst.polytope, &fi, &delta, n, &options)?;
            Ok(Outcome {
                status: Status::Ok,
                body: json!({
                    "multiplier": multiplier.to_string(),
                    "grid_m": trace.grid_m.to_string(),
                    "plan": trace.plan,
                    "trace": trace.states,
                }),
            })
        }
        Command::Delta { instance } => {
            let inst = load(&instance)?;
            Ok(Outcome {
                status: Status::Ok,
                body: json!({ "delta": inst.polytope.integral_scaling_factor().to_string() }),
            })
        }
        Command::Generate { .. } => unreachable!("generate is handled before dispatch"),
    }
}

fn generate(family: Family, a: Option<ExactInt>, b: Option<ExactInt>, c: Option<ExactInt>) -> Result<String, Failure> {
    match family {
        Family::Parity => Ok(instance::parity().to_json()),
        Family::An1 => {
            let (a, b, c) = (a.unwrap(), b.unwrap(), c.unwrap());
            Ok(instance::an1(&a, &b, &c)?.to_json())
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Optimize { .. } => "optimize",
        Command::Bounds { .. } => "bounds",
        Command::Count { .. } => "count",
        Command::Constant { .. } => "constant",
        Command::Range { .. } => "range",
        Command::Delta { .. } => "delta",
        Command::Generate { .. } => "generate",
    }
}

fn emit(command: &str, status: Status, mut body: Value, started: Instant) -> ExitCode {
    let map = body.as_object_mut().expect("report body is an object");
    map.insert("command".into(), json!(command));
    map.insert("status".into(), json!(status));
    map.insert(
        "timing".into(),
        json!({ "elapsed_ms": started.elapsed().as_millis().to_string() }),
    );
    println!("{}", serde_json::to_string_pretty(&body).expect("report serializes"));
    ExitCode::from(status.exit_code())
}

fn failure_body(f: Failure) -> (Status, Value) {
    let mut body = json!({ "error": f.message });
    if let Some(d) = f.details {
        body["details"] = d;
    }
    (f.status, body)
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                // --help and --version
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            let first = e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            let (status, body) = failure_body(input_error(first));
            return emit("unknown", status, body, started);
        }
    };
    let name = command_name(&cli.command);
    if let Command::Generate { family, a, b, c } = cli.command {
        return match generate(family, a, b, c) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(f) => {
                let (status, body) = failure_body(f);
                emit(name, status, body, started)
            }
        };
    }
    let (status, body) = match run(cli.command) {
        Ok(outcome) => (outcome.status, outcome.body),
        Err(f) => failure_body(f),
    };
    eprintln!("status: {}", serde_json::to_value(status).unwrap().as_str().unwrap());
    emit(name, status, body, started)
}
