//! Command-line frontend behind the `tsdp` binary.
//!
//! Exit codes: 0 success, 1 solver did not reach an (near-)optimal point or a
//! selftest check failed, 2 invalid input.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::csdp::{SolveStatus, SolverOptions};
use crate::polyopt::{
    integer_quartic_oracle, integer_quartic_relaxation, max_teig_oracle, min_max_teigenvalue,
    min_spectral_norm, nuclear_norm_oracle, nuclear_norm_tsdp, sos_report, spectral_norm_oracle,
    Polynomial,
};
use crate::selftest::{self, SelftestConfig};
use crate::tcore::{identity, Tensor3};
use crate::tsdp::TsdpSolution;
use crate::Error;

/// Version of every JSON document the CLI prints.
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NON_OPTIMAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "tsdp",
    version,
    about = "Tensor semidefinite programming toolkit"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Relative duality gap at which the interior-point method stops.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub gap_tol: f64,
    /// Relative primal and dual residual at which the interior-point method stops.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub feas_tol: f64,
    /// Print one JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for generated tensors and selftest suites.
    #[arg(long, global = true, default_value_t = selftest::DEFAULT_SEED)]
    pub seed: u64,
    /// Print interior-point iterations to stderr.
    #[arg(long, global = true)]
    pub verbose: bool,
}

impl RunConfig {
    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            gap_tol: self.gap_tol,
            feas_tol: self.feas_tol,
            verbose: self.verbose,
            ..SolverOptions::default()
        }
    }
}

/// Tensor arguments are a JSON file `{"m","n","p","slices"}` or one of the
/// generators `identity:NxP`, `zeros:MxNxP`, `random:MxNxP`, `randsym:NxP`.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lower bound of a polynomial by the circulant SOS relaxation.
    Polymin {
        /// Polynomial file ("vars N" header, one "coeff x1^a x2^b" term per line).
        path: PathBuf,
        /// Tube size; must divide the monomial basis size. 1 is the classic SDP route.
        #[arg(long, default_value_t = 1)]
        p: usize,
    },
    /// Spectral and nuclear norms of a tensor, or the least spectral norm over an affine family.
    Tnorm {
        tensor: String,
        /// Tensors P_k of the family P₀ + Σ z_k P_k.
        #[arg(long = "family", num_args = 1..)]
        family: Vec<String>,
    },
    /// Least maximum T-eigenvalue over M₀ + Σ z_k M_k.
    Teig {
        tensor: String,
        #[arg(long = "family", num_args = 1..)]
        family: Vec<String>,
    },
    /// Relaxation bound for max ⟨X, A ∗ X⟩ over sign vectors, against exhaustive search.
    Iqp { tensor: String },
    /// Seeded property suites.
    Selftest {
        /// Run only suites whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
        /// Trials per algebraic property.
        #[arg(long, default_value_t = selftest::DEFAULT_TRIALS)]
        trials: usize,
    },
}

/// Failure carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::Dimension(_)
            | Error::OddDegree(_)
            | Error::InvalidTubeSize { .. }
            | Error::InvalidArgument(_)
            | Error::NotSymmetric { .. }
            | Error::NonFinite => EXIT_INPUT,
            _ => EXIT_NON_OPTIMAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

/// Rendered result: the JSON document plus its text form and exit code.
pub struct Outcome {
    pub json: Value,
    pub text: String,
    pub code: i32,
}

/// Parses `args` (including the program name) and runs the command, printing to stdout.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            if cli.config.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&out.json).expect("JSON values serialize")
                );
            } else {
                print!("{}", out.text);
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Polymin { path, p } => cmd_polymin(cfg, path, *p),
        Command::Tnorm { tensor, family } => cmd_tnorm(cfg, tensor, family),
        Command::Teig { tensor, family } => cmd_teig(cfg, tensor, family),
        Command::Iqp { tensor } => cmd_iqp(cfg, tensor),
        Command::Selftest { filter, trials } => cmd_selftest(cfg, filter.as_deref(), *trials),
    }
}

fn status_name(s: SolveStatus) -> String {
    serde_json::to_value(s)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn exit_for(sol: &TsdpSolution) -> i32 {
    if sol.is_near_optimal() {
        EXIT_OK
    } else {
        EXIT_NON_OPTIMAL
    }
}

fn status_line(sol: &TsdpSolution) -> String {
    let near = if sol.status != SolveStatus::Optimal && sol.is_near_optimal() {
        " (near-optimal)"
    } else {
        ""
    };
    format!(
        "{}{near}, {} iterations",
        status_name(sol.status),
        sol.iterations
    )
}

fn json_number(v: f64) -> Value {
    // JSON has no infinities; an infeasible relaxation reports `null`.
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn cmd_polymin(cfg: &RunConfig, path: &PathBuf, p: usize) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    let f = Polynomial::parse(&text)?;
    let start = Instant::now();
    let r = sos_report(&f, p, &cfg.solver_options())?;
    let total = start.elapsed().as_secs_f64();
    let sol = &r.solution;
    let json = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "polymin",
        "bound": json_number(r.bound),
        "p": r.p,
        "blocks": r.blocks,
        "block_size": r.block_size,
        "basis_size": r.basis_size,
        "constraints": r.constraints,
        "constraints_with_constant": r.constraints_with_constant,
        "status": status_name(r.status),
        "near_optimal": sol.is_near_optimal(),
        "iterations": sol.iterations,
        "primal_residual": sol.primal_residual,
        "dual_residual": sol.dual_residual,
        "time_build": r.time_build,
        "time_solve": r.time_solve,
        "time_total": total,
    });
    let route = if p == 1 { "SDP" } else { "TSDP" };
    let text = format!(
        "polynomial   {} ({} variables, degree {}, {} terms)\n\
         route        {route}, p = {}\n\
         (blk, N, m)  ({}, {}, {})  [{} counting the constant-term equation]\n\
         bound        {:e}\n\
         status       {}\n\
         residuals    primal {:.3e}, dual {:.3e}\n\
         time         build {:.3}s, solve {:.3}s, total {:.3}s\n",
        path.display(),
        f.n,
        f.degree(),
        f.num_terms(),
        r.p,
        r.blocks,
        r.block_size,
        r.constraints,
        r.constraints_with_constant,
        r.bound,
        status_line(sol),
        sol.primal_residual,
        sol.dual_residual,
        r.time_build,
        r.time_solve,
        total,
    );
    Ok(Outcome {
        json,
        text,
        code: exit_for(sol),
    })
}

fn parse_dims(dims_text: &str, count: usize) -> Result<Vec<usize>, CliError> {
    let dims: Vec<usize> = dims_text
        .split('x')
        .map(|d| d.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| input_error(format!("bad dimensions {dims_text:?}")))?;
    if dims.len() != count || dims.contains(&0) {
        return Err(input_error(format!(
            "expected {count} positive dimensions separated by 'x', found {dims_text:?}"
        )));
    }
    Ok(dims)
}

/// Loads a tensor argument; generators draw from `rng`.
pub fn load_tensor(arg: &str, rng: &mut ChaCha8Rng) -> Result<Tensor3, CliError> {
    if let Some((kind, dims)) = arg.split_once(':') {
        let t = match kind {
            "identity" => {
                let d = parse_dims(dims, 2)?;
                Some(identity(d[0], d[1]))
            }
            "zeros" => {
                let d = parse_dims(dims, 3)?;
                Some(Tensor3::zeros(d[0], d[1], d[2]))
            }
            "random" => {
                let d = parse_dims(dims, 3)?;
                Some(Tensor3::random(d[0], d[1], d[2], rng))
            }
            "randsym" => {
                let d = parse_dims(dims, 2)?;
                Some(Tensor3::random_symmetric(d[0], d[1], rng))
            }
            _ => None,
        };
        if let Some(t) = t {
            return Ok(t);
        }
    }
    let text =
        std::fs::read_to_string(arg).map_err(|e| input_error(format!("cannot read {arg}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| input_error(format!("{arg}: {e}")))
}

fn load_family(
    base: &str,
    family: &[String],
    rng: &mut ChaCha8Rng,
) -> Result<(Tensor3, Vec<Tensor3>), CliError> {
    let t0 = load_tensor(base, rng)?;
    let ts = family
        .iter()
        .map(|f| load_tensor(f, rng))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((t0, ts))
}

fn affine(t0: &Tensor3, ts: &[Tensor3], z: &[f64]) -> Tensor3 {
    ts.iter()
        .zip(z)
        .fold(t0.clone(), |acc, (t, &zk)| &acc + &t.scaled(zk))
}

fn comparison(value: f64, oracle: f64, sol: &TsdpSolution) -> Value {
    json!({
        "value": value,
        "oracle": oracle,
        "gap": (value - oracle).abs(),
        "status": status_name(sol.status),
        "near_optimal": sol.is_near_optimal(),
        "iterations": sol.iterations,
    })
}

fn comparison_text(label: &str, value: f64, oracle: f64, sol: &TsdpSolution) -> String {
    format!(
        "{label:<12} {value:e}  oracle {oracle:e}  gap {:.3e}  [{}]\n",
        (value - oracle).abs(),
        status_line(sol)
    )
}

pub fn cmd_tnorm(cfg: &RunConfig, tensor: &str, family: &[String]) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (p0, ps) = load_family(tensor, family, &mut rng)?;
    let opts = cfg.solver_options();
    let start = Instant::now();
    let spectral = min_spectral_norm(&p0, &ps, &opts)?;
    let spectral_oracle = spectral_norm_oracle(&affine(&p0, &ps, &spectral.z));
    let mut text = format!("tensor       {} ({:?})\n", tensor, p0.shape());
    text += &comparison_text(
        "spectral",
        spectral.value,
        spectral_oracle,
        &spectral.solution,
    );
    let mut code = exit_for(&spectral.solution);
    let mut json = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "tnorm",
        "shape": p0.shape(),
        "spectral": comparison(spectral.value, spectral_oracle, &spectral.solution),
        "z": spectral.z,
    });
    if ps.is_empty() {
        let (nuc, sol) = nuclear_norm_tsdp(&p0, &opts)?;
        let nuc_oracle = nuclear_norm_oracle(&p0);
        text += &comparison_text("nuclear", nuc, nuc_oracle, &sol);
        json["nuclear"] = comparison(nuc, nuc_oracle, &sol);
        code = code.max(exit_for(&sol));
    } else {
        text += &format!("z            {:?}\n", spectral.z);
    }
    let elapsed = start.elapsed().as_secs_f64();
    json["time_solve"] = json!(elapsed);
    text += &format!("time         solve {elapsed:.3}s\n");
    Ok(Outcome { json, text, code })
}

pub fn cmd_teig(cfg: &RunConfig, tensor: &str, family: &[String]) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (m0, ms) = load_family(tensor, family, &mut rng)?;
    let start = Instant::now();
    let r = min_max_teigenvalue(&m0, &ms, &cfg.solver_options())?;
    let oracle = max_teig_oracle(&affine(&m0, &ms, &r.z))?;
    let elapsed = start.elapsed().as_secs_f64();
    let mut json = comparison(r.value, oracle, &r.solution);
    json["schema_version"] = json!(SCHEMA_VERSION);
    json["command"] = json!("teig");
    json["shape"] = json!(m0.shape());
    json["z"] = json!(r.z);
    json["time_solve"] = json!(elapsed);
    let mut text = format!("tensor       {} ({:?})\n", tensor, m0.shape());
    text += &comparison_text("max T-eig", r.value, oracle, &r.solution);
    if !ms.is_empty() {
        text += &format!("z            {:?}\n", r.z);
    }
    text += &format!("time         solve {elapsed:.3}s\n");
    Ok(Outcome {
        json,
        text,
        code: exit_for(&r.solution),
    })
}

/// Largest size for which the exhaustive sign-vector search is run.
const IQP_ORACLE_MAX_N: usize = 16;

pub fn cmd_iqp(cfg: &RunConfig, tensor: &str) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let a = load_tensor(tensor, &mut rng)?;
    let start = Instant::now();
    let (bound, sol) = integer_quartic_relaxation(&a, &cfg.solver_options())?;
    let oracle = if a.m() <= IQP_ORACLE_MAX_N {
        Some(integer_quartic_oracle(&a)?)
    } else {
        None
    };
    let elapsed = start.elapsed().as_secs_f64();
    let json = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "iqp",
        "shape": a.shape(),
        "bound": bound,
        "oracle": oracle,
        "gap": oracle.map(|o| bound - o),
        "status": status_name(sol.status),
        "near_optimal": sol.is_near_optimal(),
        "iterations": sol.iterations,
        "time_solve": elapsed,
    });
    let oracle_text = match oracle {
        Some(o) => format!("{o:e}  gap {:.3e}", bound - o),
        None => format!("skipped (n > {IQP_ORACLE_MAX_N})"),
    };
    let text = format!(
        "tensor       {} ({:?})\nbound        {bound:e}  [{}]\noracle       {oracle_text}\ntime         solve {elapsed:.3}s\n",
        tensor,
        a.shape(),
        status_line(&sol),
    );
    Ok(Outcome {
        json,
        text,
        code: exit_for(&sol),
    })
}

pub fn cmd_selftest(
    cfg: &RunConfig,
    filter: Option<&str>,
    trials: usize,
) -> Result<Outcome, CliError> {
    let config = SelftestConfig {
        seed: cfg.seed,
        trials,
    };
    let reports = selftest::run(filter, config)?;
    let passed = reports.iter().all(|r| r.passed());
    let mut text = format!("selftest seed {}\n", cfg.seed);
    for r in &reports {
        for c in &r.checks {
            text += &format!(
                "{} {:<10} {:<26} {:>4} trials  {:>3} failures  worst {:.3e}\n",
                if c.passed() { "PASS" } else { "FAIL" },
                r.suite,
                c.name,
                c.trials,
                c.failures,
                c.worst
            );
        }
    }
    text += if passed {
        "all suites passed\n"
    } else {
        "some checks FAILED\n"
    };
    Ok(Outcome {
        json: json!({
            "schema_version": SCHEMA_VERSION,
            "command": "selftest",
            "seed": cfg.seed,
            "passed": passed,
            "suites": reports,
        }),
        text,
        code: if passed { EXIT_OK } else { EXIT_NON_OPTIMAL },
    })
}
