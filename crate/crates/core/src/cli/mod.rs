//! Command-line front end. Every subcommand is a thin wrapper over a library
//! call; results go to `--out` (or stdout) as CSV or JSON with the tool
//! version, parameters and seed recorded alongside.
//!
//! Exit codes: 0 success, 1 reproduction mismatch or solver failure,
//! 2 usage or validation error, 3 resource limit.

mod output;
mod reproduce;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::coarsening::{coarsen_assignment, core_of_cluster, is_cover, OrderPolicy};
use crate::deviations::{critical_point, default_bracket, minimize_over_alpha, StationarySolution, DEFAULT_TOL};
use crate::error::Error;
use crate::formula::{
    emit_dimacs, gen_planted_negative, gen_single_sat_literal, gen_uniform, parse_dimacs, Assignment, Formula,
    ModelTag, SelectionMode,
};
use crate::geometry::{cluster_stats, decompose_clusters, enumerate_solutions_with_cap, region_partition, word_string};
use crate::rates::{cluster_count_exponent, forbidden_intervals, g_max, ln_lambda_b_half, r_from_gamma};
use crate::stripping::{run_modified_with, run_original_with, trial_seed, BluePolicy, SimParams};

pub use output::{Meta, Table};
pub use reproduce::{reproduce, round_to, tk_bracket, ReproduceOptions, Target};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCES: i32 = 3;

pub const TOOL: &str = "solspace";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "solspace", version, about = "Solution-space geometry and freezing bounds for random k-SAT")]
pub struct Cli {
    /// Base seed for every random choice.
    #[arg(long, env = "SOLSPACE_SEED", default_value_t = 0, global = true)]
    pub seed: u64,
    /// Worker threads for trial fan-out.
    #[arg(long, env = "SOLSPACE_THREADS", global = true)]
    pub threads: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random formula as DIMACS.
    Gen(GenArgs),
    /// Enumerate solutions and decompose them into clusters.
    Enumerate(EnumerateArgs),
    /// Coarsen an assignment, or every cluster of a formula, to its fixed point.
    Coarsen(CoarsenArgs),
    /// Run the balls-in-bins stripping process.
    Simulate(SimulateArgs),
    /// Evaluate first-moment rates at one density.
    Rates(RatesArgs),
    /// Solve for the critical density c_k^α, or minimise it over α.
    Optimize(OptimizeArgs),
    /// Recompute a published table or curve and compare cell by cell.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    /// uniform, planted_negative or single_sat_literal.
    #[arg(long, default_value = "uniform")]
    pub model: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Clause count; overrides --r.
    #[arg(long)]
    pub m: Option<usize>,
    /// Density; m = round(r n).
    #[arg(long)]
    pub r: Option<f64>,
    /// Draw the k variables of a clause with replacement.
    #[arg(long)]
    pub with_replacement: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub dimacs: PathBuf,
    /// Hamming radius defining adjacency.
    #[arg(long, default_value_t = 1)]
    pub radius: u32,
    /// Largest n to enumerate.
    #[arg(long, default_value_t = crate::geometry::DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
    /// Group clusters into regions for the gap (a, b).
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub regions: Option<Vec<u32>>,
    /// Include every cluster's members.
    #[arg(long)]
    pub members: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Lowest,
    Random,
}

#[derive(Debug, Args, Serialize)]
pub struct CoarsenArgs {
    #[arg(long)]
    pub dimacs: PathBuf,
    /// Assignment as a 0/1 string; when absent every cluster's core is computed.
    #[arg(long)]
    pub assignment: Option<String>,
    #[arg(long, value_enum, default_value_t = Order::Lowest)]
    pub order: Order,
    #[arg(long, default_value_t = crate::geometry::DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessArg {
    Original,
    Modified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyArg {
    Uniform,
    Lowest,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = ProcessArg::Original)]
    pub process: ProcessArg,
    /// Step count for the modified process.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum, default_value_t = PolicyArg::Uniform)]
    pub policy: PolicyArg,
}

#[derive(Debug, Args, Serialize)]
pub struct RatesArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long, conflicts_with = "gamma")]
    pub r: Option<f64>,
    /// Density as a multiple of 2^k ln 2.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub grid: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub k: u32,
    /// Fixed α; when absent c_k^α is minimised over α.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub bracket: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Target,
    /// System size for table-tk.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    /// Trials per density for table-tk.
    #[arg(long, default_value_t = 51)]
    pub trials: usize,
}

/// Parse and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Exit code for a library error.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit(_) => EXIT_RESOURCES,
        Error::InvalidParameters(_)
        | Error::InvalidInput(_)
        | Error::InvalidFormula(_)
        | Error::Parse { .. }
        | Error::Domain(_)
        | Error::Bracket(_)
        | Error::Precondition(_)
        | Error::Io(_) => EXIT_USAGE,
        _ => EXIT_MISMATCH,
    }
}

fn execute(cli: &Cli) -> crate::Result<i32> {
    let started = Instant::now();
    let meta = |params: Value| Meta { tool: TOOL, version: VERSION, params, seed: cli.seed, started };
    let write = |text: String| output::write_output(cli.out.as_deref(), &text);
    match &cli.command {
        Command::Gen(a) => {
            let f = generate(a, cli.seed)?;
            write(format!("c seed={}\n{}", cli.seed, emit_dimacs(&f)))?;
        }
        Command::Enumerate(a) => {
            let payload = enumerate(a)?;
            write(output::envelope(&meta(to_value(a)), &payload))?;
        }
        Command::Coarsen(a) => {
            let payload = coarsen(a, cli.seed)?;
            write(output::envelope(&meta(to_value(a)), &payload))?;
        }
        Command::Simulate(a) => {
            let table = simulate(a, cli.seed)?;
            let m = meta(to_value(a));
            write(match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => table.to_csv(&m)?,
                Format::Json => output::envelope(&m, &table.to_json()),
            })?;
        }
        Command::Rates(a) => {
            let payload = rates(a)?;
            write(output::envelope(&meta(to_value(a)), &payload))?;
        }
        Command::Optimize(a) => {
            let payload = optimize(a)?;
            write(output::envelope(&meta(to_value(a)), &payload))?;
        }
        Command::Reproduce(a) => {
            let opts = ReproduceOptions { n: a.n, trials: a.trials, seed: cli.seed };
            let (table, pass) = reproduce(a.target, &opts)?;
            let m = meta(to_value(a));
            write(match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => table.to_csv(&m)?,
                Format::Json => output::envelope(&m, &json!({"pass": pass, "rows": table.to_json()})),
            })?;
            eprintln!("{}: {}", a.target.name(), if pass { "all cells pass" } else { "mismatch" });
            return Ok(if pass { EXIT_OK } else { EXIT_MISMATCH });
        }
    }
    Ok(EXIT_OK)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn generate(a: &GenArgs, seed: u64) -> crate::Result<Formula> {
    let model: ModelTag = a.model.parse()?;
    let m = match (a.m, a.r) {
        (Some(m), _) => m,
        (None, Some(r)) if r >= 0.0 && r.is_finite() => (r * a.n as f64).round() as usize,
        (None, Some(r)) => return Err(Error::InvalidParameters(format!("density {r} must be non-negative"))),
        (None, None) => return Err(Error::InvalidParameters("give --m or --r".into())),
    };
    let mode = if a.with_replacement { SelectionMode::WithReplacement } else { SelectionMode::Distinct };
    match model {
        ModelTag::Uniform => gen_uniform(a.n, a.k, m, seed, mode),
        ModelTag::PlantedNegative => gen_planted_negative(a.n, a.k, m, seed, mode),
        ModelTag::SingleSatLiteral => gen_single_sat_literal(a.n, a.k, m, seed),
    }
}

fn read_formula(path: &std::path::Path) -> crate::Result<Formula> {
    parse_dimacs(&std::fs::read_to_string(path)?)
}

fn enumerate(a: &EnumerateArgs) -> crate::Result<Value> {
    let f = read_formula(&a.dimacs)?;
    let set = enumerate_solutions_with_cap(&f, a.cap)?;
    let d = decompose_clusters(&set, a.radius)?;
    let n = f.n();
    let clusters: Vec<Value> = d
        .clusters
        .iter()
        .map(|c| {
            let st = cluster_stats(n, c)?;
            let mut v = json!({
                "size": st.size,
                "diameter": st.diameter,
                "frozen": st.frozen,
                "projection": st.projection.to_string(),
            });
            if a.members {
                v["members"] = c.iter().map(|&w| word_string(w, n)).collect();
            }
            Ok(v)
        })
        .collect::<crate::Result<_>>()?;
    let mut out = json!({
        "n": n,
        "m": f.m(),
        "solutions": set.len(),
        "adjacency_radius": a.radius,
        "cluster_count": d.clusters.len(),
        "clusters": clusters,
    });
    if let Some(ab) = &a.regions {
        out["regions"] = to_value(&region_partition(&d, ab[0], ab[1])?);
    }
    Ok(out)
}

fn coarsen(a: &CoarsenArgs, seed: u64) -> crate::Result<Value> {
    let f = read_formula(&a.dimacs)?;
    let policy = match a.order {
        Order::Lowest => OrderPolicy::LowestIndex,
        Order::Random => OrderPolicy::Random { seed },
    };
    if let Some(s) = &a.assignment {
        let sigma: Assignment = s.parse()?;
        let trace = coarsen_assignment(&f, &sigma, &policy)?;
        let cover = is_cover(&f, &trace.fixed_point)?;
        return Ok(json!({"trace": to_value(&trace), "is_cover": cover}));
    }
    let set = enumerate_solutions_with_cap(&f, a.cap)?;
    let d = decompose_clusters(&set, 1)?;
    let cores: Vec<Value> = d
        .clusters
        .iter()
        .map(|c| {
            let core = core_of_cluster(&f, c)?;
            Ok(json!({"size": c.len(), "core": core.to_string(), "stars": core.star_count(), "is_cover": is_cover(&f, &core)?}))
        })
        .collect::<crate::Result<_>>()?;
    Ok(json!({"n": f.n(), "clusters": cores}))
}

fn simulate(a: &SimulateArgs, seed: u64) -> crate::Result<Table> {
    use rayon::prelude::*;
    let p = SimParams {
        n: a.n,
        k: a.k,
        r: a.r,
        policy: match a.policy {
            PolicyArg::Uniform => BluePolicy::Uniform,
            PolicyArg::Lowest => BluePolicy::LowestIndex,
        },
    };
    if a.trials == 0 {
        return Err(Error::InvalidParameters("trials must be at least 1".into()));
    }
    match a.process {
        ProcessArg::Original => {
            let runs: Vec<_> = (0..a.trials as u64)
                .into_par_iter()
                .map(|t| {
                    let s = trial_seed(seed, 0, t);
                    run_original_with(&p, s).map(|r| (t, s, r))
                })
                .collect::<crate::Result<_>>()?;
            let mut table = Table::new(&["trial", "seed", "m", "steps", "exited_early", "frozen_fraction"]);
            for (t, s, r) in runs {
                table.push(vec![t.into(), s.into(), r.m.into(), r.steps_executed.into(), r.exited_early.into(), r.frozen_fraction.into()]);
            }
            Ok(table)
        }
        ProcessArg::Modified => {
            let steps = a.steps.ok_or_else(|| Error::InvalidParameters("--steps is required for the modified process".into()))?;
            let runs: Vec<_> = (0..a.trials as u64)
                .into_par_iter()
                .map(|t| {
                    let s = trial_seed(seed, 3, t);
                    run_modified_with(&p, steps, s).map(|r| (t, s, r))
                })
                .collect::<crate::Result<_>>()?;
            let mut table =
                Table::new(&["trial", "seed", "m", "steps", "event_held", "red_free_bins", "initial_blue_in_red_free"]);
            for (t, s, r) in runs {
                table.push(vec![
                    t.into(),
                    s.into(),
                    r.run.m.into(),
                    r.run.steps_executed.into(),
                    r.event8_held.into(),
                    r.red_free_bins.into(),
                    r.initial_blue_in_red_free.into(),
                ]);
            }
            Ok(table)
        }
    }
}

fn rates(a: &RatesArgs) -> crate::Result<Value> {
    let r = match (a.r, a.gamma) {
        (Some(r), _) => r,
        (None, Some(g)) => r_from_gamma(a.k, g),
        (None, None) => return Err(Error::InvalidParameters("give --r or --gamma".into())),
    };
    let intervals = forbidden_intervals(a.k, r, a.grid, 1e-12)?;
    let g = match g_max(a.k, r, a.grid) {
        Ok(g) => to_value(&g),
        Err(Error::NoForbiddenRegion(_)) => Value::Null,
        Err(e) => return Err(e),
    };
    let exponent = cluster_count_exponent(a.k, r).ok();
    Ok(json!({
        "k": a.k,
        "r": r,
        "forbidden": to_value(&intervals),
        "g": g,
        "ln_lambda_b_half": ln_lambda_b_half(a.k, r),
        "cluster_count_exponent": exponent,
    }))
}

/// JSON record for one stationary point.
pub fn stationary_record(sol: &StationarySolution) -> Value {
    let p = &sol.point;
    json!({
        "k": p.k, "alpha": p.alpha, "r": p.r,
        "delta": p.delta, "zeta": p.zeta, "epsilon": p.epsilon, "mu": p.mu,
        "Omega": sol.omega_value, "s": sol.s_value, "B": sol.b_value,
        "residuals": sol.residuals,
    })
}

fn optimize(a: &OptimizeArgs) -> crate::Result<Value> {
    match a.alpha {
        Some(alpha) => {
            let (lo, hi) = match &a.bracket {
                Some(b) => (b[0], b[1]),
                None => default_bracket(a.k),
            };
            let (c, sol) = critical_point(a.k, alpha, lo, hi, a.tol)?;
            Ok(json!({"c": c, "stationary": stationary_record(&sol)}))
        }
        None => {
            if a.bracket.is_some() {
                return Err(Error::InvalidParameters("--bracket needs --alpha".into()));
            }
            let cp = minimize_over_alpha(a.k, 1e-7)?;
            debug_assert!(cp.solution.max_residual() < DEFAULT_TOL * 1e3);
            Ok(json!({
                "c": cp.c,
                "alpha_m": cp.alpha,
                "alpha_residual": cp.alpha_residual,
                "stationary": stationary_record(&cp.solution),
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["solspace", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["solspace", "reproduce", "table-zz"]), EXIT_USAGE);
        assert_eq!(run(["solspace", "--version"]), EXIT_OK);
    }

    #[test]
    fn error_classes() {
        assert_eq!(exit_code_for(&Error::ResourceLimit("x".into())), EXIT_RESOURCES);
        assert_eq!(exit_code_for(&Error::InvalidParameters("x".into())), EXIT_USAGE);
        assert_eq!(exit_code_for(&Error::Solver("x".into())), EXIT_MISMATCH);
    }
}
