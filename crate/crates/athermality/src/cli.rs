//! Command-line front end.
//!
//! Four subcommands: `compute` (single quantities from JSON files),
//! `verify` (the randomized axiom suite), `feasible` (Gibbs-preserving
//! transition existence) and `demo` (step-by-step canned instances).
//!
//! Exit codes: `0` success (an infinite divergence is a value, not a
//! failure), `1` verification failure, `2` malformed input or
//! configuration, `3` infeasible transition, `4` solver budget exhausted.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::divergences::{
    mutual_information, relative_entropy, renyi_divergence, DivergenceFamily, DivergenceSpec,
    ExtendedReal,
};
use crate::error::{Error, Result};
use crate::feasibility::{decide_feasibility, ProblemJson, ReportJson, Verdict};
use crate::harness::{las_finite_n_demo, run_suite, HarnessConfig, SuiteOutcome};
use crate::linalg::json::MatrixJson;
use crate::linalg::ops::{CMatrix, C64};
use crate::linalg::{DensityMatrix, HermitianOperator, RngStream};
use crate::thermo::{
    athermality, check_transition, construct_cc_swap, construct_mc_swap, gibbs_state,
    modular_hamiltonian, ObjectJson, TransitionInstance, TransitionJson,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_NOT_FOUND: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "athermality",
    version,
    about = "Relative-entropy axioms, Gibbs-preserving maps and catalytic transitions at desk scale"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Master seed for anything randomized.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance override for the verification checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the primary JSON output to this path instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Write a plot-ready long-format CSV to this path.
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute one quantity from JSON input files.
    Compute {
        #[command(subcommand)]
        target: ComputeTarget,
    },
    /// Run the seeded verification suite and write its report.
    Verify(VerifyArgs),
    /// Decide existence of a Gibbs-preserving channel for a problem file.
    Feasible {
        /// Problem JSON: {"beta", "rho", "sigma", "h", "k", "options"?}.
        #[arg(long, value_name = "PATH")]
        problem: PathBuf,
        /// Record the residual at every solver iteration in the report.
        #[arg(long)]
        trace: bool,
    },
    /// Step-by-step demonstrations on small canned instances.
    Demo {
        #[command(subcommand)]
        target: DemoTarget,
    },
}

#[derive(Debug, Subcommand)]
enum ComputeTarget {
    /// Relative entropy S(rho || sigma) in nats.
    Relent {
        #[arg(long, value_name = "PATH")]
        rho: PathBuf,
        #[arg(long, value_name = "PATH")]
        sigma: PathBuf,
    },
    /// Renyi divergence of either family.
    Renyi {
        #[arg(long, value_name = "PATH")]
        rho: PathBuf,
        #[arg(long, value_name = "PATH")]
        sigma: PathBuf,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        alpha: f64,
    },
    /// Gibbs state of a Hamiltonian at inverse temperature beta.
    Gibbs {
        #[arg(long, value_name = "PATH")]
        hamiltonian: PathBuf,
        #[arg(long)]
        beta: f64,
    },
    /// Modular Hamiltonian of a full-rank state.
    Modular {
        #[arg(long, value_name = "PATH")]
        sigma: PathBuf,
        #[arg(long)]
        beta: f64,
        /// Additive gauge constant C.
        #[arg(long, default_value_t = 0.0)]
        shift: f64,
    },
    /// Athermality DeltaF of an object file.
    Deltaf {
        #[arg(long, value_name = "PATH")]
        object: PathBuf,
        /// Overrides the beta stored in the object file.
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Mutual information of a bipartite state.
    Mi {
        #[arg(long, value_name = "PATH")]
        rho: PathBuf,
        /// Factor dimensions, e.g. 2,3.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        dims: Vec<usize>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Petz,
    Sandwiched,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Trials per inequality check.
    #[arg(long)]
    trials: Option<usize>,
    /// Per-factor dimensions, e.g. 2,3.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Renyi orders for the family checks and the violation search.
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Eigenvalue floor for sampled reference states.
    #[arg(long)]
    sigma_min_eig: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum DemoTarget {
    /// Finite-n lower asymptotic semi-continuity chain.
    Las {
        /// Perturbation budget; the block-n state sits within noise/n of
        /// the product state.
        #[arg(long, default_value_t = 0.01)]
        noise: f64,
    },
    /// Marginal-catalytic swap transition.
    McSwap {
        #[arg(long, value_enum, default_value_t = DemoInput::Bell)]
        input: DemoInput,
    },
    /// Correlated-catalytic swap transition.
    CcSwap {
        #[arg(long, value_enum, default_value_t = DemoInput::Bell)]
        input: DemoInput,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DemoInput {
    /// Maximally entangled two-qubit state.
    Bell,
    /// Product of two random qubit states.
    Product,
    /// Random correlated two-qubit state.
    Random,
}

/// Entry point used by the binary: parses `std::env::args_os`.
pub fn main_entry() -> i32 {
    configure_threads();
    run(std::env::args_os())
}

/// Parses and executes; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_BAD_INPUT,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_BAD_INPUT
        }
    }
}

/// Caps the worker pool from `ATHERMALITY_THREADS` (0 or unset = automatic).
fn configure_threads() {
    if let Ok(raw) = std::env::var("ATHERMALITY_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Compute { ref target } => run_compute(target, &cli),
        Command::Verify(ref args) => run_verify(args, &cli),
        Command::Feasible { ref problem, trace } => run_feasible(problem, trace, &cli),
        Command::Demo { ref target } => run_demo(target, &cli),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn read_density(path: &Path) -> Result<DensityMatrix> {
    let j: MatrixJson = read_json(path)?;
    DensityMatrix::try_from(&j)
}

fn read_hermitian(path: &Path) -> Result<HermitianOperator> {
    let j: MatrixJson = read_json(path)?;
    HermitianOperator::try_from(&j)
}

fn emit<T: Serialize>(value: &T, out: &Option<PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_or_print(text, out)
}

/// Compact form for reports that can carry thousands of stored witnesses.
fn emit_compact<T: Serialize>(value: &T, out: &Option<PathBuf>) -> Result<()> {
    let text = serde_json::to_string(value)?;
    write_or_print(text, out)
}

fn write_or_print(text: String, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, text + "\n")?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn write_csv(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut file = fs::File::create(path)?;
    writeln!(file, "{header}")?;
    for row in rows {
        writeln!(file, "{row}")?;
    }
    Ok(())
}

fn scalar_json(value: ExtendedReal) -> serde_json::Value {
    json!({ "value": value })
}

fn run_compute(target: &ComputeTarget, cli: &Cli) -> Result<i32> {
    let output = match target {
        ComputeTarget::Relent { rho, sigma } => {
            let rho = read_density(rho)?;
            let sigma = read_density(sigma)?;
            if rho.dim() != sigma.dim() {
                return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
            }
            scalar_json(relative_entropy(&rho, &sigma))
        }
        ComputeTarget::Renyi {
            rho,
            sigma,
            family,
            alpha,
        } => {
            let spec = DivergenceSpec {
                family: match family {
                    FamilyArg::Petz => DivergenceFamily::RenyiPetz,
                    FamilyArg::Sandwiched => DivergenceFamily::RenyiSandwiched,
                },
                alpha: *alpha,
            };
            let rho = read_density(rho)?;
            let sigma = read_density(sigma)?;
            scalar_json(renyi_divergence(spec, &rho, &sigma)?)
        }
        ComputeTarget::Gibbs { hamiltonian, beta } => {
            let h = read_hermitian(hamiltonian)?;
            if *beta <= 0.0 {
                return Err(Error::InvalidConfig("beta must be positive".into()));
            }
            serde_json::to_value(MatrixJson::from(&gibbs_state(*beta, &h)))?
        }
        ComputeTarget::Modular { sigma, beta, shift } => {
            let sigma = read_density(sigma)?;
            if *beta <= 0.0 {
                return Err(Error::InvalidConfig("beta must be positive".into()));
            }
            serde_json::to_value(MatrixJson::from(&modular_hamiltonian(
                &sigma, *beta, *shift,
            )?))?
        }
        ComputeTarget::Deltaf { object, beta } => {
            let obj_json: ObjectJson = read_json(object)?;
            let beta = beta.unwrap_or(obj_json.beta);
            if beta <= 0.0 {
                return Err(Error::InvalidConfig("beta must be positive".into()));
            }
            let obj = obj_json.to_object()?;
            scalar_json(athermality(&obj, beta))
        }
        ComputeTarget::Mi { rho, dims } => {
            let rho = read_density(rho)?;
            let value = mutual_information(&rho, (dims[0], dims[1]))?;
            scalar_json(ExtendedReal::Finite(value))
        }
    };
    emit(&output, &cli.out)?;
    Ok(EXIT_OK)
}

fn run_verify(args: &VerifyArgs, cli: &Cli) -> Result<i32> {
    let mut config = HarnessConfig::default();
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    if let Some(tol) = cli.tol {
        config.tolerance = tol;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if let Some(ref dims) = args.dims {
        config.dims = dims.clone();
    }
    if let Some(ref alpha) = args.alpha {
        config.alpha_grid = alpha.clone();
    }
    if let Some(floor) = args.sigma_min_eig {
        config.sigma_min_eig = floor;
    }
    config.validate()?;

    let SuiteOutcome { report, rows } = run_suite(&config)?;
    for check in &report.checks {
        eprintln!(
            "{} {} (max violation {:+.3e}, {} witnesses)",
            if check.passed { "pass" } else { "FAIL" },
            check.check_name,
            check.max_violation,
            check.witnesses.len()
        );
    }
    emit_compact(&report, &cli.out)?;

    if let Some(csv) = &cli.csv {
        write_csv(
            csv,
            "check_name,trial,violation",
            rows.iter()
                .map(|r| format!("{},{},{:e}", r.check_name, r.trial, r.violation)),
        )?;
    }

    // best witness per search cell, replayable standalone
    if let Some(out) = &cli.out {
        let dir = witness_dir(out);
        let mut wrote_any = false;
        for check in &report.checks {
            if check.check_name.starts_with("superadditivity_search:")
                && !check.check_name.ends_with("renyi_petz")
                && !check.check_name.ends_with("renyi_sandwiched")
            {
                if let Some(best) = check
                    .witnesses
                    .iter()
                    .max_by(|a, b| a.gap.total_cmp(&b.gap))
                {
                    if !wrote_any {
                        fs::create_dir_all(&dir)?;
                        wrote_any = true;
                    }
                    let name = sanitize(&check.check_name);
                    let path = dir.join(format!("{name}.json"));
                    fs::write(path, serde_json::to_string_pretty(best)?)?;
                }
            }
        }
    }

    Ok(if report.passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn witness_dir(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    out.with_file_name(format!("{stem}-witnesses"))
}

fn sanitize(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for c in name.chars() {
        if c.is_ascii_alphanumeric() || c == '.' {
            out.push(c);
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

fn run_feasible(problem: &Path, trace: bool, cli: &Cli) -> Result<i32> {
    let problem_json: ProblemJson = read_json(problem)?;
    let p = problem_json.to_problem()?;
    let report = if trace && !p.is_commuting() {
        let gap = crate::feasibility::monotone_screen(&p);
        if gap > crate::tol::MONOTONE_GAP_TOL {
            decide_feasibility(&p)?
        } else {
            crate::feasibility::solve_choi_with_trace(&p, true)?
        }
    } else {
        decide_feasibility(&p)?
    };
    emit(&ReportJson::from(&report), &cli.out)?;
    if let Some(csv) = &cli.csv {
        if let Some(trace) = &report.residual_trace {
            write_csv(
                csv,
                "iteration,residual",
                trace
                    .iter()
                    .enumerate()
                    .map(|(i, r)| format!("{},{:e}", i + 1, r)),
            )?;
        }
    }
    Ok(match report.verdict {
        Verdict::Feasible => EXIT_OK,
        Verdict::InfeasibleByMonotone | Verdict::InfeasibleByLp => EXIT_INFEASIBLE,
        Verdict::NotFoundWithinBudget => EXIT_NOT_FOUND,
    })
}

fn bell_state() -> DensityMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for &i in &[0usize, 3] {
        for &j in &[0usize, 3] {
            m[(i, j)] = C64::new(0.5, 0.0);
        }
    }
    DensityMatrix::new(m).expect("Bell projector is a state")
}

fn demo_input_state(input: DemoInput, seed: u64) -> DensityMatrix {
    match input {
        DemoInput::Bell => bell_state(),
        DemoInput::Product => {
            let mut rng = RngStream::new(seed, 1).rng();
            let a = crate::linalg::random_density(2, 2, &mut rng);
            let b = crate::linalg::random_density(2, 2, &mut rng);
            a.tensor(&b)
        }
        DemoInput::Random => {
            let mut rng = RngStream::new(seed, 2).rng();
            crate::linalg::random_density(4, 4, &mut rng)
        }
    }
}

#[derive(Serialize)]
struct SwapDemoReport {
    mode: &'static str,
    beta: f64,
    athermality_source: f64,
    athermality_target: f64,
    athermality_gap: f64,
    mutual_information_over_beta: f64,
    transition: crate::thermo::TransitionReport,
    catalyst_marginal_distances: Vec<f64>,
    instance: TransitionJson,
}

fn swap_demo(
    construct: impl Fn(
        &DensityMatrix,
        &HermitianOperator,
        &HermitianOperator,
        f64,
    ) -> Result<TransitionInstance>,
    mode: &'static str,
    input: DemoInput,
    seed: u64,
) -> Result<SwapDemoReport> {
    let beta = 1.0;
    let h = HermitianOperator::from_diagonal(&[0.0, 1.0]);
    let rho12 = demo_input_state(input, seed);
    let instance = construct(&rho12, &h, &h, beta)?;
    let transition = check_transition(&instance, crate::tol::GP_TOL)?;
    let df_src = athermality(&instance.source, beta).expect_finite("source");
    let df_tgt = athermality(&instance.target, beta).expect_finite("target");
    let mi = mutual_information(&rho12, (2, 2))?;

    // how far each catalyst subsystem moved, from the joint output marginals
    let joint = instance
        .joint_output
        .as_ref()
        .expect("constructions fill the joint output");
    let mut dims = vec![instance.target.dim()];
    dims.extend(instance.catalysts.iter().map(|c| c.dim()));
    let mut catalyst_marginal_distances = Vec::new();
    for (i, cat) in instance.catalysts.iter().enumerate() {
        let marginal = joint.partial_trace(&dims, &[i + 1])?;
        catalyst_marginal_distances.push(crate::linalg::state_distance(&marginal, &cat.state));
    }

    Ok(SwapDemoReport {
        mode,
        beta,
        athermality_source: df_src,
        athermality_target: df_tgt,
        athermality_gap: df_src - df_tgt,
        mutual_information_over_beta: mi / beta,
        transition,
        catalyst_marginal_distances,
        instance: TransitionJson::from(&instance),
    })
}

fn run_demo(target: &DemoTarget, cli: &Cli) -> Result<i32> {
    let seed = cli.seed.unwrap_or(7);
    match target {
        DemoTarget::Las { noise } => {
            let rho = DensityMatrix::from_probabilities(&[0.75, 0.25])?;
            let sigma = DensityMatrix::maximally_mixed(2);
            let mut rng = RngStream::new(seed, 0).rng();
            let report = las_finite_n_demo(&rho, &sigma, 3, *noise, &mut rng)?;
            emit(&report, &cli.out)?;
            if let Some(csv) = &cli.csv {
                write_csv(
                    csv,
                    "n,d_n,bound,max_marginal_distance",
                    report.rows.iter().map(|r| {
                        format!(
                            "{},{:e},{:e},{:e}",
                            r.n, r.d_n, r.bound, r.max_marginal_distance
                        )
                    }),
                )?;
            }
            Ok(EXIT_OK)
        }
        DemoTarget::McSwap { input } => {
            let report = swap_demo(construct_mc_swap, "marginal-catalytic", *input, seed)?;
            emit(&report, &cli.out)?;
            demo_csv(cli, &report)?;
            Ok(EXIT_OK)
        }
        DemoTarget::CcSwap { input } => {
            let report = swap_demo(construct_cc_swap, "correlated-catalytic", *input, seed)?;
            emit(&report, &cli.out)?;
            demo_csv(cli, &report)?;
            Ok(EXIT_OK)
        }
    }
}

fn demo_csv(cli: &Cli, report: &SwapDemoReport) -> Result<()> {
    if let Some(csv) = &cli.csv {
        let mut rows = vec![
            format!("athermality_source,{:e}", report.athermality_source),
            format!("athermality_target,{:e}", report.athermality_target),
            format!("athermality_gap,{:e}", report.athermality_gap),
            format!(
                "mutual_information_over_beta,{:e}",
                report.mutual_information_over_beta
            ),
            format!(
                "witness_gp_residual,{:e}",
                report.transition.witness_gp_residual
            ),
        ];
        for (name, value) in &report.transition.residuals {
            rows.push(format!("residual_{name},{value:e}"));
        }
        write_csv(csv, "quantity,value", rows.into_iter())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_and_version_exit_zero() {
        assert_eq!(run(["athermality", "--help"]), EXIT_OK);
        assert_eq!(run(["athermality", "--version"]), EXIT_OK);
    }

    #[test]
    fn unknown_flags_are_errors() {
        assert_eq!(run(["athermality", "verify", "--bogus"]), EXIT_BAD_INPUT);
        assert_eq!(run(["athermality", "nonsense"]), EXIT_BAD_INPUT);
    }

    #[test]
    fn demo_bad_subtarget_exits_two() {
        assert_eq!(run(["athermality", "demo", "warp"]), EXIT_BAD_INPUT);
    }

    #[test]
    fn verify_rejects_zero_trials() {
        assert_eq!(
            run(["athermality", "verify", "--trials", "0"]),
            EXIT_BAD_INPUT
        );
    }

    #[test]
    fn missing_input_file_exits_two() {
        assert_eq!(
            run([
                "athermality",
                "compute",
                "relent",
                "--rho",
                "/nonexistent/rho.json",
                "--sigma",
                "/nonexistent/sigma.json"
            ]),
            EXIT_BAD_INPUT
        );
    }
}
