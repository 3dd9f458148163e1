//! Command-line front end for the reward-scheme solvers.
//!
//! Subcommands map one-to-one onto the library: `solve-airs` for the
//! optimal step scheme, `solve-linear` and `solve-prop` for the
//! comparison schemes, `compare` for all of them side by side, `verify`
//! to re-derive every optimality certificate on an instance, and
//! `reduce-subset-sum` for the hardness encoding. Exit codes: 0 success,
//! 1 invalid input, 2 solver non-convergence, 3 failed verification.
//! Logging is controlled by the `AIRS_LOG` environment variable.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use airs_core::hardness::{brute_force_general_cost, reduce_subset_sum, subset_sum_exact, ReductionCheck};
use airs_core::model::{HFamily, HSpec, Instance, InstanceSpec};
use airs_core::oracles::{brute_force_p2, GridSpec};
use airs_core::report::{
    compare_csv, scheme_csv, to_json, AirsReport, CheckReport, CompareReport, DeviationCheck,
    LinearReport, PropReport, ReductionReport, VerifyReport,
};
use airs_core::schemes::{
    best_response, evaluate_scheme, prop_equilibrium_numeric, solve_linear, PropError,
};
use airs_core::solver::{
    actions_for_lambda, compute_segments, gamma_chain, solve_airs, total_spend, AirsSolution,
    SolveOptions, SolverError,
};

#[derive(Parser)]
#[command(name = "airs", version, about = "Budget-optimal anonymous reward schemes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the budget-optimal step reward scheme for an instance
    SolveAirs(SolveArgs),
    /// Compute the best linear (price per unit) scheme for an instance
    SolveLinear(SolveArgs),
    /// Compute the proportional-splitting equilibrium among the instance's agents
    SolveProp(SolveArgs),
    /// Solve every scheme and report gross-output ratios
    Compare(CompareArgs),
    /// Re-derive and test every optimality certificate for an instance
    Verify(SolveArgs),
    /// Encode a subset-sum question as reward design and decide both sides
    ReduceSubsetSum(ReduceArgs),
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance description (JSON)
    #[arg(long)]
    input: PathBuf,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Relative budget tolerance, strictly between 0 and 1
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    /// Iteration cap for bisection or best-response rounds
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// Report format; csv is available for solve-airs and compare
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    solve: SolveArgs,
    /// Seed for the randomized deviation search in the report
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ReduceArgs {
    /// Subset weights, comma separated (e.g. 3,34,4,12,5,2)
    #[arg(long, value_delimiter = ',', required = true)]
    weights: Vec<u64>,
    /// Target sum
    #[arg(long)]
    target: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    Invalid(String),
    NoConvergence(String),
    ChecksFailed,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::NoConvergence(_) => 2,
            Failure::ChecksFailed => 3,
        }
    }

    fn message(&self) -> Option<&str> {
        match self {
            Failure::Invalid(m) | Failure::NoConvergence(m) => Some(m),
            Failure::ChecksFailed => Some("verification failed; see the report"),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("AIRS_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if let Some(msg) = f.message() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::SolveAirs(args) => cmd_solve_airs(args),
        Cmd::SolveLinear(args) => cmd_solve_linear(args),
        Cmd::SolveProp(args) => cmd_solve_prop(args),
        Cmd::Compare(args) => cmd_compare(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::ReduceSubsetSum(args) => cmd_reduce(args),
    }
}

fn load_spec(path: &PathBuf) -> Result<InstanceSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Invalid(format!("cannot read {}: {}", path.display(), e)))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Invalid(format!("cannot parse {}: {}", path.display(), e)))
}

fn build_instance(spec: &InstanceSpec) -> Result<Instance, Failure> {
    let inst = Instance::from_spec(spec).map_err(|e| Failure::Invalid(e.to_string()))?;
    log::info!("loaded instance: {} types, budget {}", inst.m(), inst.budget());
    Ok(inst)
}

fn solve_options(tolerance: f64, max_iter: usize) -> Result<SolveOptions, Failure> {
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(Failure::Invalid(format!(
            "tolerance must lie strictly between 0 and 1, got {tolerance}"
        )));
    }
    if max_iter == 0 {
        return Err(Failure::Invalid("max-iter must be at least 1".into()));
    }
    Ok(SolveOptions { epsilon: tolerance, max_iter })
}

fn map_solver(e: SolverError) -> Failure {
    match e {
        SolverError::NoConvergence { .. } => Failure::NoConvergence(e.to_string()),
        _ => Failure::Invalid(e.to_string()),
    }
}

fn map_prop(e: PropError) -> Failure {
    match e {
        PropError::NotConverged { .. } => Failure::NoConvergence(e.to_string()),
        _ => Failure::Invalid(e.to_string()),
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Invalid(format!("cannot write {}: {}", path.display(), e))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_solve_airs(args: SolveArgs) -> Result<(), Failure> {
    let spec = load_spec(&args.input)?;
    let inst = build_instance(&spec)?;
    let opts = solve_options(args.tolerance, args.max_iter)?;
    let sol = solve_airs(&inst, &opts).map_err(map_solver)?;
    log::info!("solved in {} iterations, gross {}", sol.iterations, sol.gross);
    let text = match args.format {
        Format::Json => to_json(&AirsReport::new(&sol)),
        Format::Csv => scheme_csv(&sol.scheme),
    };
    emit(&args.output, &text)
}

fn cmd_solve_linear(args: SolveArgs) -> Result<(), Failure> {
    if args.format == Format::Csv {
        return Err(Failure::Invalid(
            "csv output is only available for solve-airs and compare".into(),
        ));
    }
    let spec = load_spec(&args.input)?;
    let inst = build_instance(&spec)?;
    let opts = solve_options(args.tolerance, args.max_iter)?;
    let sol = solve_linear(&inst, &opts).map_err(map_solver)?;
    emit(&args.output, &to_json(&LinearReport::new(&sol)))
}

/// Per-agent ability weights: reciprocal instances derive them from the
/// agent's type, explicit tables require the agent's type to appear in
/// the instance's type list.
fn agent_abilities(spec: &InstanceSpec, agents: &[f64]) -> Result<Vec<f64>, Failure> {
    match &spec.h {
        HSpec::Family { family: HFamily::Reciprocal } => agents
            .iter()
            .map(|t| {
                if *t > 0.0 && t.is_finite() {
                    Ok(1.0 / t)
                } else {
                    Err(Failure::Invalid(format!("agent type {t} must be positive")))
                }
            })
            .collect(),
        HSpec::Values(values) => agents
            .iter()
            .map(|t| {
                spec.types
                    .iter()
                    .position(|ty| ty == t)
                    .map(|i| values[i])
                    .ok_or_else(|| {
                        Failure::Invalid(format!(
                            "agent type {t} does not match any instance type"
                        ))
                    })
            })
            .collect(),
    }
}

fn cmd_solve_prop(args: SolveArgs) -> Result<(), Failure> {
    if args.format == Format::Csv {
        return Err(Failure::Invalid(
            "csv output is only available for solve-airs and compare".into(),
        ));
    }
    let spec = load_spec(&args.input)?;
    let inst = build_instance(&spec)?;
    let agents = spec.agents.clone().ok_or_else(|| {
        Failure::Invalid("solve-prop needs an `agents` array (one type value per agent)".into())
    })?;
    let h = agent_abilities(&spec, &agents)?;
    let opts = solve_options(args.tolerance, args.max_iter)?;
    let eq = prop_equilibrium_numeric(
        &agents,
        &h,
        inst.cost(),
        inst.budget(),
        opts.epsilon,
        opts.max_iter.max(500),
    )
    .map_err(map_prop)?;
    emit(&args.output, &to_json(&PropReport::new(&eq)))
}

/// Random search for profitable deviations from the assigned actions under
/// both computed schemes. At an optimum the best gain is rounding noise.
fn deviation_check(
    inst: &Instance,
    airs: &AirsSolution,
    price: f64,
    linear_actions: &[f64],
    seed: u64,
) -> DeviationCheck {
    const SAMPLES: usize = 256;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = airs
        .actions
        .iter()
        .chain(linear_actions)
        .cloned()
        .fold(0.0, f64::max);
    let span = 2.0 * top + 1.0;
    let cost = inst.cost();
    let mut max_gain = f64::NEG_INFINITY;
    for (k, h) in inst.h().iter().enumerate() {
        let planned_step =
            airs.scheme.reward_at(airs.actions[k]) - cost.eval(airs.actions[k]) * h;
        let planned_price = price * linear_actions[k] - cost.eval(linear_actions[k]) * h;
        for _ in 0..SAMPLES {
            let x = rng.random_range(0.0..span);
            let step_gain = airs.scheme.reward_at(x) - cost.eval(x) * h - planned_step;
            let price_gain = price * x - cost.eval(x) * h - planned_price;
            max_gain = max_gain.max(step_gain).max(price_gain);
        }
    }
    DeviationCheck::new(seed, SAMPLES, max_gain)
}

fn cmd_compare(args: CompareArgs) -> Result<(), Failure> {
    let spec = load_spec(&args.solve.input)?;
    let inst = build_instance(&spec)?;
    let opts = solve_options(args.solve.tolerance, args.solve.max_iter)?;
    let airs = solve_airs(&inst, &opts).map_err(map_solver)?;
    let linear = solve_linear(&inst, &opts).map_err(map_solver)?;
    let prop = match &spec.agents {
        Some(agents) => {
            let h = agent_abilities(&spec, agents)?;
            Some(
                prop_equilibrium_numeric(
                    agents,
                    &h,
                    inst.cost(),
                    inst.budget(),
                    opts.epsilon,
                    opts.max_iter.max(500),
                )
                .map_err(map_prop)?,
            )
        }
        None => None,
    };
    let text = match args.solve.format {
        Format::Json => {
            let mut report = CompareReport::new(&airs, &linear, prop.as_ref());
            report.deviation_check =
                Some(deviation_check(&inst, &airs, linear.price, &linear.actions, args.seed));
            to_json(&report)
        }
        Format::Csv => compare_csv(&airs, &linear, prop.as_ref()),
    };
    emit(&args.solve.output, &text)
}

fn cmd_verify(args: SolveArgs) -> Result<(), Failure> {
    if args.format == Format::Csv {
        return Err(Failure::Invalid(
            "csv output is only available for solve-airs and compare".into(),
        ));
    }
    let spec = load_spec(&args.input)?;
    let inst = build_instance(&spec)?;
    let opts = solve_options(args.tolerance, args.max_iter)?;
    let sol = solve_airs(&inst, &opts).map_err(map_solver)?;

    let mut checks: Vec<CheckReport> = Vec::new();
    let mut check = |name: &str, passed: bool, detail: String| {
        checks.push(CheckReport { name: name.to_string(), passed, detail });
    };

    let b = inst.budget();
    check(
        "budget_binding",
        (sol.spend - b).abs() <= opts.epsilon * b,
        format!("spend {} against budget {}", sol.spend, b),
    );

    let monotone = sol.actions.windows(2).all(|w| w[0] <= w[1] * (1.0 + 1e-12) + 1e-300);
    check("actions_monotone", monotone, format!("actions {:?}", sol.actions));

    let prefix_ok = sol
        .actions
        .iter()
        .enumerate()
        .all(|(k, x)| if k + 1 < sol.q { *x == 0.0 } else { *x > 0.0 });
    check("inactive_prefix", prefix_ok, format!("q = {}", sol.q));

    check(
        "kkt_residuals",
        sol.kkt.max_violation() <= 1e-6,
        format!("max violation {}", sol.kkt.max_violation()),
    );

    let alphas = inst.alphas();
    let seg = compute_segments(inst.weights(), &alphas);
    let chain = gamma_chain(inst.weights(), &alphas);
    check(
        "segments_match_gamma_chain",
        seg.boundaries == chain,
        format!("stack {:?} vs chain {:?}", seg.boundaries, chain),
    );

    let avgs_ok = seg.segment_avgs.windows(2).all(|w| w[0] <= w[1] + 1e-12);
    check("segment_averages_monotone", avgs_ok, format!("averages {:?}", seg.segment_avgs));

    let out = evaluate_scheme(&inst, &sol.scheme);
    check(
        "scheme_spend_identity",
        (out.spend - sol.spend).abs() <= 1e-7 * (1.0 + b),
        format!("scheme pays {} vs solver spend {}", out.spend, sol.spend),
    );

    let mut worst_regret = 0.0f64;
    for (k, planned) in sol.actions.iter().enumerate() {
        let br = best_response(&sol.scheme, inst.h()[k], inst.cost());
        let own = sol.scheme.reward_at(*planned) - inst.cost().eval(*planned) * inst.h()[k];
        worst_regret = worst_regret.max(br.utility - own);
    }
    check(
        "best_response_fixed_point",
        worst_regret <= 1e-7 * (1.0 + b),
        format!("worst regret {}", worst_regret),
    );

    if inst.m() <= 3 {
        let base = GridSpec::default_for(&inst, 1e-3);
        let cap = if inst.m() == 3 { 14_000.0 } else { 1_000_000.0 };
        let grid = GridSpec { x_max: base.x_max, step: (base.x_max / cap).max(1e-3) };
        match brute_force_p2(&inst, &grid) {
            Ok(bf) => {
                let band = inst.total_weight() * grid.step + 1e-9 * (1.0 + sol.gross);
                check(
                    "grid_oracle_band",
                    (sol.gross - bf.gross).abs() <= band,
                    format!("solver {} vs grid {} (band {})", sol.gross, bf.gross, band),
                );
            }
            Err(e) => check("grid_oracle_band", false, e.to_string()),
        }
    }

    let mut spends = Vec::new();
    for mult in [0.5, 1.0, 2.0, 4.0] {
        let x = actions_for_lambda(&inst, &seg, sol.lambda * mult)
            .map_err(|e| Failure::Invalid(e.to_string()))?;
        spends.push(total_spend(&alphas, inst.cost(), &x));
    }
    let spend_monotone = spends.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-300);
    check("spend_monotone_in_lambda", spend_monotone, format!("spends {:?}", spends));

    let passed = checks.iter().all(|c| c.passed);
    let report = VerifyReport { passed, checks };
    emit(&args.output, &to_json(&report))?;
    if passed {
        Ok(())
    } else {
        Err(Failure::ChecksFailed)
    }
}

fn cmd_reduce(args: ReduceArgs) -> Result<(), Failure> {
    let inst = reduce_subset_sum(&args.weights, args.target);
    let answer = brute_force_general_cost(&inst).map_err(|e| Failure::Invalid(e.to_string()))?;
    let checkres = ReductionCheck {
        subset_sum: subset_sum_exact(&args.weights, args.target),
        general_cost: answer.achievable,
    };
    let report = ReductionReport::new(&inst, &checkres, &answer);
    emit(&args.output, &to_json(&report))
}
