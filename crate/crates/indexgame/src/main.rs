//! Command-line front end for the scenario runner.
//!
//! Exit codes: 0 success, 2 config error, 3 solver error, 4 verification
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use indexgame::config::{Preset, RunConfig, RunRegime, SolutionMethod, SCHEMA_VERSION};
use indexgame::error::Error;
use indexgame::market::{LambdaScaling, ScenarioParams};
use indexgame::runner;

#[derive(Parser)]
#[command(
    name = "indexgame",
    version,
    about = "Execution-timing games around index reconstitution events"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solo manager: optimal schedule against an empty market.
    NoTrader(SweepArgs),
    /// Heuristic linear schedules for both participants.
    Linear(SweepArgs),
    /// Simultaneous equilibrium schedules.
    Nash(SweepArgs),
    /// Leader-follower schedules (trader commits first).
    Stackelberg(SweepArgs),
    /// Representative announcement-to-event price path.
    PricePath(PriceArgs),
    /// Run the numerical verification bundle over a sweep.
    Verify(SweepArgs),
    /// Run a sweep described entirely by a config file.
    Sweep(SweepFileArgs),
}

#[derive(Args, Clone)]
struct SweepArgs {
    /// Config file; inline flags are rejected when present.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Penalty weight values (repeatable).
    #[arg(long = "lambda")]
    lambdas: Vec<f64>,
    /// Manager demand in shares (repeatable).
    #[arg(long = "demand")]
    demands: Vec<f64>,
    /// Trader participation rate, T = f * D (repeatable; games only).
    #[arg(long = "participation")]
    participations: Vec<f64>,
    /// Manager early fraction (repeatable; linear only).
    #[arg(long = "manager-fraction")]
    manager_fractions: Vec<f64>,
    /// Manager start day (repeatable; linear only).
    #[arg(long = "start-day")]
    start_days: Vec<f64>,
    /// Leader front-loading constant in days (repeatable; stackelberg only).
    #[arg(long = "tau")]
    taus: Vec<f64>,
    /// Trader inventory in shares (repeatable; linear only).
    #[arg(long = "trader-shares")]
    trader_shares: Vec<f64>,
    /// Grid size (odd).
    #[arg(long, default_value_t = 2001)]
    grid: usize,
    #[arg(long, value_enum, default_value_t = Preset::Core)]
    preset: Preset,
    /// Horizon in days.
    #[arg(long, default_value_t = 10.0)]
    horizon: f64,
    /// Fund AUM in USD (drag reporting).
    #[arg(long, default_value_t = 5e10)]
    aum: f64,
    /// Scale lambda by the benchmark cost (default) or use it raw.
    #[arg(long, default_value = "benchmark-cost")]
    lambda_scaling: String,
    /// Run the verification bundle on every scenario.
    #[arg(long)]
    verify: bool,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct PriceArgs {
    /// Manager demand in shares.
    #[arg(long, default_value_t = 5e6)]
    demand: f64,
    /// Trader participation rate.
    #[arg(long, default_value_t = 0.9)]
    participation: f64,
    /// Horizon in days.
    #[arg(long, default_value_t = 5.0)]
    horizon: f64,
    /// Permanent impact override.
    #[arg(long, default_value_t = 3e-7)]
    gamma: f64,
    /// Temporary impact override.
    #[arg(long, default_value_t = 1e-6)]
    eta: f64,
    #[arg(long, value_enum, default_value_t = Preset::Core)]
    preset: Preset,
    #[arg(long, default_value_t = 501)]
    grid: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepFileArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn parse_scaling(text: &str) -> Result<LambdaScaling, Error> {
    match text {
        "benchmark-cost" => Ok(LambdaScaling::BenchmarkCost),
        "raw" => Ok(LambdaScaling::Raw),
        other => Err(Error::Config(format!(
            "lambda_scaling must be benchmark-cost or raw, got {other}"
        ))),
    }
}

fn build_config(regime: RunRegime, args: &SweepArgs) -> Result<RunConfig, Error> {
    if let Some(path) = &args.config {
        let inline_given = !(args.lambdas.is_empty()
            && args.demands.is_empty()
            && args.participations.is_empty()
            && args.manager_fractions.is_empty()
            && args.start_days.is_empty()
            && args.taus.is_empty()
            && args.trader_shares.is_empty());
        if inline_given {
            return Err(Error::Config(
                "pass either --config or inline sweep flags, not both".into(),
            ));
        }
        let cfg = RunConfig::from_file(path)?;
        if cfg.regime != regime {
            return Err(Error::Config(format!(
                "config regime {} does not match the subcommand",
                cfg.regime.name()
            )));
        }
        return Ok(cfg);
    }
    let cfg = RunConfig {
        schema_version: SCHEMA_VERSION,
        notes: None,
        preset: args.preset,
        impact: None,
        regime,
        horizon_days: args.horizon,
        lambdas: args.lambdas.clone(),
        demands: args.demands.clone(),
        trader_participations: args.participations.clone(),
        manager_fractions: args.manager_fractions.clone(),
        start_days: args.start_days.clone(),
        taus: args.taus.clone(),
        trader_shares: args.trader_shares.clone(),
        aum: args.aum,
        grid_size: args.grid,
        lambda_scaling: parse_scaling(&args.lambda_scaling)?,
        method: SolutionMethod::Analytic,
        verify: args.verify,
        write_paths: true,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn exit_for(summary: &runner::RunSummary) -> ExitCode {
    if summary.verification_failures > 0 {
        ExitCode::from(4)
    } else if summary.solver_errors > 0 {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}

fn run_sweep(regime: RunRegime, args: &SweepArgs) -> Result<ExitCode, Error> {
    let cfg = build_config(regime, args)?;
    let summary = runner::run(&cfg, &args.out)?;
    println!(
        "wrote {} rows to {} ({} solver errors, {} verification failures)",
        summary.rows.len(),
        summary.out_dir.join("results.csv").display(),
        summary.solver_errors,
        summary.verification_failures
    );
    Ok(exit_for(&summary))
}

/// `verify` runs every regime the bundle covers over the shared sweep lists.
fn run_verify(args: &SweepArgs) -> Result<ExitCode, Error> {
    let mut worst = ExitCode::SUCCESS;
    let regimes: &[RunRegime] = if args.participations.is_empty() {
        &[RunRegime::NoTrader]
    } else {
        &[RunRegime::NoTrader, RunRegime::Nash, RunRegime::Stackelberg]
    };
    for &regime in regimes {
        let mut sub = args.clone();
        sub.verify = true;
        sub.out = args.out.join(regime.name());
        if regime == RunRegime::NoTrader {
            sub.participations.clear();
            sub.taus.clear();
        }
        if regime == RunRegime::Stackelberg && sub.taus.is_empty() {
            sub.taus = vec![1.0];
        }
        if regime == RunRegime::Nash {
            sub.taus.clear();
        }
        let code = run_sweep(regime, &sub)?;
        if code != ExitCode::SUCCESS {
            worst = code;
        }
    }
    Ok(worst)
}

fn run_price_path(args: &PriceArgs) -> Result<ExitCode, Error> {
    let mut params = args.preset.params();
    params.gamma = args.gamma;
    params.eta = args.eta;
    let scen = ScenarioParams::new(args.demand, args.horizon).with_participation(args.participation);
    let summary = runner::run_price_path(&params, &scen, args.grid, &args.out)?;
    println!(
        "price path written to {}; final mid return {:.2}%, final execution return {:.2}% \
         (permanent {:.2}%, temporary {:.2}%, spread {:.2}%)",
        args.out.join("price_path.csv").display(),
        100.0 * summary.final_mid_return,
        100.0 * summary.final_exec_return,
        100.0 * summary.permanent_component,
        100.0 * summary.temporary_component,
        100.0 * summary.spread_component,
    );
    Ok(ExitCode::SUCCESS)
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.cmd {
        Cmd::NoTrader(args) => run_sweep(RunRegime::NoTrader, &args),
        Cmd::Linear(args) => run_sweep(RunRegime::Linear, &args),
        Cmd::Nash(args) => run_sweep(RunRegime::Nash, &args),
        Cmd::Stackelberg(args) => run_sweep(RunRegime::Stackelberg, &args),
        Cmd::PricePath(args) => run_price_path(&args),
        Cmd::Verify(args) => run_verify(&args),
        Cmd::Sweep(args) => {
            let cfg = RunConfig::from_file(&args.config)?;
            let summary = runner::run(&cfg, &args.out)?;
            println!(
                "wrote {} rows to {} ({} solver errors, {} verification failures)",
                summary.rows.len(),
                summary.out_dir.join("results.csv").display(),
                summary.solver_errors,
                summary.verification_failures
            );
            Ok(exit_for(&summary))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e @ (Error::Config(_) | Error::Json(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
