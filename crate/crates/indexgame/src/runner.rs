//! Scenario sweeps: enumerate the configured cross-product, solve and
//! evaluate each cell, optionally verify, and write deterministic CSV/JSON
//! outputs. Also home of the announcement-to-event price-path emitter.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{RunConfig, RunRegime, SolutionMethod};
use crate::error::{Error, Result};
use crate::market::{
    self, benchmark_cost, residual_day_benchmark_cost, CostLeg, ImpactParams, InventoryPath,
    ScenarioParams,
};
use crate::nash::{self, evaluate_game, GameEvaluation};
use crate::stackelberg;
use crate::strategies;
use crate::tables::{fmt_f64, write_rows_csv, ScenarioRow};
use crate::verify::{self, Regime, Role};

/// One cell of the sweep cross-product.
#[derive(Debug, Clone, Copy)]
pub struct ScenarioCell {
    pub index: usize,
    pub scen: ScenarioParams,
}

/// Deterministic enumeration of the configured cross-product. Loop order is
/// fixed (lambda, demand, participation/fraction, start day, tau, shares) so
/// scenario indices are stable across runs.
pub fn enumerate_scenarios(config: &RunConfig) -> Vec<ScenarioCell> {
    let one = [f64::NAN];
    let (participations, fractions, start_days, taus, shares): (
        &[f64],
        &[f64],
        &[f64],
        &[f64],
        &[f64],
    ) = match config.regime {
        RunRegime::NoTrader => (&one, &one, &one, &one, &one),
        RunRegime::Linear => (
            &one,
            &config.manager_fractions,
            &config.start_days,
            &one,
            if config.trader_shares.is_empty() {
                &[0.0]
            } else {
                &config.trader_shares
            },
        ),
        RunRegime::Nash => (&config.trader_participations, &one, &one, &one, &one),
        RunRegime::Stackelberg => (
            &config.trader_participations,
            &one,
            &one,
            &config.taus,
            &one,
        ),
    };
    let mut cells = Vec::new();
    let mut index = 0;
    for &lambda in &config.lambdas {
        for &demand in &config.demands {
            for &participation in participations {
                for &fraction in fractions {
                    for &start in start_days {
                        for &tau in taus {
                            for &t_shares in shares {
                                let mut scen = ScenarioParams::new(demand, config.horizon_days);
                                scen.lambda = lambda;
                                scen.aum = config.aum;
                                match config.regime {
                                    RunRegime::NoTrader => {}
                                    RunRegime::Linear => {
                                        scen.fraction = fraction;
                                        scen.d_start = start;
                                        scen.t_shares = t_shares;
                                    }
                                    RunRegime::Nash | RunRegime::Stackelberg => {
                                        scen = scen.with_participation(participation);
                                        if !tau.is_nan() {
                                            scen.tau = tau;
                                        }
                                    }
                                }
                                cells.push(ScenarioCell { index, scen });
                                index += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    cells
}

fn blank_row(config: &RunConfig, cell: &ScenarioCell, params: &ImpactParams) -> ScenarioRow {
    let s = &cell.scen;
    ScenarioRow {
        scenario: cell.index,
        regime: config.regime.name().to_string(),
        lambda: s.lambda,
        lambda_eff: config.lambda_scaling.lambda_eff(params, s),
        demand_shares: s.d_shares,
        trader_shares: s.t_shares,
        participation: if matches!(config.regime, RunRegime::Nash | RunRegime::Stackelberg) {
            s.fraction
        } else {
            0.0
        },
        manager_fraction: if config.regime == RunRegime::Linear {
            s.fraction
        } else {
            0.0
        },
        start_day: if config.regime == RunRegime::Linear {
            s.d_start
        } else {
            0.0
        },
        tau: if config.regime == RunRegime::Stackelberg {
            s.tau
        } else {
            0.0
        },
        grid: config.grid_size,
        benchmark_usd: benchmark_cost(params, s),
        residual_benchmark_usd: residual_day_benchmark_cost(params, s),
        cost_usd: 0.0,
        savings_usd: 0.0,
        savings_bps: 0.0,
        residual_savings_usd: 0.0,
        residual_savings_bps: 0.0,
        te_bps: 0.0,
        trader_cost_usd: 0.0,
        trader_profit_usd: 0.0,
        trader_profit_bps: 0.0,
        impact_profit_usd: 0.0,
        impact_profit_bps: 0.0,
        verified: "skipped".to_string(),
        status: "ok".to_string(),
    }
}

fn apply_game_eval(row: &mut ScenarioRow, eval: &GameEvaluation) {
    row.cost_usd = eval.manager_cost_usd;
    row.savings_usd = eval.report.savings_usd;
    row.savings_bps = eval.report.savings_bps;
    row.residual_savings_usd = eval.residual_savings_usd;
    row.residual_savings_bps = eval.residual_savings_bps;
    row.te_bps = eval.report.tracking_error_bps;
    row.trader_cost_usd = eval.trader_cost_usd;
    row.trader_profit_usd = eval.report.trader_profit_usd;
    row.trader_profit_bps = eval.report.trader_profit_bps;
    row.impact_profit_usd = eval.impact_profit_usd;
    row.impact_profit_bps = eval.impact_profit_bps;
}

/// Exact `(y/D)^2` integral of a piecewise-linear path: per-interval
/// quadratic, integrated segment by segment.
fn piecewise_te_bps(params: &ImpactParams, scen: &ScenarioParams, y: &InventoryPath) -> Result<f64> {
    let h = y.step()?;
    let d = scen.d_shares;
    let mut acc = 0.0;
    for w in y.shares.windows(2) {
        let (a, b) = (w[0] / d, w[1] / d);
        acc += h * (a * a + a * b + b * b) / 3.0;
    }
    Ok(1e4 * params.w_bench * params.sigma_daily() * acc.max(0.0).sqrt())
}

/// Solved paths plus the evaluated row for one scenario.
struct CellOutcome {
    row: ScenarioRow,
    paths: Option<(InventoryPath, InventoryPath)>,
}

fn run_cell(config: &RunConfig, params: &ImpactParams, cell: &ScenarioCell) -> Result<CellOutcome> {
    let scen = &cell.scen;
    scen.validate()?;
    let scaling = config.lambda_scaling;
    let n = config.grid_size;
    let mut row = blank_row(config, cell, params);
    let paths = match (config.regime, config.method) {
        (RunRegime::NoTrader, SolutionMethod::Analytic) => {
            let y = strategies::no_trader_path(params, scen, scaling, n)?;
            let x = market::sample_trajectory(&market::ZeroTrajectory, scen.t_n, n, 0.0)?;
            let cost = strategies::no_trader_cost_closed_form(params, scen, scaling)?;
            let te = market::tracking_error_bps(params, scen, &y)?;
            let eval = evaluate_game(params, scen, cost, 0.0, te);
            apply_game_eval(&mut row, &eval);
            (x, y)
        }
        (RunRegime::NoTrader, SolutionMethod::GridOptimum) => {
            // Trading constrained to the grid resolution. The discrete
            // optimizer minimizes the same objective the solo schedule's
            // curvature convention encodes, which carries twice the penalty
            // weight of the game objective; hence the doubled lambda.
            let doubled = ScenarioParams {
                lambda: 2.0 * scen.lambda,
                ..*scen
            };
            let x = market::sample_trajectory(&market::ZeroTrajectory, scen.t_n, n, 0.0)?;
            let y = verify::discrete_best_response(params, &doubled, &x, Role::Manager, n, scaling)?;
            let cost = verify::piecewise_cost(params, &x, &y, CostLeg::Manager)?;
            let te = piecewise_te_bps(params, scen, &y)?;
            let eval = evaluate_game(params, scen, cost, 0.0, te);
            apply_game_eval(&mut row, &eval);
            (x, y)
        }
        (RunRegime::Linear, _) => {
            let (x, y) = strategies::linear_paths(params, scen, n)?;
            let cost = strategies::linear_total_cost(params, scen)?;
            let te = strategies::linear_te_bps(params, scen);
            // Trader leg cost of the linear family in closed form.
            let t = scen.t_shares;
            let trader_cost = if t > 0.0 {
                t * (params.s0 + params.epsilon)
                    + params.gamma * (t * t / 2.0 + early_overlap(scen) * t)
                    + params.eta * (t * t / scen.t_n + linear_rate_overlap(scen) * t)
            } else {
                0.0
            };
            let eval = evaluate_game(params, scen, cost, trader_cost, te);
            apply_game_eval(&mut row, &eval);
            // The closed-form savings stay consistent with the row by
            // construction; keep them as emitted.
            (x, y)
        }
        (RunRegime::Nash, _) => {
            let sol = nash::solve_nash(params, scen, scaling)?;
            let eval = nash::evaluate_nash(params, scen, &sol, n)?;
            apply_game_eval(&mut row, &eval);
            (nash::nash_x_path(&sol, n)?, nash::nash_y_path(&sol, n)?)
        }
        (RunRegime::Stackelberg, _) => {
            let sol = stackelberg::solve_stackelberg(params, scen, scaling)?;
            let eval = stackelberg::evaluate_stackelberg(params, scen, &sol, n)?;
            apply_game_eval(&mut row, &eval);
            (
                stackelberg::stackelberg_x_path(scen, n)?,
                stackelberg::stackelberg_y_path(&sol, n)?,
            )
        }
    };
    if config.verify {
        let regime = match config.regime {
            RunRegime::NoTrader => Regime::NoTrader,
            RunRegime::Nash => Regime::Nash,
            RunRegime::Stackelberg => Regime::Stackelberg,
            RunRegime::Linear => unreachable!("rejected at validation"),
        };
        let report = verify::verify_scenario(params, scen, regime, scaling)?;
        row.verified = if report.passed { "pass" } else { "fail" }.to_string();
    }
    Ok(CellOutcome {
        row,
        paths: Some(paths),
    })
}

/// Overlap terms for the linear trader leg: gamma couples through the time
/// average of the manager holdings (the trader rate is constant), eta through
/// the time average of the manager rate.
fn early_overlap(scen: &ScenarioParams) -> f64 {
    // (1/t_n) INT y dt with y the delayed ramp to f*D.
    scen.fraction * scen.d_shares * (scen.t_n - scen.d_start) / (2.0 * scen.t_n)
}

fn linear_rate_overlap(scen: &ScenarioParams) -> f64 {
    // (1/t_n) INT y' dt = f*D / t_n.
    scen.fraction * scen.d_shares / scen.t_n
}

/// Sweep summary: rows plus failure counters for exit-code mapping.
#[derive(Debug)]
pub struct RunSummary {
    pub rows: Vec<ScenarioRow>,
    pub solver_errors: usize,
    pub verification_failures: usize,
    pub out_dir: PathBuf,
}

fn write_path_csv(path: &Path, x: &InventoryPath, y: &InventoryPath) -> Result<()> {
    let mut text = String::from("time_days,trader_shares,manager_shares,trader_rate,manager_rate\n");
    let rx = x.node_rates()?;
    let ry = y.node_rates()?;
    for i in 0..x.len() {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(x.times[i]),
            fmt_f64(x.shares[i]),
            fmt_f64(y.shares[i]),
            fmt_f64(rx[i]),
            fmt_f64(ry[i]),
        ));
    }
    std::fs::write(path, text)?;
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    package: &'static str,
    package_version: &'static str,
    config: &'a RunConfig,
    conventions: serde_json::Value,
    tolerances: serde_json::Value,
}

fn manifest_json(config: &RunConfig, params: &ImpactParams) -> Result<String> {
    let conventions = serde_json::json!({
        "time_unit": "day",
        "impact_params": params,
        "preset": config.preset.name(),
        "lambda_scaling": config.lambda_scaling,
        "solution_method": config.method,
        "benchmark": "full demand at the event, residual rate (D-T)/dt_bench",
        "alt_benchmark": "residual over the final day at constant rate, trader block at event mid",
        "solo_penalty_weight": "2 * lambda_eff (solo-schedule curvature convention)",
        "trader_proceeds": [
            "event mid minus half-spread (primary)",
            "event execution including residual temporary impact (impact_* columns)",
        ],
        "profit_bps_denominator": "sale proceeds under the same convention",
        "tracking_error": match config.method {
            SolutionMethod::Analytic => "Simpson quadrature on the run grid",
            SolutionMethod::GridOptimum => "exact piecewise-linear integral",
        },
    });
    let tolerances = serde_json::json!({
        "cost_rel": 1e-6,
        "el_residual_sup": "1e-4 * D / t_n^2",
        "boundary_abs": "1e-8 * D",
        "best_response_sup": "1e-3 * D",
    });
    let manifest = Manifest {
        schema_version: crate::config::SCHEMA_VERSION,
        package: env!("CARGO_PKG_NAME"),
        package_version: env!("CARGO_PKG_VERSION"),
        config,
        conventions,
        tolerances,
    };
    Ok(serde_json::to_string_pretty(&manifest)? + "\n")
}

/// Run a sweep and write `results.csv`, `results.txt`, `manifest.json`, and
/// per-scenario path files under `out_dir`.
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    config.validate()?;
    let params = config.impact_params();
    std::fs::create_dir_all(out_dir)?;
    let paths_dir = out_dir.join("paths");
    if config.write_paths {
        std::fs::create_dir_all(&paths_dir)?;
    }
    let mut rows = Vec::new();
    let mut solver_errors = 0;
    let mut verification_failures = 0;
    for cell in enumerate_scenarios(config) {
        match run_cell(config, &params, &cell) {
            Ok(outcome) => {
                if outcome.row.verified == "fail" {
                    verification_failures += 1;
                }
                if config.write_paths {
                    if let Some((x, y)) = &outcome.paths {
                        write_path_csv(
                            &paths_dir.join(format!("scn_{:04}.csv", cell.index)),
                            x,
                            y,
                        )?;
                    }
                }
                rows.push(outcome.row);
            }
            Err(Error::Io(e)) => return Err(Error::Io(e)),
            Err(e) => {
                solver_errors += 1;
                let mut row = blank_row(config, &cell, &params);
                row.status = format!("error: {e}").replace(',', ";");
                rows.push(row);
            }
        }
    }
    write_rows_csv(&out_dir.join("results.csv"), &rows)?;
    std::fs::write(out_dir.join("results.txt"), crate::tables::rows_to_text(&rows))?;
    std::fs::write(out_dir.join("manifest.json"), manifest_json(config, &params)?)?;
    Ok(RunSummary {
        rows,
        solver_errors,
        verification_failures,
        out_dir: out_dir.to_path_buf(),
    })
}

/// One sampled point of the announcement-to-event price path.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PricePathRecord {
    /// Time, days.
    pub time: f64,
    /// Mid price carrying permanent impact, USD.
    pub mid: f64,
    /// Execution price including temporary impact and the half-spread, USD.
    pub exec: f64,
    /// Cumulative mid return vs the initial price, fraction.
    pub cum_return: f64,
    /// Cumulative return of the execution price, fraction.
    pub cum_return_exec: f64,
}

/// Price path along a pair of inventory paths on a shared grid.
pub fn emit_price_path(
    params: &ImpactParams,
    x: &InventoryPath,
    y: &InventoryPath,
) -> Result<Vec<PricePathRecord>> {
    if x.len() != y.len() {
        return Err(Error::GridMismatch("path sizes differ".into()));
    }
    let rx = x.node_rates()?;
    let ry = y.node_rates()?;
    Ok((0..x.len())
        .map(|i| {
            let mid = params.s0 + params.gamma * (x.shares[i] + y.shares[i]);
            let exec = mid + params.eta * (rx[i] + ry[i]) + params.epsilon;
            PricePathRecord {
                time: x.times[i],
                mid,
                exec,
                cum_return: mid / params.s0 - 1.0,
                cum_return_exec: exec / params.s0 - 1.0,
            }
        })
        .collect())
}

/// Decomposition of the pre-event price move.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PricePathSummary {
    pub final_mid_return: f64,
    pub final_exec_return: f64,
    /// Permanent, temporary, and spread components of the final execution
    /// return, as fractions of the initial price.
    pub permanent_component: f64,
    pub temporary_component: f64,
    pub spread_component: f64,
}

/// Scenario behind the representative price path: the trader accumulates a
/// large participation while the manager stays out until the event, so the
/// trader's plan is the straight ramp that minimizes her own cost.
pub fn price_path_scenario(
    params: &ImpactParams,
    scen: &ScenarioParams,
    grid_size: usize,
) -> Result<(Vec<PricePathRecord>, PricePathSummary)> {
    params.validate()?;
    scen.validate()?;
    let ramp = market::LinearRamp {
        terminal: scen.t_shares,
        horizon: scen.t_n,
    };
    let x = market::sample_trajectory(&ramp, scen.t_n, grid_size, scen.t_shares)?;
    let y = market::sample_trajectory(&market::ZeroTrajectory, scen.t_n, grid_size, 0.0)?;
    let records = emit_price_path(params, &x, &y)?;
    let last = records.last().unwrap();
    let summary = PricePathSummary {
        final_mid_return: last.cum_return,
        final_exec_return: last.cum_return_exec,
        permanent_component: params.gamma * scen.t_shares / params.s0,
        temporary_component: params.eta * scen.t_shares / scen.t_n / params.s0,
        spread_component: params.epsilon / params.s0,
    };
    Ok((records, summary))
}

/// Write the price path CSV plus a summary manifest.
pub fn run_price_path(
    params: &ImpactParams,
    scen: &ScenarioParams,
    grid_size: usize,
    out_dir: &Path,
) -> Result<PricePathSummary> {
    std::fs::create_dir_all(out_dir)?;
    let (records, summary) = price_path_scenario(params, scen, grid_size)?;
    let mut text = String::from("time_days,mid_usd,exec_usd,cum_return_mid,cum_return_exec\n");
    for r in &records {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(r.time),
            fmt_f64(r.mid),
            fmt_f64(r.exec),
            fmt_f64(r.cum_return),
            fmt_f64(r.cum_return_exec),
        ));
    }
    std::fs::write(out_dir.join("price_path.csv"), text)?;
    let manifest = serde_json::json!({
        "schema_version": crate::config::SCHEMA_VERSION,
        "impact_params": params,
        "scenario": scen,
        "grid_size": grid_size,
        "summary": summary,
    });
    std::fs::write(
        out_dir.join("price_path_manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Preset, SCHEMA_VERSION};
    use crate::market::LambdaScaling;

    fn config(regime: RunRegime) -> RunConfig {
        let mut cfg = RunConfig {
            schema_version: SCHEMA_VERSION,
            notes: None,
            preset: Preset::Core,
            impact: None,
            regime,
            horizon_days: 10.0,
            lambdas: vec![0.0, 0.4],
            demands: vec![1e6],
            trader_participations: vec![],
            manager_fractions: vec![],
            start_days: vec![],
            taus: vec![],
            trader_shares: vec![],
            aum: 5e10,
            grid_size: 2001,
            lambda_scaling: LambdaScaling::BenchmarkCost,
            method: SolutionMethod::Analytic,
            verify: false,
            write_paths: false,
        };
        match regime {
            RunRegime::Nash => cfg.trader_participations = vec![0.1],
            RunRegime::Stackelberg => {
                cfg.trader_participations = vec![0.1];
                cfg.taus = vec![1.0];
            }
            RunRegime::Linear => {
                cfg.manager_fractions = vec![0.5];
                cfg.start_days = vec![1.0];
                cfg.trader_shares = vec![0.0, 5e5];
            }
            RunRegime::NoTrader => {}
        }
        cfg
    }

    #[test]
    fn enumeration_is_deterministic_and_ordered() {
        let cfg = config(RunRegime::Linear);
        let cells = enumerate_scenarios(&cfg);
        assert_eq!(cells.len(), 2 * 1 * 1 * 1 * 2);
        for (i, c) in cells.iter().enumerate() {
            assert_eq!(c.index, i);
        }
        assert_eq!(cells[0].scen.t_shares, 0.0);
        assert_eq!(cells[1].scen.t_shares, 5e5);
    }

    #[test]
    fn run_writes_consistent_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(RunRegime::Nash);
        let summary = run(&cfg, dir.path()).unwrap();
        assert_eq!(summary.rows.len(), 2);
        assert_eq!(summary.solver_errors, 0);
        let parsed = crate::tables::read_rows_csv(&dir.path().join("results.csv")).unwrap();
        assert_eq!(parsed.len(), 2);
        assert!((parsed[0].savings_usd - summary.rows[0].savings_usd).abs()
            <= 1e-9 * summary.rows[0].savings_usd.abs());
        assert!(dir.path().join("manifest.json").exists());
        assert!(dir.path().join("results.txt").exists());
    }

    #[test]
    fn linear_rows_match_module_formulas() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(RunRegime::Linear);
        let summary = run(&cfg, dir.path()).unwrap();
        let params = cfg.impact_params();
        for row in &summary.rows {
            let mut scen = ScenarioParams::new(row.demand_shares, 10.0);
            scen.lambda = row.lambda;
            scen.fraction = row.manager_fraction;
            scen.d_start = row.start_day;
            scen.t_shares = row.trader_shares;
            let expected = strategies::linear_savings(&params, &scen).unwrap();
            assert!(
                (row.savings_usd - expected).abs() < 1e-6 * expected.abs().max(1.0),
                "row {} savings {} expected {expected}",
                row.scenario,
                row.savings_usd
            );
        }
    }

    #[test]
    fn linear_trader_cost_matches_quadrature() {
        let params = ImpactParams::core();
        let mut scen = ScenarioParams::new(1e6, 10.0);
        scen.fraction = 0.5;
        scen.d_start = 1.0;
        scen.t_shares = 5e5;
        let lin = strategies::LinearScenario::new(&scen).unwrap();
        // Split at the manager's start day: her rate jumps there, and the
        // panel rule is only exact on windows where the integrand is affine.
        let quad_cost = market::flow_cost_window(
            &params,
            &lin.trader,
            &market::ZeroTrajectory,
            CostLeg::Trader,
            0.0,
            scen.d_start,
            4001,
        )
        .unwrap()
            + market::flow_cost_window(
                &params,
                &lin.trader,
                &lin.manager,
                CostLeg::Trader,
                scen.d_start,
                10.0,
                4001,
            )
            .unwrap();
        let t = scen.t_shares;
        let closed = t * (params.s0 + params.epsilon)
            + params.gamma * (t * t / 2.0 + early_overlap(&scen) * t)
            + params.eta * (t * t / scen.t_n + linear_rate_overlap(&scen) * t);
        assert!(
            (closed - quad_cost).abs() < 1e-9 * quad_cost.abs(),
            "{closed} vs {quad_cost}"
        );
    }

    #[test]
    fn solver_errors_leave_row_with_status() {
        let mut cfg = config(RunRegime::NoTrader);
        cfg.lambdas = vec![1e6]; // overflow guard territory
        let dir = tempfile::tempdir().unwrap();
        let summary = run(&cfg, dir.path()).unwrap();
        assert_eq!(summary.solver_errors, 1);
        assert!(summary.rows.iter().any(|r| r.status.starts_with("error:")));
        // Run continued: one good row remains (lambda list had 1 entry; the
        // demands list is length 1, so exactly one row errored).
        assert_eq!(summary.rows.len(), 1);
    }

    #[test]
    fn price_path_flat_without_flow() {
        let params = ImpactParams::core();
        let x = market::sample_trajectory(&market::ZeroTrajectory, 5.0, 101, 0.0).unwrap();
        let y = market::sample_trajectory(&market::ZeroTrajectory, 5.0, 101, 0.0).unwrap();
        let records = emit_price_path(&params, &x, &y).unwrap();
        assert!(records.iter().all(|r| r.mid == params.s0));
        assert!(records.iter().all(|r| r.cum_return == 0.0));
    }

    #[test]
    fn price_path_permanent_component_scales_with_gamma() {
        let scen = ScenarioParams {
            t_shares: 4.5e6,
            ..ScenarioParams::new(5e6, 5.0)
        };
        let p1 = ImpactParams {
            gamma: 3e-7,
            ..ImpactParams::core()
        };
        let p2 = ImpactParams {
            gamma: 6e-7,
            ..ImpactParams::core()
        };
        let (r1, _) = price_path_scenario(&p1, &scen, 101).unwrap();
        let (r2, _) = price_path_scenario(&p2, &scen, 101).unwrap();
        for (a, b) in r1.iter().zip(&r2) {
            let d1 = a.mid - p1.s0;
            let d2 = b.mid - p2.s0;
            assert!((d2 - 2.0 * d1).abs() < 1e-9 * d1.abs().max(1e-12));
        }
    }
}
