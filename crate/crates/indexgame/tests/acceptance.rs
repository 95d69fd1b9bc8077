//! Acceptance suite. One test per criterion; each prints a PASS/FAIL line
//! (visible with `cargo test --test acceptance -- --nocapture`).

use std::time::Instant;

use indexgame::config::RunConfig;
use indexgame::market::{
    benchmark_cost, drag_bps, ImpactParams, LambdaScaling, ScenarioParams,
};
use indexgame::nash::solve_nash;
use indexgame::runner;
use indexgame::stackelberg::{solve_stackelberg, stackelberg_x_path};
use indexgame::strategies::{linear_paths, linear_te_bps, no_trader_path};
use indexgame::tables::ScenarioRow;
use indexgame::verify::{verify_scenario, Regime};

const SCALING: LambdaScaling = LambdaScaling::BenchmarkCost;

/// Sweep shared by criteria 1 and 2: effective penalty weights spanning six
/// decades including zero (lambda_eff runs from ~5e1 USD/day at lambda=1e-6,
/// D=1e6 to ~1.4e8 USD/day at lambda=0.1, D=2e7). The top decade keeps the
/// schedule curvature k * t_n around 32, where a second-order difference of
/// f64 samples still resolves the stationarity residual to the tolerance.
const LAMBDAS: [f64; 5] = [0.0, 1e-6, 1e-4, 1e-2, 1e-1];
const DEMANDS: [f64; 3] = [1e6, 5e6, 2e7];

fn game_scen(d: f64, lambda: f64) -> ScenarioParams {
    ScenarioParams::new(d, 10.0)
        .with_lambda(lambda)
        .with_participation(0.1)
}

fn solo_scen(d: f64, lambda: f64) -> ScenarioParams {
    ScenarioParams::new(d, 10.0).with_lambda(lambda)
}

#[test]
fn criterion_1_closed_forms_match_oracles_across_sweep() {
    let params = ImpactParams::core();
    let start = Instant::now();
    let mut checked = 0;
    for &lambda in &LAMBDAS {
        for &d in &DEMANDS {
            for regime in [Regime::NoTrader, Regime::Nash, Regime::Stackelberg] {
                let scen = match regime {
                    Regime::NoTrader => solo_scen(d, lambda),
                    _ => game_scen(d, lambda),
                };
                let report = verify_scenario(&params, &scen, regime, SCALING).unwrap();
                let t = &report.tolerances;
                assert!(
                    report.cost_rel_err < t.cost_rel,
                    "{regime:?} lambda={lambda} D={d}: cost mismatch {:.3e}",
                    report.cost_rel_err
                );
                assert!(
                    report.el_residual_sup < t.el_sup,
                    "{regime:?} lambda={lambda} D={d}: residual {:.3e} vs {:.3e} (grid {})",
                    report.el_residual_sup,
                    t.el_sup,
                    report.oracle_grid
                );
                for (i, e) in report.bc_errors.iter().enumerate() {
                    assert!(
                        e.abs() < t.bc_abs,
                        "{regime:?} lambda={lambda} D={d}: endpoint {i} error {e:.3e}"
                    );
                }
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "sweep took {:.2}s (budget 10s)",
        elapsed.as_secs_f64()
    );
    println!(
        "PASS criterion 1: {checked} scenarios, closed-form costs within 1e-6 of quadrature, \
         stationarity residuals and endpoints in tolerance ({:.2}s)",
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_2_best_response_fixed_points() {
    let params = ImpactParams::core();
    let mut worst: f64 = 0.0;
    for &lambda in &LAMBDAS {
        for &d in &DEMANDS {
            let scen = game_scen(d, lambda);
            let report = verify_scenario(&params, &scen, Regime::Nash, SCALING).unwrap();
            let rel = report.br_deviation / d;
            worst = worst.max(rel);
            assert!(
                report.br_deviation < report.tolerances.br_sup,
                "lambda={lambda} D={d}: best-response deviation {:.3e} vs {:.3e}",
                report.br_deviation,
                report.tolerances.br_sup
            );
        }
    }
    println!(
        "PASS criterion 2: equilibrium best responses within 1e-3*D at 2001 nodes \
         (worst {worst:.2e}*D)"
    );
}

#[test]
fn criterion_3_tracking_error_closed_forms() {
    let params = ImpactParams::core();
    // Kinked linear schedules against quadrature of the sampled path.
    for (f, d0) in [(1.0, 0.0), (0.5, 1.0), (0.3, 2.0), (0.8, 0.5)] {
        let mut scen = solo_scen(1e6, 0.0);
        scen.fraction = f;
        scen.d_start = d0;
        let (_, y) = linear_paths(&params, &scen, 2001).unwrap();
        let te_quad = indexgame::tracking_error_bps(&params, &scen, &y).unwrap();
        let te_formula = linear_te_bps(&params, &scen);
        let rel = (te_quad - te_formula).abs() / te_formula;
        assert!(rel < 1e-8, "f={f} d0={d0}: TE mismatch rel {rel:.3e}");
    }
    // Full straight-line accumulation over ten days under the core
    // volatility and weight.
    let mut scen = solo_scen(1e6, 0.0);
    scen.fraction = 1.0;
    scen.d_start = 0.0;
    let te = linear_te_bps(&params, &scen);
    assert!((te - 3.45).abs() < 0.01, "ramp TE {te}");
    assert!((te - 4.0).abs() < 1.0, "ramp TE {te} not within 1bp of ~4bps");
    println!("PASS criterion 3: linear tracking error formula matches quadrature (ramp {te:.2} bps)");
}

// ---------------------------------------------------------------------------
// Criterion 4: reference-scenario reproduction.
//
// Published magnitudes for these sweeps are not exactly recoverable (the
// temporary-impact unit, the permanent-impact calibration, the penalty
// scaling, and the benchmark window are all under-determined), so the checks
// are qualitative: signs, monotonic trends in the penalty weight, and
// magnitudes within a factor of 2.5 under the conventions recorded in each
// run manifest.
// ---------------------------------------------------------------------------

const BAND: f64 = 2.5;
/// "~0" entries in the solo table bound the magnitude by 2.5x half the
/// table's 1mm rounding unit.
const ZERO_BAND_USD: f64 = 1.25e6;

#[derive(Clone, Copy)]
enum Te {
    About(f64),
    Below(f64),
}

struct SoloCell {
    lambda: f64,
    demand: f64,
    savings: Option<(f64, f64)>, // (usd, bps); None -> zero band
    te: Te,
}

struct GameCell {
    lambda: f64,
    demand: f64,
    participation: f64,
    tau: f64,
    savings: Option<(f64, f64)>,
    te: Te,
    profit: Option<(f64, f64)>,
}

fn find_row<'a>(
    rows: &'a [ScenarioRow],
    lambda: f64,
    demand: f64,
    participation: f64,
    tau: f64,
) -> &'a ScenarioRow {
    rows.iter()
        .find(|r| {
            (r.lambda - lambda).abs() < 1e-12
                && (r.demand_shares - demand).abs() < 1.0
                && (r.participation - participation).abs() < 1e-12
                && (tau.is_nan() || (r.tau - tau).abs() < 1e-12)
        })
        .unwrap_or_else(|| panic!("no row for lambda={lambda} D={demand} f={participation}"))
}

fn check_sign(name: &str, model: f64, target: f64, failures: &mut Vec<String>) {
    if model.signum() != target.signum() {
        failures.push(format!("{name}: sign {model:.3e} vs target {target:.3e}"));
    }
}

fn check_band(name: &str, model: f64, target: f64, failures: &mut Vec<String>) {
    let ratio = (model / target).abs();
    if !(1.0 / BAND..=BAND).contains(&ratio) || model.signum() != target.signum() {
        failures.push(format!(
            "{name}: {model:.3e} vs target {target:.3e} (ratio {ratio:.2})"
        ));
    }
}

fn check_te(name: &str, model: f64, te: Te, failures: &mut Vec<String>) {
    match te {
        Te::About(t) => check_band(name, model, t, failures),
        Te::Below(t) => {
            if !(model >= 0.0 && model <= BAND * t) {
                failures.push(format!("{name}: {model:.3e} not below {t:.1}"));
            }
        }
    }
}

fn check_zero(name: &str, model: f64, failures: &mut Vec<String>) {
    if model.abs() > ZERO_BAND_USD {
        failures.push(format!("{name}: {model:.3e} outside the ~0 band"));
    }
}

fn assert_trend(name: &str, values: &[f64], nonincreasing: bool) {
    for w in values.windows(2) {
        let ok = if nonincreasing {
            w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0)
        } else {
            w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0)
        };
        assert!(ok, "{name}: {values:?} breaks monotonicity");
    }
}

#[test]
fn criterion_4_reference_scenario_reproduction() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let solo = runner::run(&RunConfig::reference_solo(), &dir.path().join("solo")).unwrap();
    let nash = runner::run(
        &RunConfig::reference_simultaneous(),
        &dir.path().join("nash"),
    )
    .unwrap();
    let stack = runner::run(
        &RunConfig::reference_leader_follower(),
        &dir.path().join("stackelberg"),
    )
    .unwrap();
    for s in [&solo, &nash, &stack] {
        assert_eq!(s.solver_errors, 0);
        assert!(s.out_dir.join("manifest.json").exists());
    }

    let mut failures: Vec<String> = Vec::new();

    // (a)+(c) solo table: savings via the event benchmark, daily grid.
    let solo_cells = [
        SoloCell { lambda: 0.0, demand: 1e6, savings: Some((1e6, 113.0)), te: Te::About(4.0) },
        SoloCell { lambda: 0.0, demand: 5e6, savings: Some((14e6, 536.0)), te: Te::About(4.0) },
        SoloCell { lambda: 0.4, demand: 1e6, savings: None, te: Te::About(1.0) },
        SoloCell { lambda: 0.4, demand: 5e6, savings: Some((1e6, 30.0)), te: Te::About(1.0) },
        SoloCell { lambda: 10.0, demand: 1e6, savings: None, te: Te::About(1.0) },
        SoloCell { lambda: 10.0, demand: 5e6, savings: None, te: Te::About(1.0) },
    ];
    for cell in &solo_cells {
        let row = find_row(&solo.rows, cell.lambda, cell.demand, 0.0, f64::NAN);
        let name = format!("solo l={} D={:.0e}", cell.lambda, cell.demand);
        match cell.savings {
            Some((usd, bps)) => {
                check_sign(&format!("{name} savings sign"), row.savings_usd, usd, &mut failures);
                check_band(&format!("{name} savings usd"), row.savings_usd, usd, &mut failures);
                check_band(&format!("{name} savings bps"), row.savings_bps, bps, &mut failures);
            }
            None => check_zero(&format!("{name} savings"), row.savings_usd, &mut failures),
        }
        check_te(&format!("{name} te"), row.te_bps, cell.te, &mut failures);
    }

    // (a)+(c) simultaneous game: profit under the event-execution proceeds.
    let nash_cells = [
        GameCell { lambda: 0.0, demand: 5e6, participation: 0.1, tau: f64::NAN,
                   savings: Some((21e6, 754.0)), te: Te::About(3.0), profit: Some((2e6, 788.0)) },
        GameCell { lambda: 0.4, demand: 5e6, participation: 0.1, tau: f64::NAN,
                   savings: Some((7e6, 242.0)), te: Te::About(1.0), profit: Some((10e6, 3571.0)) },
        GameCell { lambda: 1.0, demand: 5e6, participation: 0.1, tau: f64::NAN,
                   savings: Some((-2e6, -78.0)), te: Te::About(1.0), profit: Some((14e6, 5179.0)) },
        GameCell { lambda: 0.0, demand: 1e6, participation: 0.1, tau: f64::NAN,
                   savings: Some((1e6, 162.0)), te: Te::About(3.0), profit: Some((0.1e6, 168.0)) },
        GameCell { lambda: 0.4, demand: 1e6, participation: 0.1, tau: f64::NAN,
                   savings: None, te: Te::Below(1.0), profit: Some((1e6, 1454.0)) },
        GameCell { lambda: 0.4, demand: 1e6, participation: 0.2, tau: f64::NAN,
                   savings: Some((-0.5e6, -108.0)), te: Te::Below(1.0), profit: Some((1e6, 790.0)) },
        GameCell { lambda: 1.0, demand: 1e6, participation: 0.2, tau: f64::NAN,
                   savings: Some((-1e6, -257.0)), te: Te::Below(1.0), profit: Some((1e6, 1163.0)) },
    ];
    let stack_cells = [
        GameCell { lambda: 0.0, demand: 5e6, participation: 0.1, tau: 1.0,
                   savings: Some((21e6, 756.0)), te: Te::About(3.0), profit: Some((2e6, 840.0)) },
        GameCell { lambda: 0.4, demand: 5e6, participation: 0.1, tau: 1.0,
                   savings: Some((-2e6, -100.0)), te: Te::About(1.0), profit: Some((2e6, 945.0)) },
        GameCell { lambda: 0.0, demand: 5e6, participation: 0.2, tau: 5.0,
                   savings: Some((18e6, 659.0)), te: Te::About(3.0), profit: Some((3.5e6, 715.0)) },
        GameCell { lambda: 0.0, demand: 1e6, participation: 0.1, tau: 1.0,
                   savings: Some((1e6, 163.0)), te: Te::About(3.0), profit: Some((0.1e6, 166.0)) },
        GameCell { lambda: 0.4, demand: 1e6, participation: 0.1, tau: 1.0,
                   savings: Some((-1e6, -258.0)), te: Te::About(1.0), profit: Some((0.1e6, 185.0)) },
        GameCell { lambda: 0.0, demand: 1e6, participation: 0.2, tau: 1.0,
                   savings: Some((1e6, 140.0)), te: Te::About(3.0), profit: Some((0.1e6, 140.0)) },
        GameCell { lambda: 0.4, demand: 1e6, participation: 0.2, tau: 1.0,
                   savings: Some((-1e6, -280.0)), te: Te::About(1.0), profit: Some((0.1e6, 154.0)) },
        GameCell { lambda: 0.0, demand: 1e6, participation: 0.2, tau: 5.0,
                   savings: Some((1e6, 141.0)), te: Te::About(3.0), profit: Some((0.1e6, 142.0)) },
    ];
    for (rows, cells, tag) in [
        (&nash.rows, &nash_cells[..], "nash"),
        (&stack.rows, &stack_cells[..], "stackelberg"),
    ] {
        for cell in cells {
            let row = find_row(rows, cell.lambda, cell.demand, cell.participation, cell.tau);
            let name = format!(
                "{tag} l={} D={:.0e} f={} tau={}",
                cell.lambda, cell.demand, cell.participation, cell.tau
            );
            if let Some((usd, bps)) = cell.savings {
                check_band(&format!("{name} savings usd"), row.savings_usd, usd, &mut failures);
                check_band(&format!("{name} savings bps"), row.savings_bps, bps, &mut failures);
            }
            check_te(&format!("{name} te"), row.te_bps, cell.te, &mut failures);
            if let Some((usd, bps)) = cell.profit {
                check_band(
                    &format!("{name} profit usd"),
                    row.impact_profit_usd,
                    usd,
                    &mut failures,
                );
                check_band(
                    &format!("{name} profit bps"),
                    row.impact_profit_bps,
                    bps,
                    &mut failures,
                );
            }
        }
    }

    // (b) monotonic trends in the penalty weight.
    for &d in &[1e6, 5e6] {
        let sav: Vec<f64> = [0.0, 0.4, 10.0]
            .iter()
            .map(|&l| find_row(&solo.rows, l, d, 0.0, f64::NAN).savings_usd)
            .collect();
        assert_trend(&format!("solo savings D={d:.0e}"), &sav, true);
        let te: Vec<f64> = [0.0, 0.4, 10.0]
            .iter()
            .map(|&l| find_row(&solo.rows, l, d, 0.0, f64::NAN).te_bps)
            .collect();
        assert_trend(&format!("solo te D={d:.0e}"), &te, true);
    }
    for &d in &[1e6, 5e6] {
        for &f in &[0.1, 0.2] {
            let rows: Vec<&ScenarioRow> = [0.0, 0.4, 1.0]
                .iter()
                .map(|&l| find_row(&nash.rows, l, d, f, f64::NAN))
                .collect();
            let sav: Vec<f64> = rows.iter().map(|r| r.savings_usd).collect();
            assert_trend(&format!("nash savings D={d:.0e} f={f}"), &sav, true);
            let te: Vec<f64> = rows.iter().map(|r| r.te_bps).collect();
            assert_trend(&format!("nash te D={d:.0e} f={f}"), &te, true);
        }
    }
    let profit: Vec<f64> = [0.0, 0.4, 1.0]
        .iter()
        .map(|&l| find_row(&nash.rows, l, 5e6, 0.1, f64::NAN).impact_profit_usd)
        .collect();
    assert_trend("nash trader profit D=5e6", &profit, false);
    for &d in &[1e6, 5e6] {
        for &f in &[0.1, 0.2] {
            for &tau in &[1.0, 5.0] {
                let rows: Vec<&ScenarioRow> = [0.0, 0.4]
                    .iter()
                    .map(|&l| find_row(&stack.rows, l, d, f, tau))
                    .collect();
                let sav: Vec<f64> = rows.iter().map(|r| r.savings_usd).collect();
                assert_trend(&format!("stk savings D={d:.0e} f={f} tau={tau}"), &sav, true);
                let te: Vec<f64> = rows.iter().map(|r| r.te_bps).collect();
                assert_trend(&format!("stk te D={d:.0e} f={f} tau={tau}"), &te, true);
            }
        }
    }

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "reference runs took {:.2}s (budget 30s)",
        elapsed.as_secs_f64()
    );
    if failures.is_empty() {
        println!(
            "PASS criterion 4: signs, trends, and all reference magnitudes within 2.5x \
             ({:.2}s)",
            elapsed.as_secs_f64()
        );
    } else {
        println!(
            "FAIL criterion 4: {} magnitude cell(s) out of band:",
            failures.len()
        );
        for f in &failures {
            println!("  {f}");
        }
    }
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn criterion_5_degenerate_limits() {
    let params = ImpactParams::core();

    // Zero penalty: the solo schedule is the straight ramp.
    let scen = solo_scen(5e6, 0.0);
    let path = no_trader_path(&params, &scen, SCALING, 2001).unwrap();
    for (i, &t) in path.times.iter().enumerate() {
        let ramp = 5e6 * t / 10.0;
        assert!((path.shares[i] - ramp).abs() < 1e-8 * 5e6);
    }

    // Zero impacts: both equilibrium schedules are straight ramps.
    let zero_gamma = ImpactParams { gamma: 0.0, ..params };
    let scen = game_scen(5e6, 0.0);
    let sol = solve_nash(&zero_gamma, &scen, SCALING).unwrap();
    for i in 0..=100 {
        let t = 10.0 * i as f64 / 100.0;
        assert!((sol.y_value(t) - 5e6 * t / 10.0).abs() < 1e-8 * 5e6);
        assert!((sol.x_value(t) - 5e5 * t / 10.0).abs() < 1e-8 * 5e6);
    }

    // The leader plan is bit-identical across penalty weights.
    let mut shapes = Vec::new();
    for lambda in [0.0, 0.4, 7.0] {
        let mut s = game_scen(5e6, lambda);
        s.tau = 1.0;
        shapes.push(stackelberg_x_path(&s, 2001).unwrap());
    }
    assert_eq!(shapes[0].shares, shapes[1].shares);
    assert_eq!(shapes[0].shares, shapes[2].shares);

    // The resonance point solves and passes the oracle bundle, with the
    // closed-form cost replaced by quadrature.
    let mut scen = game_scen(5e6, 1.0);
    scen.tau = 1.0;
    let bench = benchmark_cost(&params, &scen);
    scen.lambda = params.eta * 2.5e13 / (scen.tau * scen.tau) / bench;
    let sol = solve_stackelberg(&params, &scen, SCALING).unwrap();
    assert!(sol.is_resonant());
    let report = verify_scenario(&params, &scen, Regime::Stackelberg, SCALING).unwrap();
    assert!(report.quadrature_fallback);
    assert!(
        report.passed,
        "resonant bundle: cost {:.2e} el {:.2e} br {:.2e}",
        report.cost_rel_err, report.el_residual_sup, report.br_deviation
    );

    println!(
        "PASS criterion 5: ramp limits, leader invariance, and the resonance point all hold"
    );
}

#[test]
fn criterion_6_price_path_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let params = ImpactParams {
        gamma: 3e-7,
        eta: 1e-6,
        ..ImpactParams::core()
    };
    let scen = ScenarioParams::new(5e6, 5.0).with_participation(0.9);
    let summary = runner::run_price_path(&params, &scen, 501, dir.path()).unwrap();

    // Rising pre-event path.
    let text = std::fs::read_to_string(dir.path().join("price_path.csv")).unwrap();
    let mids: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(mids.windows(2).all(|w| w[1] > w[0]), "mid path not rising");

    // Final pre-event level near the observed ~5% move, on both the mid and
    // the execution price, with the decomposition recorded.
    assert!(
        (summary.final_mid_return - 0.05).abs() <= 0.03,
        "mid return {:.4}",
        summary.final_mid_return
    );
    assert!(
        (summary.final_exec_return - 0.05).abs() <= 0.03,
        "exec return {:.4}",
        summary.final_exec_return
    );
    let expected_perm = params.gamma * scen.t_shares / params.s0;
    assert!((summary.permanent_component - expected_perm).abs() < 1e-12);
    assert!(
        (summary.final_exec_return
            - (summary.permanent_component
                + summary.temporary_component
                + summary.spread_component))
            .abs()
            < 1e-12
    );
    println!(
        "PASS criterion 6: pre-event cumulative return mid {:.2}% / exec {:.2}% \
         (permanent {:.2}%, temporary {:.2}%, spread {:.2}%)",
        100.0 * summary.final_mid_return,
        100.0 * summary.final_exec_return,
        100.0 * summary.permanent_component,
        100.0 * summary.temporary_component,
        100.0 * summary.spread_component
    );
}

#[test]
fn criterion_7_drag_arithmetic() {
    let drag = drag_bps(21e6, 50e9);
    assert!((drag - 4.2).abs() < 1e-12, "drag {drag}");
    println!("PASS criterion 7: 21e6 savings on 50e9 AUM is {drag} bps of drag");
}

#[test]
fn criterion_8_deterministic_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let mut cfg = RunConfig::reference_simultaneous();
    cfg.write_paths = true;
    runner::run(&cfg, &a).unwrap();
    runner::run(&cfg, &b).unwrap();
    for file in ["results.csv", "results.txt", "manifest.json", "paths/scn_0000.csv"] {
        let ba = std::fs::read(a.join(file)).unwrap();
        let bb = std::fs::read(b.join(file)).unwrap();
        assert_eq!(ba, bb, "{file} differs between identical runs");
    }
    println!("PASS criterion 8: identical configs produce byte-identical outputs");
}
