//! Closed-form inventory schedules: the optimal no-trader manager schedule
//! and the linear early-trading family with its savings / tracking-error
//! formulas.

use crate::error::{Error, Result};
use crate::market::{
    benchmark_cost, sample_trajectory, ImpactParams, InventoryPath, LambdaScaling, ScenarioParams,
    Trajectory,
};

/// Below this value of `k * t_n` the sinh schedule is evaluated as its
/// straight-line limit.
const RAMP_LIMIT: f64 = 1e-6;

/// Optimal manager schedule with no trader present:
/// `y(t) = D sinh(k t) / sinh(k t_n)` with curvature
/// `k = sqrt(2 lambda_eff / (eta D^2))`.
#[derive(Debug, Clone, Copy)]
pub struct NoTraderSolution {
    /// Curvature, 1/day.
    pub curvature: f64,
    pub demand: f64,
    pub horizon: f64,
}

impl NoTraderSolution {
    pub fn solve(
        params: &ImpactParams,
        scen: &ScenarioParams,
        scaling: LambdaScaling,
    ) -> Result<Self> {
        params.validate()?;
        scen.validate()?;
        let lambda_eff = scaling.lambda_eff(params, scen);
        let k = (2.0 * lambda_eff / (params.eta * scen.d_shares * scen.d_shares)).sqrt();
        Ok(Self {
            curvature: k,
            demand: scen.d_shares,
            horizon: scen.t_n,
        })
    }

    fn is_ramp(&self) -> bool {
        self.curvature * self.horizon < RAMP_LIMIT
    }
}

impl Trajectory for NoTraderSolution {
    fn value(&self, t: f64) -> f64 {
        if self.is_ramp() {
            return self.demand * t / self.horizon;
        }
        let k = self.curvature;
        // sinh(kt)/sinh(kT) written with decaying exponentials only.
        let num = (k * (t - self.horizon)).exp() * (1.0 - (-2.0 * k * t).exp());
        let den = 1.0 - (-2.0 * k * self.horizon).exp();
        self.demand * num / den
    }

    fn rate(&self, t: f64) -> f64 {
        if self.is_ramp() {
            return self.demand / self.horizon;
        }
        let k = self.curvature;
        let num = (k * (t - self.horizon)).exp() * (1.0 + (-2.0 * k * t).exp());
        let den = 1.0 - (-2.0 * k * self.horizon).exp();
        self.demand * k * num / den
    }
}

/// Sample the no-trader schedule on a uniform grid.
pub fn no_trader_path(
    params: &ImpactParams,
    scen: &ScenarioParams,
    scaling: LambdaScaling,
    grid_size: usize,
) -> Result<InventoryPath> {
    let sol = NoTraderSolution::solve(params, scen, scaling)?;
    sample_trajectory(&sol, scen.t_n, grid_size, scen.d_shares)
}

/// Closed-form acquisition cost of the no-trader schedule.
///
/// Evaluated in the algebraically identical stable arrangement
/// `D (S0 + eps) + gamma D^2 / 2 + (eta D^2 k / 2) (coth a + a / sinh^2 a)`
/// with `a = k t_n`; the raw sinh/cosh grouping overflows long before the
/// guard below triggers.
pub fn no_trader_cost_closed_form(
    params: &ImpactParams,
    scen: &ScenarioParams,
    scaling: LambdaScaling,
) -> Result<f64> {
    let sol = NoTraderSolution::solve(params, scen, scaling)?;
    let d = scen.d_shares;
    let base = d * (params.s0 + params.epsilon) + params.gamma * d * d / 2.0;
    if sol.is_ramp() {
        return Ok(base + params.eta * d * d / scen.t_n);
    }
    let a = sol.curvature * scen.t_n;
    if a > 700.0 {
        return Err(Error::Overflow(format!(
            "k * t_n = {a:.1} exceeds 700; rescale lambda"
        )));
    }
    let coth = 1.0 / a.tanh();
    let a_over_sinh2 = if a > 350.0 {
        0.0
    } else {
        a / (a.sinh() * a.sinh())
    };
    Ok(base + params.eta * d * d * sol.curvature / 2.0 * (coth + a_over_sinh2))
}

/// The cost formula in its raw sinh/cosh grouping, valid only for moderate
/// `k * t_n`. Kept for cross-checking the stable arrangement.
#[cfg(test)]
fn no_trader_cost_raw(params: &ImpactParams, scen: &ScenarioParams, k: f64) -> f64 {
    let d = scen.d_shares;
    let t_n = scen.t_n;
    let c1 = d * k / (k * t_n).sinh();
    c1 * ((params.s0 + params.epsilon) / k * (k * t_n).sinh()
        + params.gamma * d / (k * t_n).sinh() * ((2.0 * k * t_n).cosh() - 1.0) / (4.0 * k)
        + params.eta * d * k / (k * t_n).sinh()
            * (t_n / 2.0 + (2.0 * k * t_n).sinh() / (4.0 * k)))
}

/// Trader leg of the linear family: a straight ramp to `t_shares`.
#[derive(Debug, Clone, Copy)]
pub struct LinearTrader {
    pub t_shares: f64,
    pub horizon: f64,
}

impl Trajectory for LinearTrader {
    fn value(&self, t: f64) -> f64 {
        self.t_shares * t / self.horizon
    }
    fn rate(&self, _t: f64) -> f64 {
        self.t_shares / self.horizon
    }
}

/// Manager leg of the linear family: flat until `start`, then a uniform ramp
/// to `fraction * D` at the horizon. The rate is taken right-continuous at
/// the start day.
#[derive(Debug, Clone, Copy)]
pub struct LinearManager {
    pub early_shares: f64,
    pub start: f64,
    pub horizon: f64,
}

impl Trajectory for LinearManager {
    fn value(&self, t: f64) -> f64 {
        if t <= self.start {
            0.0
        } else {
            self.early_shares * (t - self.start) / (self.horizon - self.start)
        }
    }
    fn rate(&self, t: f64) -> f64 {
        if t < self.start {
            0.0
        } else {
            self.early_shares / (self.horizon - self.start)
        }
    }
}

/// Linear-inventory scenario: trader ramps to `t_shares`, manager buys
/// `fraction * D` uniformly on `[d_start, t_n]` and the remainder at the
/// event.
#[derive(Debug, Clone, Copy)]
pub struct LinearScenario {
    pub trader: LinearTrader,
    pub manager: LinearManager,
}

impl LinearScenario {
    pub fn new(scen: &ScenarioParams) -> Result<Self> {
        scen.validate()?;
        Ok(Self {
            trader: LinearTrader {
                t_shares: scen.t_shares,
                horizon: scen.t_n,
            },
            manager: LinearManager {
                early_shares: scen.fraction * scen.d_shares,
                start: scen.d_start,
                horizon: scen.t_n,
            },
        })
    }
}

/// Early-execution cost of the linear manager leg over `[d_start, t_n]`.
pub fn linear_early_cost(params: &ImpactParams, scen: &ScenarioParams) -> Result<f64> {
    scen.validate()?;
    params.validate()?;
    let f = scen.fraction;
    let d = scen.d_shares;
    let t = scen.t_shares;
    let t_n = scen.t_n;
    let d0 = scen.d_start;
    if f == 0.0 {
        return Ok(0.0);
    }
    Ok(
        f * d
            * (params.s0 + params.eta * (t / t_n + f * d / (t_n - d0)) + params.epsilon)
            + params.gamma * f * d * (t / (2.0 * t_n) * (t_n + d0) + f * d / 2.0),
    )
}

/// Total manager cost of the linear scenario: early execution plus the
/// residual `(1 - f) D` at benchmark terms.
pub fn linear_total_cost(params: &ImpactParams, scen: &ScenarioParams) -> Result<f64> {
    Ok(linear_early_cost(params, scen)? + (1.0 - scen.fraction) * benchmark_cost(params, scen))
}

/// Early-execution savings of the linear scenario relative to the benchmark.
pub fn linear_savings(params: &ImpactParams, scen: &ScenarioParams) -> Result<f64> {
    scen.validate()?;
    params.validate()?;
    let f = scen.fraction;
    let d = scen.d_shares;
    let t = scen.t_shares;
    let t_n = scen.t_n;
    let d0 = scen.d_start;
    Ok(
        f * d
            * (params.gamma * d + params.eta * (d - t) / params.dt_bench
                - params.eta * (t / t_n + f * d / (t_n - d0)))
            - f * params.gamma * d * (t / 2.0 * (1.0 + d0 / t_n) + f * d / 2.0),
    )
}

/// Tracking error of the linear manager leg in basis points.
pub fn linear_te_bps(params: &ImpactParams, scen: &ScenarioParams) -> f64 {
    1e4 * params.w_bench
        * params.sigma_daily()
        * scen.fraction
        * ((scen.t_n - scen.d_start) / 3.0).sqrt()
}

/// Sample both legs of the linear scenario on a uniform grid. The grid must
/// place `d_start` on a Simpson panel boundary so downstream quadrature of
/// the kinked manager leg stays exact; sizes with `(n - 1)` a multiple of
/// `20 * t_n / (t_n - d_start)`-style ratios are checked directly.
pub fn linear_paths(
    params: &ImpactParams,
    scen: &ScenarioParams,
    grid_size: usize,
) -> Result<(InventoryPath, InventoryPath)> {
    params.validate()?;
    let lin = LinearScenario::new(scen)?;
    let h = scen.t_n / (grid_size - 1) as f64;
    let steps = scen.d_start / h;
    if (steps - steps.round()).abs() > 1e-9 || (steps.round() as usize) % 2 != 0 {
        return Err(Error::BadGrid(format!(
            "start day {} must fall on an even grid node (step {h})",
            scen.d_start
        )));
    }
    let x = sample_trajectory(&lin.trader, scen.t_n, grid_size, scen.t_shares)?;
    let y = sample_trajectory(
        &lin.manager,
        scen.t_n,
        grid_size,
        scen.fraction * scen.d_shares,
    )?;
    Ok((x, y))
}
