//! Shared market-impact types and the cost / tracking-error / profit
//! functionals every regime is evaluated against.
//!
//! Conventions used throughout the crate: time is measured in days, inventory
//! in shares, money in USD. The mid price carries permanent impact
//! proportional to cumulative signed flow; execution adds a temporary
//! component proportional to the instantaneous trading rate plus a fixed
//! half-spread.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// Trading days per year, used to de-annualize volatility.
pub const TRADING_DAYS_PER_YEAR: f64 = 252.0;

/// Shares supplied at the event by outside holders. The benchmark assumes the
/// manager sources everything not provided by the trader at the event itself,
/// so this stays zero; it is named here rather than buried in formulas.
pub const OTHER_SUPPLY_SHARES: f64 = 0.0;

/// Market and impact coefficients shared by all regimes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpactParams {
    /// Initial mid price, USD/share.
    pub s0: f64,
    /// Permanent impact, USD/share per share of cumulative flow.
    pub gamma: f64,
    /// Temporary impact, USD*day/share^2 (rates are shares/day).
    pub eta: f64,
    /// Half-spread, USD/share.
    pub epsilon: f64,
    /// Annualized return volatility, fraction.
    pub sigma_annual: f64,
    /// Index weight of the added name at the event, fraction.
    pub w_bench: f64,
    /// Benchmark execution window, days.
    pub dt_bench: f64,
}

impl ImpactParams {
    /// Core parameter set used by most scenarios.
    pub fn core() -> Self {
        Self {
            s0: 50.0,
            gamma: 1e-7,
            eta: 1e-6,
            epsilon: 0.01,
            sigma_annual: 0.30,
            w_bench: 0.01,
            dt_bench: 1.0,
        }
    }

    /// Core set with the lighter permanent-impact calibration.
    pub fn core_low_gamma() -> Self {
        Self {
            gamma: 1e-8,
            ..Self::core()
        }
    }

    pub fn large_cap() -> Self {
        Self {
            s0: 100.0,
            gamma: 1e-7,
            eta: 1e-6,
            epsilon: 0.005,
            sigma_annual: 0.25,
            w_bench: 0.01,
            dt_bench: 1.0,
        }
    }

    pub fn mid_cap() -> Self {
        Self {
            s0: 50.0,
            gamma: 5e-7,
            eta: 5e-6,
            epsilon: 0.02,
            sigma_annual: 0.35,
            w_bench: 0.002,
            dt_bench: 1.0,
        }
    }

    pub fn small_cap() -> Self {
        Self {
            s0: 30.0,
            gamma: 1e-6,
            eta: 1e-5,
            epsilon: 0.05,
            sigma_annual: 0.50,
            w_bench: 0.0005,
            dt_bench: 1.0,
        }
    }

    /// Daily return volatility.
    pub fn sigma_daily(&self) -> f64 {
        self.sigma_annual / TRADING_DAYS_PER_YEAR.sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("s0", self.s0),
            ("gamma", self.gamma),
            ("eta", self.eta),
            ("epsilon", self.epsilon),
            ("sigma_annual", self.sigma_annual),
            ("w_bench", self.w_bench),
            ("dt_bench", self.dt_bench),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("ImpactParams.{name}")));
            }
        }
        if self.s0 <= 0.0 {
            return Err(Error::InvalidParameter("s0 must be > 0".into()));
        }
        if self.gamma < 0.0 || self.eta <= 0.0 || self.epsilon < 0.0 || self.sigma_annual < 0.0 {
            return Err(Error::InvalidParameter(
                "need gamma >= 0, eta > 0, epsilon >= 0, sigma_annual >= 0".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.w_bench) {
            return Err(Error::InvalidParameter("w_bench must be in [0, 1]".into()));
        }
        if self.dt_bench <= 0.0 {
            return Err(Error::InvalidParameter("dt_bench must be > 0".into()));
        }
        Ok(())
    }
}

/// Scenario knobs: demand, trader inventory, horizon, and schedule shape
/// parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// Manager demand D, shares.
    pub d_shares: f64,
    /// Trader terminal inventory T, shares.
    pub t_shares: f64,
    /// Horizon from announcement to the event, days.
    pub t_n: f64,
    /// Deviation-penalty weight, 1/day.
    pub lambda: f64,
    /// Manager early fraction (linear schedules) or trader participation rate
    /// (equilibrium regimes, where `t_shares = fraction * d_shares`).
    pub fraction: f64,
    /// Day the manager starts buying in the linear regime.
    pub d_start: f64,
    /// Leader front-loading constant, days.
    pub tau: f64,
    /// Fund assets under management, USD. Only used for drag.
    pub aum: f64,
}

impl ScenarioParams {
    pub fn new(d_shares: f64, t_n: f64) -> Self {
        Self {
            d_shares,
            t_shares: 0.0,
            t_n,
            lambda: 0.0,
            fraction: 0.0,
            d_start: 0.0,
            tau: 1.0,
            aum: 5e10,
        }
    }

    /// Set a trader participation rate, deriving `t_shares = fraction * D`.
    pub fn with_participation(mut self, fraction: f64) -> Self {
        self.fraction = fraction;
        self.t_shares = fraction * self.d_shares;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("d_shares", self.d_shares),
            ("t_shares", self.t_shares),
            ("t_n", self.t_n),
            ("lambda", self.lambda),
            ("fraction", self.fraction),
            ("d_start", self.d_start),
            ("tau", self.tau),
            ("aum", self.aum),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("ScenarioParams.{name}")));
            }
        }
        if self.d_shares <= 0.0 {
            return Err(Error::InvalidParameter("d_shares must be > 0".into()));
        }
        if self.t_shares < 0.0 {
            return Err(Error::InvalidParameter("t_shares must be >= 0".into()));
        }
        if self.t_n <= 0.0 {
            return Err(Error::InvalidParameter("t_n must be > 0".into()));
        }
        if self.lambda < 0.0 {
            return Err(Error::InvalidParameter("lambda must be >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.fraction) {
            return Err(Error::InvalidParameter("fraction must be in [0, 1]".into()));
        }
        if self.d_start < 0.0 || self.d_start >= self.t_n {
            return Err(Error::InvalidParameter("need 0 <= d_start < t_n".into()));
        }
        if self.tau <= 0.0 {
            return Err(Error::InvalidParameter("tau must be > 0".into()));
        }
        if self.aum <= 0.0 {
            return Err(Error::InvalidParameter("aum must be > 0".into()));
        }
        Ok(())
    }
}

/// How the deviation penalty scales before entering the schedule ODEs.
///
/// The penalty and cost terms live on very different scales, so the default
/// multiplies lambda by the benchmark cost. `Raw` leaves lambda untouched for
/// A/B comparisons. This is the single place the convention is encoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LambdaScaling {
    #[default]
    BenchmarkCost,
    Raw,
}

impl LambdaScaling {
    /// Effective penalty weight, USD/day.
    pub fn lambda_eff(self, params: &ImpactParams, scen: &ScenarioParams) -> f64 {
        match self {
            LambdaScaling::BenchmarkCost => scen.lambda * benchmark_cost(params, scen),
            LambdaScaling::Raw => scen.lambda,
        }
    }
}

/// Buy/sell side of an execution, fixing the sign of the half-spread.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TradeSide {
    Buy,
    Sell,
}

/// Execution price for a given cumulative flow and instantaneous rate.
pub fn execution_price(
    params: &ImpactParams,
    cum_flow: f64,
    rate: f64,
    side: TradeSide,
) -> Result<f64> {
    if !cum_flow.is_finite() || !rate.is_finite() {
        return Err(Error::NonFinite("execution_price flow/rate".into()));
    }
    let spread = match side {
        TradeSide::Buy => params.epsilon,
        TradeSide::Sell => -params.epsilon,
    };
    Ok(params.s0 + params.gamma * cum_flow + params.eta * rate + spread)
}

/// Per-share terms of buying the residual demand at the event at the
/// benchmark rate `(D - T) / dt_bench`.
pub fn benchmark_price_per_share(params: &ImpactParams, scen: &ScenarioParams) -> f64 {
    let d = scen.d_shares;
    let t = scen.t_shares;
    params.s0 + params.gamma * d + params.eta * (d - t) / params.dt_bench + params.epsilon
}

/// Cost of acquiring the full demand at the event under the benchmark rate
/// convention.
pub fn benchmark_cost(params: &ImpactParams, scen: &ScenarioParams) -> f64 {
    scen.d_shares * benchmark_price_per_share(params, scen)
}

/// Alternative benchmark: the residual `D - T` bought over the final day at a
/// constant rate, plus the trader block at the event mid (spread paid, no
/// temporary impact on the block).
pub fn residual_day_benchmark_cost(params: &ImpactParams, scen: &ScenarioParams) -> f64 {
    let d = scen.d_shares;
    let t = scen.t_shares;
    (d - t) * benchmark_price_per_share(params, scen)
        + t * (params.s0 + params.gamma * d + params.epsilon)
}

/// Trader sale proceeds at the event: the mid carries the full permanent
/// impact of the event demand; the temporary impact of event-day flow is
/// excluded and the half-spread is paid on the sell side.
pub fn trader_sale_proceeds(params: &ImpactParams, scen: &ScenarioParams) -> f64 {
    scen.t_shares * (params.s0 + params.gamma * scen.d_shares - params.epsilon)
}

/// Trader sale proceeds including the temporary impact of the residual
/// event-day flow at the benchmark rate.
pub fn trader_sale_proceeds_with_impact(params: &ImpactParams, scen: &ScenarioParams) -> f64 {
    let d = scen.d_shares;
    let t = scen.t_shares;
    t * (params.s0 + params.gamma * d + params.eta * (d - t) / params.dt_bench - params.epsilon)
}

/// Continuous inventory trajectory: cumulative holdings and trading rate as
/// functions of time. Closed-form schedules implement this directly.
pub trait Trajectory {
    fn value(&self, t: f64) -> f64;
    fn rate(&self, t: f64) -> f64;
}

/// The identically-zero trajectory.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroTrajectory;

impl Trajectory for ZeroTrajectory {
    fn value(&self, _t: f64) -> f64 {
        0.0
    }
    fn rate(&self, _t: f64) -> f64 {
        0.0
    }
}

/// Straight-line accumulation to `terminal` over `[0, horizon]`.
#[derive(Debug, Clone, Copy)]
pub struct LinearRamp {
    pub terminal: f64,
    pub horizon: f64,
}

impl Trajectory for LinearRamp {
    fn value(&self, t: f64) -> f64 {
        self.terminal * t / self.horizon
    }
    fn rate(&self, _t: f64) -> f64 {
        self.terminal / self.horizon
    }
}

/// A sampled inventory trajectory on a strictly increasing grid over
/// `[0, t_n]`, the common currency between solvers and evaluators. Holdings
/// may overshoot the declared terminal mid-path; only the endpoint is pinned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InventoryPath {
    pub times: Vec<f64>,
    pub shares: Vec<f64>,
    /// Analytic trading rates at the grid nodes, when the generating formula
    /// supplies them. Functionals fall back to central differences otherwise.
    pub rates: Option<Vec<f64>>,
    /// Declared endpoint, shares.
    pub terminal: f64,
}

impl InventoryPath {
    pub fn new(
        times: Vec<f64>,
        shares: Vec<f64>,
        rates: Option<Vec<f64>>,
        terminal: f64,
    ) -> Result<Self> {
        if times.len() < 2 || times.len() != shares.len() {
            return Err(Error::BadGrid(format!(
                "path needs matching times/shares of length >= 2, got {}/{}",
                times.len(),
                shares.len()
            )));
        }
        if let Some(r) = &rates {
            if r.len() != times.len() {
                return Err(Error::BadGrid("rates length differs from grid".into()));
            }
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::BadGrid("times must be strictly increasing".into()));
            }
        }
        if times[0] != 0.0 {
            return Err(Error::BadGrid("path must start at t = 0".into()));
        }
        // Closed-form samples carry rounding noise at t = 0.
        if shares[0].abs() > 1e-9 * terminal.abs().max(1.0) {
            return Err(Error::InvalidParameter("path must start at zero shares".into()));
        }
        let end = *shares.last().unwrap();
        if (end - terminal).abs() > 1e-6 * terminal.abs().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "path ends at {end}, declared terminal {terminal}"
            )));
        }
        for v in times.iter().chain(shares.iter()) {
            if !v.is_finite() {
                return Err(Error::NonFinite("path sample".into()));
            }
        }
        Ok(Self {
            times,
            shares,
            rates,
            terminal,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn end_shares(&self) -> f64 {
        *self.shares.last().unwrap()
    }

    /// Uniform grid step, or an error when spacing drifts.
    pub fn step(&self) -> Result<f64> {
        let h = self.times[1] - self.times[0];
        let tol = 1e-9 * self.horizon().max(1.0);
        for (i, w) in self.times.windows(2).enumerate() {
            if ((w[1] - w[0]) - h).abs() > tol {
                return Err(Error::BadGrid(format!("grid not uniform near index {i}")));
            }
        }
        Ok(h)
    }

    /// Nodal trading rates: the carried analytic values, or second-order
    /// finite differences (one-sided at the endpoints).
    pub fn node_rates(&self) -> Result<Vec<f64>> {
        if let Some(r) = &self.rates {
            return Ok(r.clone());
        }
        let h = self.step()?;
        let n = self.len();
        if n < 3 {
            return Err(Error::BadGrid("need >= 3 nodes to difference".into()));
        }
        let s = &self.shares;
        let mut out = Vec::with_capacity(n);
        out.push((-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * h));
        for i in 1..n - 1 {
            out.push((s[i + 1] - s[i - 1]) / (2.0 * h));
        }
        out.push((3.0 * s[n - 1] - 4.0 * s[n - 2] + s[n - 3]) / (2.0 * h));
        Ok(out)
    }
}

/// Sample a trajectory on an `n`-point uniform grid, carrying analytic rates.
pub fn sample_trajectory(
    traj: &dyn Trajectory,
    t_n: f64,
    n: usize,
    terminal: f64,
) -> Result<InventoryPath> {
    if n < 3 {
        return Err(Error::BadGrid("need at least 3 samples".into()));
    }
    let times = quad::grid(0.0, t_n, n);
    let shares: Vec<f64> = times.iter().map(|&t| traj.value(t)).collect();
    let rates: Vec<f64> = times.iter().map(|&t| traj.rate(t)).collect();
    InventoryPath::new(times, shares, Some(rates), terminal)
}

/// Which participant's flow multiplies the execution price in a cost
/// integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostLeg {
    Manager,
    Trader,
}

fn common_grid<'a>(x: &'a InventoryPath, y: &'a InventoryPath) -> Result<(&'a [f64], f64)> {
    if x.len() != y.len() {
        return Err(Error::GridMismatch(format!(
            "paths have {} and {} nodes",
            x.len(),
            y.len()
        )));
    }
    let tol = 1e-9 * x.horizon().max(1.0);
    for (a, b) in x.times.iter().zip(&y.times) {
        if (a - b).abs() > tol {
            return Err(Error::GridMismatch("paths sampled on different grids".into()));
        }
    }
    let h = x.step()?;
    y.step()?;
    Ok((&x.times, h))
}

/// Composite-Simpson value of the selected cost integrand over the paths'
/// shared uniform grid. No terminal top-up is applied here.
pub fn leg_cost_integral(
    params: &ImpactParams,
    x: &InventoryPath,
    y: &InventoryPath,
    leg: CostLeg,
) -> Result<f64> {
    let (_, h) = common_grid(x, y)?;
    let rx = x.node_rates()?;
    let ry = y.node_rates()?;
    let values: Vec<f64> = (0..x.len())
        .map(|i| {
            let price =
                params.s0 + params.gamma * (x.shares[i] + y.shares[i]) + params.eta * (rx[i] + ry[i])
                    + params.epsilon;
            let own = match leg {
                CostLeg::Manager => ry[i],
                CostLeg::Trader => rx[i],
            };
            price * own
        })
        .collect();
    quad::simpson(&values, h)
}

/// Manager acquisition cost along the given paths. When the manager path ends
/// below the demand, the residual shares are costed at benchmark terms.
pub fn manager_cost(
    params: &ImpactParams,
    scen: &ScenarioParams,
    x: &InventoryPath,
    y: &InventoryPath,
) -> Result<f64> {
    let mut cost = leg_cost_integral(params, x, y, CostLeg::Manager)?;
    let shortfall = scen.d_shares - y.end_shares();
    if shortfall > 1e-12 * scen.d_shares {
        cost += shortfall * benchmark_price_per_share(params, scen);
    }
    Ok(cost)
}

/// Trader acquisition cost and round-trip profit along the given paths.
pub fn trader_cost_and_profit(
    params: &ImpactParams,
    scen: &ScenarioParams,
    x: &InventoryPath,
    y: &InventoryPath,
) -> Result<(f64, f64)> {
    let t = scen.t_shares;
    if (x.end_shares() - t).abs() > 1e-6 * t.abs().max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "trader path ends at {}, scenario t_shares is {t}",
            x.end_shares()
        )));
    }
    let cost = leg_cost_integral(params, x, y, CostLeg::Trader)?;
    Ok((cost, trader_sale_proceeds(params, scen) - cost))
}

/// Tracking error in basis points accumulated by holding the name early.
pub fn tracking_error_bps(
    params: &ImpactParams,
    scen: &ScenarioParams,
    y: &InventoryPath,
) -> Result<f64> {
    let h = y.step()?;
    let values: Vec<f64> = y
        .shares
        .iter()
        .map(|&s| (s / scen.d_shares).powi(2))
        .collect();
    let integral = quad::simpson(&values, h)?;
    Ok(1e4 * params.w_bench * params.sigma_daily() * integral.max(0.0).sqrt())
}

/// Additional annualized tracking error introduced by a return adjustment of
/// mean square `mean_sq_dr` over `t_n` of the 252 rolling days.
pub fn expost_te_adjustment(te_base: f64, t_n: f64, mean_sq_dr: f64) -> f64 {
    (te_base * te_base + t_n / TRADING_DAYS_PER_YEAR * mean_sq_dr).sqrt() - te_base
}

/// Annualized fund-return drag from forgoing the given savings.
pub fn drag_bps(savings_usd: f64, aum: f64) -> f64 {
    1e4 * savings_usd / aum
}

/// Cost, savings, tracking error, and trader profit for one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub cost_usd: f64,
    pub benchmark_cost_usd: f64,
    pub savings_usd: f64,
    pub savings_bps: f64,
    pub tracking_error_bps: f64,
    pub trader_profit_usd: f64,
    pub trader_profit_bps: f64,
}

impl EvaluationReport {
    /// Assemble a report from evaluated costs. Savings are the benchmark cost
    /// minus the manager cost by definition; profit bps are relative to the
    /// sale proceeds.
    pub fn from_costs(
        params: &ImpactParams,
        scen: &ScenarioParams,
        manager_cost_usd: f64,
        te_bps: f64,
        trader_cost_usd: f64,
    ) -> Self {
        let bench = benchmark_cost(params, scen);
        let savings = bench - manager_cost_usd;
        let proceeds = trader_sale_proceeds(params, scen);
        let profit = proceeds - trader_cost_usd;
        Self {
            cost_usd: manager_cost_usd,
            benchmark_cost_usd: bench,
            savings_usd: savings,
            savings_bps: if bench != 0.0 { 1e4 * savings / bench } else { 0.0 },
            tracking_error_bps: te_bps,
            trader_profit_usd: if scen.t_shares > 0.0 { profit } else { 0.0 },
            trader_profit_bps: if proceeds > 0.0 { 1e4 * profit / proceeds } else { 0.0 },
        }
    }
}

/// Simpson integral of the selected cost integrand over `[a, b]` with
/// analytic trajectory evaluation. Splitting the window at rate breakpoints
/// keeps the panel rule exact for piecewise-affine integrands.
pub fn flow_cost_window(
    params: &ImpactParams,
    x: &dyn Trajectory,
    y: &dyn Trajectory,
    leg: CostLeg,
    a: f64,
    b: f64,
    n: usize,
) -> Result<f64> {
    let own: &dyn Trajectory = match leg {
        CostLeg::Manager => y,
        CostLeg::Trader => x,
    };
    quad::simpson_fn(
        |t| {
            let price = params.s0
                + params.gamma * (x.value(t) + y.value(t))
                + params.eta * (x.rate(t) + y.rate(t))
                + params.epsilon;
            price * own.rate(t)
        },
        a,
        b,
        n,
    )
}

/// Simpson integral of `(y / D)^2` over `[0, t_n]` with analytic evaluation.
pub fn te_integral_window(
    y: &dyn Trajectory,
    d_shares: f64,
    t_n: f64,
    n: usize,
) -> Result<f64> {
    quad::simpson_fn(|t| (y.value(t) / d_shares).powi(2), 0.0, t_n, n)
}
