//! Simultaneous-optimization equilibrium for the trader and the manager.
//!
//! Eliminating the trader's stationarity condition reduces the coupled system
//! to one second-order linear ODE for the manager schedule,
//! `(3/2) eta y'' - gamma y' - (gamma^2 / (2 eta) + 2 lambda_eff / D^2) y
//!  + gamma K1 = 0`,
//! whose characteristic roots and mode amplitudes are computed here. The
//! trader schedule follows from the integrated stationarity condition
//! `x' = -y'/2 - (gamma / (2 eta)) y + K1`, with `K1` pinned by the trader's
//! terminal inventory.

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::market::{
    sample_trajectory, ImpactParams, InventoryPath, LambdaScaling, ScenarioParams, Trajectory,
};

/// Closed-form equilibrium schedules for both participants.
#[derive(Debug, Clone, Copy)]
pub struct NashSolution {
    /// Characteristic roots, 1/day. `r1 > 0 > r2` whenever gamma > 0.
    pub r1: f64,
    pub r2: f64,
    /// Mode amplitudes, shares.
    pub c1: f64,
    pub c2: f64,
    /// End-anchored growing-mode amplitude `c1 * exp(r1 t_n)`. Pointwise
    /// evaluation uses `c1_end * exp(r1 (t - t_n))` so rounding stays
    /// proportional to the local value rather than the mode's full range.
    pub c1_end: f64,
    /// Trader integration constant, shares/day.
    pub k1: f64,
    /// Particular-solution constant, shares.
    pub y_p: f64,
    pub lambda_eff: f64,
    pub gamma: f64,
    pub eta: f64,
    pub d_shares: f64,
    pub t_shares: f64,
    pub t_n: f64,
    /// Both impact terms vanish: schedules degenerate to straight ramps.
    pub degenerate: bool,
}

impl NashSolution {
    pub fn y_value(&self, t: f64) -> f64 {
        if self.degenerate {
            return self.d_shares * t / self.t_n;
        }
        self.y_p
            + self.c1_end * (self.r1 * (t - self.t_n)).exp()
            + self.c2 * (self.r2 * t).exp()
    }

    pub fn y_rate(&self, t: f64) -> f64 {
        if self.degenerate {
            return self.d_shares / self.t_n;
        }
        self.c1_end * self.r1 * (self.r1 * (t - self.t_n)).exp()
            + self.c2 * self.r2 * (self.r2 * t).exp()
    }

    pub fn x_value(&self, t: f64) -> f64 {
        if self.degenerate {
            return self.t_shares * t / self.t_n;
        }
        let g = self.gamma / (2.0 * self.eta);
        -(0.5 + g / self.r1) * (self.c1_end * (self.r1 * (t - self.t_n)).exp() - self.c1)
            - (0.5 + g / self.r2) * self.c2 * ((self.r2 * t).exp() - 1.0)
            - g * self.y_p * t
            + self.k1 * t
    }

    pub fn x_rate(&self, t: f64) -> f64 {
        if self.degenerate {
            return self.t_shares / self.t_n;
        }
        // Integrated trader stationarity condition.
        -0.5 * self.y_rate(t) - self.gamma / (2.0 * self.eta) * self.y_value(t) + self.k1
    }

    pub fn manager_schedule(&self) -> ManagerSchedule<'_> {
        ManagerSchedule(self)
    }

    pub fn trader_schedule(&self) -> TraderSchedule<'_> {
        TraderSchedule(self)
    }

    fn polys(&self) -> (ExpPoly, ExpPoly) {
        let mut y = ExpPoly::zero();
        let mut x = ExpPoly::zero();
        if self.degenerate {
            y.push(self.d_shares / self.t_n, 1, 0.0);
            x.push(self.t_shares / self.t_n, 1, 0.0);
            return (x, y);
        }
        y.push(self.y_p, 0, 0.0);
        y.push(self.c1, 0, self.r1);
        y.push(self.c2, 0, self.r2);
        let g = self.gamma / (2.0 * self.eta);
        let a1 = 0.5 + g / self.r1;
        let a2 = 0.5 + g / self.r2;
        x.push(-a1 * self.c1, 0, self.r1);
        x.push(a1 * self.c1, 0, 0.0);
        x.push(-a2 * self.c2, 0, self.r2);
        x.push(a2 * self.c2, 0, 0.0);
        x.push(self.k1 - g * self.y_p, 1, 0.0);
        (x, y)
    }
}

pub struct ManagerSchedule<'a>(&'a NashSolution);
pub struct TraderSchedule<'a>(&'a NashSolution);

impl Trajectory for ManagerSchedule<'_> {
    fn value(&self, t: f64) -> f64 {
        self.0.y_value(t)
    }
    fn rate(&self, t: f64) -> f64 {
        self.0.y_rate(t)
    }
}

impl Trajectory for TraderSchedule<'_> {
    fn value(&self, t: f64) -> f64 {
        self.0.x_value(t)
    }
    fn rate(&self, t: f64) -> f64 {
        self.0.x_rate(t)
    }
}

struct Assembly {
    r1: f64,
    r2: f64,
    q: f64,
    b_exp: f64,
    c_exp: f64,
    c10: f64,
    c11: f64,
    c20: f64,
    c21: f64,
    /// x(t_n) = intercept + slope * K1.
    intercept: f64,
    slope: f64,
}

fn assemble(params: &ImpactParams, scen: &ScenarioParams, lambda_eff: f64) -> Result<Assembly> {
    let gamma = params.gamma;
    let eta = params.eta;
    let d = scen.d_shares;
    let t_n = scen.t_n;
    let disc = (4.0 * gamma * gamma + 12.0 * eta * lambda_eff / (d * d)).sqrt();
    let r1 = (gamma + disc) / (3.0 * eta);
    let r2 = (gamma - disc) / (3.0 * eta);
    if (r1 - r2).abs() * t_n < 1e-12 {
        return Err(Error::Degenerate(
            "characteristic roots coincide; use the ramp special case".into(),
        ));
    }
    if r1 * t_n > 700.0 || r2 * t_n < -700.0 {
        return Err(Error::Overflow(format!(
            "characteristic exponent |r t_n| = {:.1} exceeds 700; rescale lambda",
            (r1 * t_n).max(-r2 * t_n)
        )));
    }
    let b = (r1 * t_n).exp();
    let c = (r2 * t_n).exp();
    let denom = b - c;
    // y_p = q * K1.
    let q = gamma / (gamma * gamma / (2.0 * eta) + 2.0 * lambda_eff / (d * d));
    let c10 = d / denom;
    let c11 = q * (c - 1.0) / denom;
    let c20 = -d / denom;
    let c21 = -q * (b - 1.0) / denom;
    let g = gamma / (2.0 * eta);
    let a1 = -(0.5 + g / r1) * (b - 1.0);
    let a2 = -(0.5 + g / r2) * (c - 1.0);
    Ok(Assembly {
        r1,
        r2,
        q,
        b_exp: b,
        c_exp: c,
        c10,
        c11,
        c20,
        c21,
        intercept: a1 * c10 + a2 * c20,
        slope: a1 * c11 + a2 * c21 + t_n * (1.0 - g * q),
    })
}

fn solution_from_k1(
    params: &ImpactParams,
    scen: &ScenarioParams,
    lambda_eff: f64,
    asm: &Assembly,
    k1: f64,
) -> NashSolution {
    let y_p = asm.q * k1;
    NashSolution {
        r1: asm.r1,
        r2: asm.r2,
        c1: asm.c10 + asm.c11 * k1,
        c2: asm.c20 + asm.c21 * k1,
        c1_end: (scen.d_shares + y_p * (asm.c_exp - 1.0)) / (1.0 - asm.c_exp / asm.b_exp),
        k1,
        y_p,
        lambda_eff,
        gamma: params.gamma,
        eta: params.eta,
        d_shares: scen.d_shares,
        t_shares: scen.t_shares,
        t_n: scen.t_n,
        degenerate: false,
    }
}

/// Solve the simultaneous game. The trader terminal inventory is
/// `scen.t_shares` (set from the participation rate in game configs).
pub fn solve_nash(
    params: &ImpactParams,
    scen: &ScenarioParams,
    scaling: LambdaScaling,
) -> Result<NashSolution> {
    params.validate()?;
    scen.validate()?;
    let lambda_eff = scaling.lambda_eff(params, scen);
    if params.gamma == 0.0 && lambda_eff == 0.0 {
        return Ok(NashSolution {
            r1: 0.0,
            r2: 0.0,
            c1: 0.0,
            c2: 0.0,
            c1_end: 0.0,
            k1: scen.t_shares / scen.t_n,
            y_p: 0.0,
            lambda_eff,
            gamma: params.gamma,
            eta: params.eta,
            d_shares: scen.d_shares,
            t_shares: scen.t_shares,
            t_n: scen.t_n,
            degenerate: true,
        });
    }
    let asm = assemble(params, scen, lambda_eff)?;
    if asm.slope.abs() < 1e-300 {
        return Err(Error::Degenerate("terminal condition insensitive to K1".into()));
    }
    let k1 = (scen.t_shares - asm.intercept) / asm.slope;
    Ok(solution_from_k1(params, scen, lambda_eff, &asm, k1))
}

/// Bisection fallback for `K1`, bracketing in `[-10 D / t_n, 10 D / t_n]`.
/// The terminal condition is affine in `K1`, so this exists only to
/// cross-check the direct assembly.
pub fn solve_nash_bisection(
    params: &ImpactParams,
    scen: &ScenarioParams,
    scaling: LambdaScaling,
) -> Result<NashSolution> {
    params.validate()?;
    scen.validate()?;
    let lambda_eff = scaling.lambda_eff(params, scen);
    if params.gamma == 0.0 && lambda_eff == 0.0 {
        return solve_nash(params, scen, scaling);
    }
    let asm = assemble(params, scen, lambda_eff)?;
    let shortfall = |k1: f64| -> f64 {
        let sol = solution_from_k1(params, scen, lambda_eff, &asm, k1);
        sol.x_value(scen.t_n) - scen.t_shares
    };
    let mut lo = -10.0 * scen.d_shares / scen.t_n;
    let mut hi = 10.0 * scen.d_shares / scen.t_n;
    let (flo, fhi) = (shortfall(lo), shortfall(hi));
    if flo == 0.0 {
        return Ok(solution_from_k1(params, scen, lambda_eff, &asm, lo));
    }
    if flo * fhi > 0.0 {
        return Err(Error::Degenerate("bisection bracket does not straddle".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if shortfall(mid) * flo <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(solution_from_k1(params, scen, lambda_eff, &asm, 0.5 * (lo + hi)))
}

/// Sample the trader schedule.
pub fn nash_x_path(sol: &NashSolution, grid_size: usize) -> Result<InventoryPath> {
    sample_trajectory(&sol.trader_schedule(), sol.t_n, grid_size, sol.t_shares)
}

/// Sample the manager schedule.
pub fn nash_y_path(sol: &NashSolution, grid_size: usize) -> Result<InventoryPath> {
    sample_trajectory(&sol.manager_schedule(), sol.t_n, grid_size, sol.d_shares)
}

/// Exact manager acquisition cost along the equilibrium schedules.
pub fn nash_manager_cost(params: &ImpactParams, sol: &NashSolution) -> f64 {
    let (x, y) = sol.polys();
    cost_poly(params, &x, &y, &y.derivative()).integral(sol.t_n)
}

/// Exact trader acquisition cost along the equilibrium schedules.
pub fn nash_trader_cost(params: &ImpactParams, sol: &NashSolution) -> f64 {
    let (x, y) = sol.polys();
    cost_poly(params, &x, &y, &x.derivative()).integral(sol.t_n)
}

fn cost_poly(params: &ImpactParams, x: &ExpPoly, y: &ExpPoly, own_rate: &ExpPoly) -> ExpPoly {
    let flow = x.add(y);
    let total_rate = x.derivative().add(&y.derivative());
    ExpPoly::constant(params.s0 + params.epsilon)
        .add(&flow.scale(params.gamma))
        .add(&total_rate.scale(params.eta))
        .mul(own_rate)
}

/// Scenario evaluation under both benchmark and both proceeds conventions.
#[derive(Debug, Clone, Copy)]
pub struct GameEvaluation {
    pub report: crate::market::EvaluationReport,
    pub manager_cost_usd: f64,
    pub trader_cost_usd: f64,
    /// Savings against the residual-day benchmark.
    pub residual_savings_usd: f64,
    pub residual_savings_bps: f64,
    /// Profit when the block is sold at the event execution price including
    /// the temporary impact of the residual flow.
    pub impact_profit_usd: f64,
    pub impact_profit_bps: f64,
}

pub(crate) fn evaluate_game(
    params: &ImpactParams,
    scen: &ScenarioParams,
    manager_cost_usd: f64,
    trader_cost_usd: f64,
    te_bps: f64,
) -> GameEvaluation {
    use crate::market as m;
    let report =
        m::EvaluationReport::from_costs(params, scen, manager_cost_usd, te_bps, trader_cost_usd);
    let residual_bench = m::residual_day_benchmark_cost(params, scen);
    let residual_savings = residual_bench - manager_cost_usd;
    let impact_proceeds = m::trader_sale_proceeds_with_impact(params, scen);
    let impact_profit = impact_proceeds - trader_cost_usd;
    GameEvaluation {
        report,
        manager_cost_usd,
        trader_cost_usd,
        residual_savings_usd: residual_savings,
        residual_savings_bps: if residual_bench != 0.0 {
            1e4 * residual_savings / residual_bench
        } else {
            0.0
        },
        impact_profit_usd: if scen.t_shares > 0.0 { impact_profit } else { 0.0 },
        impact_profit_bps: if impact_proceeds > 0.0 {
            1e4 * impact_profit / impact_proceeds
        } else {
            0.0
        },
    }
}

/// Evaluate an equilibrium: exact closed-form costs, quadrature tracking
/// error on `grid_size` points.
pub fn evaluate_nash(
    params: &ImpactParams,
    scen: &ScenarioParams,
    sol: &NashSolution,
    grid_size: usize,
) -> Result<GameEvaluation> {
    let manager = nash_manager_cost(params, sol);
    let trader = nash_trader_cost(params, sol);
    let integral = crate::market::te_integral_window(
        &sol.manager_schedule(),
        scen.d_shares,
        scen.t_n,
        grid_size,
    )?;
    let te = 1e4 * params.w_bench * params.sigma_daily() * integral.max(0.0).sqrt();
    Ok(evaluate_game(params, scen, manager, trader, te))
}
