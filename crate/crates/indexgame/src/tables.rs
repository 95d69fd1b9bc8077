//! Result-row serialization: a fixed-order CSV schema (machine readable),
//! a plain-text rendering (human readable), and a parser for round trips.
//! Floats are written with 10 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One evaluated scenario. Columns not applicable to a regime hold zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRow {
    pub scenario: usize,
    pub regime: String,
    pub lambda: f64,
    pub lambda_eff: f64,
    pub demand_shares: f64,
    pub trader_shares: f64,
    pub participation: f64,
    pub manager_fraction: f64,
    pub start_day: f64,
    pub tau: f64,
    pub grid: usize,
    pub benchmark_usd: f64,
    pub residual_benchmark_usd: f64,
    pub cost_usd: f64,
    pub savings_usd: f64,
    pub savings_bps: f64,
    pub residual_savings_usd: f64,
    pub residual_savings_bps: f64,
    pub te_bps: f64,
    pub trader_cost_usd: f64,
    pub trader_profit_usd: f64,
    pub trader_profit_bps: f64,
    pub impact_profit_usd: f64,
    pub impact_profit_bps: f64,
    pub verified: String,
    pub status: String,
}

pub const CSV_HEADER: &str = "scenario,regime,lambda,lambda_eff,demand_shares,trader_shares,\
participation,manager_fraction,start_day,tau,grid,benchmark_usd,residual_benchmark_usd,\
cost_usd,savings_usd,savings_bps,residual_savings_usd,residual_savings_bps,te_bps,\
trader_cost_usd,trader_profit_usd,trader_profit_bps,impact_profit_usd,impact_profit_bps,\
verified,status";

/// Format a float with 10 significant digits, stable across runs.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.9e}")
    }
}

fn row_line(r: &ScenarioRow) -> String {
    let f = fmt_f64;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.scenario,
        r.regime,
        f(r.lambda),
        f(r.lambda_eff),
        f(r.demand_shares),
        f(r.trader_shares),
        f(r.participation),
        f(r.manager_fraction),
        f(r.start_day),
        f(r.tau),
        r.grid,
        f(r.benchmark_usd),
        f(r.residual_benchmark_usd),
        f(r.cost_usd),
        f(r.savings_usd),
        f(r.savings_bps),
        f(r.residual_savings_usd),
        f(r.residual_savings_bps),
        f(r.te_bps),
        f(r.trader_cost_usd),
        f(r.trader_profit_usd),
        f(r.trader_profit_bps),
        f(r.impact_profit_usd),
        f(r.impact_profit_bps),
        r.verified,
        r.status
    )
}

/// Render rows as CSV text with the fixed header.
pub fn rows_to_csv(rows: &[ScenarioRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&row_line(r));
        out.push('\n');
    }
    out
}

pub fn write_rows_csv(path: &Path, rows: &[ScenarioRow]) -> Result<()> {
    std::fs::write(path, rows_to_csv(rows))?;
    Ok(())
}

fn parse_f64(field: &str, name: &str) -> Result<f64> {
    field
        .parse()
        .map_err(|_| Error::Config(format!("bad float in column {name}: {field:?}")))
}

/// Parse CSV text produced by [`rows_to_csv`].
pub fn rows_from_csv(text: &str) -> Result<Vec<ScenarioRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(Error::Config(format!(
                "unexpected results header: {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 26 {
            return Err(Error::Config(format!(
                "row {idx}: expected 26 columns, got {}",
                cols.len()
            )));
        }
        rows.push(ScenarioRow {
            scenario: cols[0]
                .parse()
                .map_err(|_| Error::Config(format!("bad scenario id {:?}", cols[0])))?,
            regime: cols[1].to_string(),
            lambda: parse_f64(cols[2], "lambda")?,
            lambda_eff: parse_f64(cols[3], "lambda_eff")?,
            demand_shares: parse_f64(cols[4], "demand_shares")?,
            trader_shares: parse_f64(cols[5], "trader_shares")?,
            participation: parse_f64(cols[6], "participation")?,
            manager_fraction: parse_f64(cols[7], "manager_fraction")?,
            start_day: parse_f64(cols[8], "start_day")?,
            tau: parse_f64(cols[9], "tau")?,
            grid: cols[10]
                .parse()
                .map_err(|_| Error::Config(format!("bad grid {:?}", cols[10])))?,
            benchmark_usd: parse_f64(cols[11], "benchmark_usd")?,
            residual_benchmark_usd: parse_f64(cols[12], "residual_benchmark_usd")?,
            cost_usd: parse_f64(cols[13], "cost_usd")?,
            savings_usd: parse_f64(cols[14], "savings_usd")?,
            savings_bps: parse_f64(cols[15], "savings_bps")?,
            residual_savings_usd: parse_f64(cols[16], "residual_savings_usd")?,
            residual_savings_bps: parse_f64(cols[17], "residual_savings_bps")?,
            te_bps: parse_f64(cols[18], "te_bps")?,
            trader_cost_usd: parse_f64(cols[19], "trader_cost_usd")?,
            trader_profit_usd: parse_f64(cols[20], "trader_profit_usd")?,
            trader_profit_bps: parse_f64(cols[21], "trader_profit_bps")?,
            impact_profit_usd: parse_f64(cols[22], "impact_profit_usd")?,
            impact_profit_bps: parse_f64(cols[23], "impact_profit_bps")?,
            verified: cols[24].to_string(),
            status: cols[25].to_string(),
        });
    }
    Ok(rows)
}

pub fn read_rows_csv(path: &Path) -> Result<Vec<ScenarioRow>> {
    rows_from_csv(&std::fs::read_to_string(path)?)
}

/// Plain-text rendering with the headline columns.
pub fn rows_to_text(rows: &[ScenarioRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>4} {:>12} {:>8} {:>12} {:>6} {:>6} {:>14} {:>10} {:>8} {:>14} {:>10}  {}",
        "#", "regime", "lambda", "demand", "f", "tau", "savings_usd", "sav_bps", "te_bps",
        "profit_usd", "prof_bps", "status"
    );
    for r in rows {
        let f = if r.regime == "linear" {
            r.manager_fraction
        } else {
            r.participation
        };
        let _ = writeln!(
            out,
            "{:>4} {:>12} {:>8.4} {:>12.3e} {:>6.2} {:>6.2} {:>14.4e} {:>10.2} {:>8.3} {:>14.4e} {:>10.2}  {}",
            r.scenario,
            r.regime,
            r.lambda,
            r.demand_shares,
            f,
            r.tau,
            r.savings_usd,
            r.savings_bps,
            r.te_bps,
            r.trader_profit_usd,
            r.trader_profit_bps,
            r.status
        );
    }
    out
}
