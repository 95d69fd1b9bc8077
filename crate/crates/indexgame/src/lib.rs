//! Execution-timing games around index reconstitution events.
//!
//! A passive manager must hold the added name by the event; a trader can
//! accumulate inventory after the announcement and provide liquidity at the
//! event. This crate implements the linear-impact execution model behind that
//! interaction, closed-form optimal inventory schedules under four regimes
//! (no trader, linear heuristics, simultaneous equilibrium, leader-follower),
//! independent numerical verification for every closed form, and a scenario
//! runner with a CLI.
//!
//! Units: days, shares, USD.

pub mod config;
pub mod error;
mod exppoly;
pub mod market;
pub mod nash;
pub mod quad;
pub mod runner;
pub mod stackelberg;
pub mod strategies;
pub mod tables;
pub mod verify;

pub use error::{Error, Result};
pub use market::{
    benchmark_cost, drag_bps, execution_price, expost_te_adjustment, manager_cost,
    tracking_error_bps, trader_cost_and_profit, EvaluationReport, ImpactParams, InventoryPath,
    LambdaScaling, ScenarioParams,
};
