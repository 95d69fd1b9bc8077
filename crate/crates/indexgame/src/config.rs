//! Run configuration: a versioned JSON document describing one sweep.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{ImpactParams, LambdaScaling};

pub const SCHEMA_VERSION: u32 = 1;

/// Named impact-parameter presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[clap(rename_all = "kebab-case")]
pub enum Preset {
    #[default]
    Core,
    /// Core values with permanent impact an order of magnitude lighter.
    CoreLowGamma,
    LargeCap,
    MidCap,
    SmallCap,
}

impl Preset {
    pub fn params(self) -> ImpactParams {
        match self {
            Preset::Core => ImpactParams::core(),
            Preset::CoreLowGamma => ImpactParams::core_low_gamma(),
            Preset::LargeCap => ImpactParams::large_cap(),
            Preset::MidCap => ImpactParams::mid_cap(),
            Preset::SmallCap => ImpactParams::small_cap(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Core => "core",
            Preset::CoreLowGamma => "core-low-gamma",
            Preset::LargeCap => "large-cap",
            Preset::MidCap => "mid-cap",
            Preset::SmallCap => "small-cap",
        }
    }
}

/// Sweep regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunRegime {
    NoTrader,
    Linear,
    Nash,
    Stackelberg,
}

impl RunRegime {
    pub fn name(self) -> &'static str {
        match self {
            RunRegime::NoTrader => "no_trader",
            RunRegime::Linear => "linear",
            RunRegime::Nash => "nash",
            RunRegime::Stackelberg => "stackelberg",
        }
    }
}

/// How schedules are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolutionMethod {
    /// Closed-form schedules evaluated on the grid.
    #[default]
    Analytic,
    /// Discretized optimization on the grid itself (solo regime only);
    /// coarse grids model trading constrained to the grid resolution.
    GridOptimum,
}

/// Per-field overrides applied on top of the preset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpactOverrides {
    pub s0: Option<f64>,
    pub gamma: Option<f64>,
    pub eta: Option<f64>,
    pub epsilon: Option<f64>,
    pub sigma_annual: Option<f64>,
    pub w_bench: Option<f64>,
    pub dt_bench: Option<f64>,
}

impl ImpactOverrides {
    pub fn apply(&self, mut p: ImpactParams) -> ImpactParams {
        if let Some(v) = self.s0 {
            p.s0 = v;
        }
        if let Some(v) = self.gamma {
            p.gamma = v;
        }
        if let Some(v) = self.eta {
            p.eta = v;
        }
        if let Some(v) = self.epsilon {
            p.epsilon = v;
        }
        if let Some(v) = self.sigma_annual {
            p.sigma_annual = v;
        }
        if let Some(v) = self.w_bench {
            p.w_bench = v;
        }
        if let Some(v) = self.dt_bench {
            p.dt_bench = v;
        }
        p
    }

    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

fn default_horizon() -> f64 {
    10.0
}
fn default_aum() -> f64 {
    5e10
}
fn default_grid() -> usize {
    2001
}
fn default_true() -> bool {
    true
}

/// One sweep: the cross-product of the per-regime parameter lists.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    #[serde(default)]
    pub preset: Preset,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub impact: Option<ImpactOverrides>,
    pub regime: RunRegime,
    #[serde(default = "default_horizon")]
    pub horizon_days: f64,
    pub lambdas: Vec<f64>,
    pub demands: Vec<f64>,
    /// Trader participation rates (equilibrium regimes); T = f * D.
    #[serde(default)]
    pub trader_participations: Vec<f64>,
    /// Manager early fractions (linear regime).
    #[serde(default)]
    pub manager_fractions: Vec<f64>,
    /// Manager start days (linear regime).
    #[serde(default)]
    pub start_days: Vec<f64>,
    /// Leader front-loading constants (leader-follower regime).
    #[serde(default)]
    pub taus: Vec<f64>,
    /// Explicit trader inventories (linear regime).
    #[serde(default)]
    pub trader_shares: Vec<f64>,
    #[serde(default = "default_aum")]
    pub aum: f64,
    #[serde(default = "default_grid")]
    pub grid_size: usize,
    #[serde(default)]
    pub lambda_scaling: LambdaScaling,
    #[serde(default)]
    pub method: SolutionMethod,
    #[serde(default)]
    pub verify: bool,
    #[serde(default = "default_true")]
    pub write_paths: bool,
}

impl RunConfig {
    fn reference_base(regime: RunRegime) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            notes: None,
            preset: Preset::Core,
            impact: None,
            regime,
            horizon_days: 10.0,
            lambdas: vec![],
            demands: vec![5e6, 1e6],
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
        }
    }

    /// Reference sweep for the solo-manager regime. Uses the light
    /// permanent-impact preset and a daily grid optimum: published magnitudes
    /// for this regime saturate at the one-day trading resolution (their
    /// tracking error floors at the final-day ramp value), which the
    /// continuum schedule cannot produce.
    pub fn reference_solo() -> Self {
        Self {
            preset: Preset::CoreLowGamma,
            lambdas: vec![0.0, 0.4, 10.0],
            demands: vec![1e6, 5e6],
            grid_size: 11,
            method: SolutionMethod::GridOptimum,
            notes: Some(
                "daily trading resolution; penalty scaled by benchmark cost with the \
                 solo-schedule double weight"
                    .into(),
            ),
            ..Self::reference_base(RunRegime::NoTrader)
        }
    }

    /// Reference sweep for the simultaneous game.
    pub fn reference_simultaneous() -> Self {
        Self {
            lambdas: vec![0.0, 0.4, 1.0],
            trader_participations: vec![0.1, 0.2],
            notes: Some(
                "savings vs the event benchmark with trader netting; trader proceeds at the \
                 event execution price including residual temporary impact; profit bps over \
                 proceeds"
                    .into(),
            ),
            ..Self::reference_base(RunRegime::Nash)
        }
    }

    /// Reference sweep for the leader-follower game.
    pub fn reference_leader_follower() -> Self {
        Self {
            lambdas: vec![0.0, 0.4],
            trader_participations: vec![0.1, 0.2],
            taus: vec![1.0, 5.0],
            notes: Some(
                "conventions as in the simultaneous reference sweep; leader plan fixed"
                    .into(),
            ),
            ..Self::reference_base(RunRegime::Stackelberg)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Resolved impact parameters: preset plus overrides.
    pub fn impact_params(&self) -> ImpactParams {
        let base = self.preset.params();
        match &self.impact {
            Some(o) => o.apply(base),
            None => base,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.impact_params()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if !(self.horizon_days.is_finite() && self.horizon_days > 0.0) {
            return Err(Error::Config("horizon_days must be positive".into()));
        }
        if !(self.aum.is_finite() && self.aum > 0.0) {
            return Err(Error::Config("aum must be positive".into()));
        }
        if self.grid_size < 5 || self.grid_size % 2 == 0 {
            return Err(Error::Config(format!(
                "grid_size must be odd and >= 5, got {}",
                self.grid_size
            )));
        }
        let need = |name: &str, list: &[f64]| -> Result<()> {
            if list.is_empty() {
                return Err(Error::Config(format!(
                    "{name} must be non-empty for regime {}",
                    self.regime.name()
                )));
            }
            if list.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!("{name} contains a non-finite value")));
            }
            Ok(())
        };
        let forbid = |name: &str, list: &[f64]| -> Result<()> {
            if !list.is_empty() {
                return Err(Error::Config(format!(
                    "{name} does not apply to regime {}",
                    self.regime.name()
                )));
            }
            Ok(())
        };
        need("lambdas", &self.lambdas)?;
        need("demands", &self.demands)?;
        match self.regime {
            RunRegime::NoTrader => {
                forbid("trader_participations", &self.trader_participations)?;
                forbid("manager_fractions", &self.manager_fractions)?;
                forbid("start_days", &self.start_days)?;
                forbid("taus", &self.taus)?;
                forbid("trader_shares", &self.trader_shares)?;
            }
            RunRegime::Linear => {
                need("manager_fractions", &self.manager_fractions)?;
                need("start_days", &self.start_days)?;
                forbid("trader_participations", &self.trader_participations)?;
                forbid("taus", &self.taus)?;
                if self.verify {
                    return Err(Error::Config(
                        "verification covers no_trader/nash/stackelberg, not linear".into(),
                    ));
                }
            }
            RunRegime::Nash => {
                need("trader_participations", &self.trader_participations)?;
                forbid("manager_fractions", &self.manager_fractions)?;
                forbid("start_days", &self.start_days)?;
                forbid("taus", &self.taus)?;
                forbid("trader_shares", &self.trader_shares)?;
            }
            RunRegime::Stackelberg => {
                need("trader_participations", &self.trader_participations)?;
                need("taus", &self.taus)?;
                forbid("manager_fractions", &self.manager_fractions)?;
                forbid("start_days", &self.start_days)?;
                forbid("trader_shares", &self.trader_shares)?;
            }
        }
        if self.method == SolutionMethod::GridOptimum && self.regime != RunRegime::NoTrader {
            return Err(Error::Config(
                "grid_optimum method is only defined for the no_trader regime".into(),
            ));
        }
        if self.method == SolutionMethod::GridOptimum && self.verify {
            return Err(Error::Config(
                "verification applies to analytic schedules, not grid optima".into(),
            ));
        }
        Ok(())
    }
}
