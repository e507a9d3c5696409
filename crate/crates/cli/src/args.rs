use std::path::PathBuf;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use tender_core::pipeline::{CapitalCosts, Charging, MarketRecord, ScenarioSpec};
use tender_core::techno::{Commodity, Region, TechInputs};

#[derive(Debug, Parser)]
#[command(name = "tender", version, about = "Size battery tender cars for freight trains")]
pub struct Cli {
    /// TOML file with [tech], [market] and [scenario] tables; flags override it.
    #[arg(long, global = true, env = "TENDER_CONFIG")]
    pub config: Option<PathBuf>,

    /// Output format; defaults to table on a terminal and csv otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Echo the merged configuration to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal tender count for one market.
    Optimize {
        #[command(flatten)]
        market: MarketArgs,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Cost components for a range of tender counts.
    Curve {
        #[command(flatten)]
        market: MarketArgs,
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// First count, in batteries per locomotive (or tenders with --per-train).
        #[arg(long, default_value_t = 1)]
        from: u32,
        /// Last count; defaults to the largest feasible one.
        #[arg(long)]
        to: Option<u32>,
        /// Step one tender at a time instead of one per locomotive.
        #[arg(long)]
        per_train: bool,
    },
    /// Optimize every market in a CSV file under one scenario.
    Batch {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Optimize every market under a grid of scenarios.
    Sweep {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Delay cost multipliers.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        delay_factors: Vec<f64>,
        /// Charger powers in MW.
        #[arg(long, value_delimiter = ',')]
        charger_mw: Vec<f64>,
        /// Swap stop times in hours.
        #[arg(long, value_delimiter = ',')]
        swap_hours: Vec<f64>,
        #[arg(long, value_delimiter = ',', value_enum, default_value = "included")]
        capital: Vec<CapitalArg>,
        #[arg(long)]
        carbon_price: Option<f64>,
    },
    /// Battery optimum next to the diesel baseline for one market.
    CompareDiesel {
        #[command(flatten)]
        market: MarketArgs,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Model parameters derived from the technology inputs.
    Derive,
    /// Write the seeded synthetic market file.
    GenerateMarkets {
        #[arg(long, default_value_t = tender_core::pipeline::SYNTHETIC_COUNT)]
        count: usize,
        #[arg(long, default_value_t = tender_core::pipeline::SYNTHETIC_SEED)]
        seed: u64,
        /// Destination file; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapitalArg {
    Included,
    Excluded,
}

impl From<CapitalArg> for CapitalCosts {
    fn from(c: CapitalArg) -> Self {
        match c {
            CapitalArg::Included => CapitalCosts::Included,
            CapitalArg::Excluded => CapitalCosts::Excluded,
        }
    }
}

/// One market; every field can also come from the [market] table of the config file.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarketArgs {
    #[arg(long)]
    pub market_id: Option<String>,
    #[arg(long)]
    pub railroad: Option<String>,
    /// western or eastern.
    #[arg(long)]
    pub region: Option<String>,
    /// Commodity group, e.g. coal, intermodal, motor_vehicles.
    #[arg(long)]
    pub commodity: Option<String>,
    /// Trip distance, miles.
    #[arg(long)]
    pub distance: Option<f64>,
    /// Annual demand, cars/year.
    #[arg(long)]
    pub demand: Option<f64>,
    /// Cars per train including tenders.
    #[arg(long)]
    pub train_length: Option<f64>,
    #[arg(long)]
    pub locomotives: Option<u32>,
    /// Average speed, mph (alternative to --t0).
    #[arg(long)]
    pub speed: Option<f64>,
    /// Trip time without charging stops, hours.
    #[arg(long)]
    pub t0: Option<f64>,
    /// Tender weight over loaded railcar weight.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Gross tons per train.
    #[arg(long)]
    pub gross_tons: Option<f64>,
    /// Delay cost, USD per car-hour.
    #[arg(long)]
    pub holding_cost: Option<f64>,
    /// Range per tender car, miles (replaces the derived value).
    #[arg(long)]
    pub range_per_tender: Option<f64>,
    /// Hours per stop (replaces the derived value).
    #[arg(long)]
    pub stop_time: Option<f64>,
    /// Locomotive cost, USD/h (replaces the derived value).
    #[arg(long)]
    pub locomotive_rate: Option<f64>,
    /// Tender cost, USD/h (replaces the derived value).
    #[arg(long)]
    pub tender_rate: Option<f64>,
    /// Energy cost per tender per stop, USD (replaces the derived value).
    #[arg(long)]
    pub charge_cost: Option<f64>,
}

macro_rules! merge_fields {
    ($flags:expr, $file:expr, $($f:ident),*) => {
        MarketArgs { $($f: $flags.$f.or($file.$f)),* }
    };
}

impl MarketArgs {
    pub fn merge(self, file: MarketArgs) -> MarketArgs {
        let timing_from_flags = self.speed.is_some() || self.t0.is_some();
        let mut m = merge_fields!(
            self, file, market_id, railroad, region, commodity, distance, demand, train_length, locomotives,
            speed, t0, alpha, gross_tons, holding_cost, range_per_tender, stop_time, locomotive_rate,
            tender_rate, charge_cost
        );
        if timing_from_flags {
            // A flag for either timing input replaces both values from the file.
            m.speed = self.speed;
            m.t0 = self.t0;
        }
        m
    }

    pub fn record(&self) -> Result<MarketRecord> {
        fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T> {
            v.clone()
                .ok_or_else(|| anyhow!("missing required value --{flag} (flag or [market] in the config file)"))
        }
        let commodity: Commodity = need(&self.commodity, "commodity")?.parse()?;
        let region: Region = self.region.as_deref().unwrap_or("western").parse()?;
        if self.speed.is_some() && self.t0.is_some() {
            return Err(anyhow!("--speed and --t0 both given; supply exactly one"));
        }
        if self.speed.is_none() && self.t0.is_none() {
            return Err(anyhow!("missing required value --t0 or --speed (flag or [market] in the config file)"));
        }
        Ok(MarketRecord {
            market_id: self.market_id.clone().unwrap_or_else(|| "market".into()),
            railroad: self.railroad.clone().unwrap_or_else(|| "-".into()),
            region,
            commodity,
            distance: need(&self.distance, "distance")?,
            annual_demand: need(&self.demand, "demand")?,
            train_length: need(&self.train_length, "train-length")?,
            locomotives: self.locomotives.unwrap_or(1),
            speed: self.speed,
            nominal_time: self.t0,
            alpha: need(&self.alpha, "alpha")?,
            gross_tons: self.gross_tons,
            h_override: self.holding_cost,
            origin: None,
            destination: None,
        })
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioArgs {
    #[arg(long, value_enum)]
    pub capital: Option<CapitalArg>,
    /// Multiplier on the delay cost.
    #[arg(long)]
    pub delay_factor: Option<f64>,
    /// Charger power, MW.
    #[arg(long, conflicts_with = "swap_hours")]
    pub charger_mw: Option<f64>,
    /// Swap tenders instead of charging; hours per stop.
    #[arg(long)]
    pub swap_hours: Option<f64>,
    /// USD per ton CO2-eq.
    #[arg(long)]
    pub carbon_price: Option<f64>,
}

impl ScenarioArgs {
    pub fn merge(self, file: ScenarioArgs) -> ScenarioArgs {
        let charging_from_flags = self.charger_mw.is_some() || self.swap_hours.is_some();
        ScenarioArgs {
            capital: self.capital.or(file.capital),
            delay_factor: self.delay_factor.or(file.delay_factor),
            charger_mw: if charging_from_flags { self.charger_mw } else { file.charger_mw },
            swap_hours: if charging_from_flags { self.swap_hours } else { file.swap_hours },
            carbon_price: self.carbon_price.or(file.carbon_price),
        }
    }

    pub fn spec(&self) -> Result<ScenarioSpec> {
        let charging = match (self.charger_mw, self.swap_hours) {
            (Some(_), Some(_)) => return Err(anyhow!("--charger-mw and --swap-hours both given; choose one")),
            (Some(power_mw), None) => Charging::Charger { power_mw },
            (None, Some(hours)) => Charging::Swap { hours },
            (None, None) => Charging::Configured,
        };
        let spec = ScenarioSpec {
            label: "cli".into(),
            capital: self.capital.map(Into::into).unwrap_or_default(),
            delay_factor: self.delay_factor.unwrap_or(1.0),
            charging,
            carbon_price: self.carbon_price,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Contents of the config file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub tech: TechInputs,
    pub market: MarketArgs,
    pub scenario: ScenarioArgs,
}

impl ConfigFile {
    pub fn load(path: Option<&PathBuf>) -> Result<ConfigFile> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ConfigFile = toml::from_str(&text)
            .map_err(|e| anyhow!("config {}: {}", path.display(), e.message()))?;
        cfg.tech.validate()?;
        Ok(cfg)
    }
}
