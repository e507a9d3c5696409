//! Batch optimization of many markets under scenario variants.

mod ingest;
mod output;
mod stats;
mod synthetic;

pub use ingest::{ingest_markets, parse_markets, write_markets, MarketRecord, MARKET_COLUMNS};
pub use output::{aggregates_json, sha256_hex, write_aggregates_json, write_results_csv, RunMetadata, RESULT_COLUMNS};
pub use stats::{aggregate, percentile, summarize, AggregateStats, FlaggedMarket, GroupStats, Metric, Summary};
pub use synthetic::{generate_markets, SYNTHETIC_COUNT, SYNTHETIC_SEED};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{CostComponent, Granularity};
use crate::general::{self, GeneralModelParams, SolveMethod};
use crate::simple::{self, SimpleModelParams};
use crate::techno::{self, CommodityEnergyTable, DieselBaseline, DieselMarket, StopMode, TechInputs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CapitalCosts {
    #[default]
    Included,
    /// Locomotive and tender hourly rates set to zero; only energy remains in the fixed cost.
    Excluded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Charging {
    /// Charger power from the technology inputs.
    #[default]
    Configured,
    Charger { power_mw: f64 },
    Swap { hours: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSpec {
    pub label: String,
    pub capital: CapitalCosts,
    /// Multiplies the hourly delay cost.
    pub delay_factor: f64,
    pub charging: Charging,
    /// USD per ton CO2-eq, replaces the technology input.
    pub carbon_price: Option<f64>,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            label: "default".into(),
            capital: CapitalCosts::Included,
            delay_factor: 1.0,
            charging: Charging::Configured,
            carbon_price: None,
        }
    }
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.delay_factor.is_finite() && self.delay_factor > 0.0) {
            return Err(Error::invalid("delay_factor", format!("must be > 0, got {}", self.delay_factor)));
        }
        match self.charging {
            Charging::Charger { power_mw } if !(power_mw.is_finite() && power_mw > 0.0) => {
                return Err(Error::invalid("power_mw", format!("must be > 0, got {power_mw}")))
            }
            Charging::Swap { hours } if !(hours.is_finite() && hours >= 0.0) => {
                return Err(Error::invalid("swap_hours", format!("must be >= 0, got {hours}")))
            }
            _ => {}
        }
        if let Some(c) = self.carbon_price {
            if !(c.is_finite() && c >= 0.0) {
                return Err(Error::invalid("carbon_price", format!("must be >= 0, got {c}")));
            }
        }
        Ok(())
    }

    /// Technology inputs with the scenario's overrides applied.
    pub fn apply(&self, tech: &TechInputs) -> TechInputs {
        let mut t = tech.clone();
        if let Some(c) = self.carbon_price {
            t.carbon_price = c;
        }
        if let Charging::Charger { power_mw } = self.charging {
            t.charger_power = power_mw;
        }
        t
    }

    fn stop_mode(&self) -> StopMode {
        match self.charging {
            Charging::Swap { hours } => StopMode::Swap(hours),
            _ => StopMode::Charge,
        }
    }
}

/// Gross tons per train: the record's value, or the per-locomotive default times the locomotive count.
pub fn market_gross_tons(record: &MarketRecord, tech: &TechInputs) -> f64 {
    record
        .gross_tons
        .unwrap_or_else(|| techno::default_gross_tons(tech, record.commodity) * record.locomotives as f64)
}

/// Trip time without charging stops.
pub fn market_nominal_time(record: &MarketRecord, tech: &TechInputs) -> Result<f64> {
    match (record.nominal_time, record.speed) {
        (Some(t), _) => Ok(t),
        (None, Some(s)) => techno::nominal_trip_time(record.distance, s, tech.initial_stop),
        (None, None) => Err(Error::invalid("speed", "market has neither a speed nor a trip time")),
    }
}

/// Hourly delay cost per car before the scenario factor.
pub fn market_delay_cost(record: &MarketRecord) -> f64 {
    record
        .h_override
        .unwrap_or_else(|| techno::delay_cost_lookup(record.commodity.train_type(), record.distance))
}

/// Model inputs for one market under one scenario.
pub fn market_params(
    record: &MarketRecord,
    tech: &TechInputs,
    table: &CommodityEnergyTable,
    scenario: &ScenarioSpec,
) -> Result<GeneralModelParams> {
    scenario.validate()?;
    let tech = scenario.apply(tech);
    tech.validate()?;
    let range = techno::range_per_tender(&tech, table, record.commodity, record.region, market_gross_tons(record, &tech))?;
    let (locomotive_rate, tender_rate) = match scenario.capital {
        CapitalCosts::Included => (tech.locomotive_hourly_cost()?, tech.battery_hourly_cost()?),
        CapitalCosts::Excluded => (0.0, 0.0),
    };
    let params = GeneralModelParams {
        base: SimpleModelParams {
            distance: record.distance,
            nominal_time: market_nominal_time(record, &tech)?,
            train_length: record.train_length,
            annual_demand: record.annual_demand,
            range_per_tender: range,
            weight_ratio: record.alpha,
            holding_cost: market_delay_cost(record) * scenario.delay_factor,
            stop_time: techno::stop_time(&tech, scenario.stop_mode())?,
            dispatch_cost: 0.0,
            car_cost: 0.0,
        },
        locomotives: record.locomotives,
        locomotive_rate,
        tender_rate,
        energy_cost_per_stop: techno::charge_cost_per_stop(&tech),
    };
    params.validate()?;
    Ok(params)
}

/// Optimum for one market, with costs in USD/year and shares in percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketMetrics {
    pub locomotives: u32,
    pub n_continuous: f64,
    pub method: SolveMethod,
    pub tenders: u32,
    pub per_locomotive: u32,
    pub range: f64,
    pub stops_continuous: f64,
    pub stops_practical: u32,
    pub stops_per_1000mi: f64,
    pub trip_time: f64,
    pub total_cost: f64,
    pub locomotive_cost: f64,
    pub tender_cost: f64,
    pub charging_cost: f64,
    /// Stop-time and nominal-time delay together.
    pub delay_cost: f64,
    pub locomotive_share: f64,
    pub tender_share: f64,
    pub charging_share: f64,
    pub delay_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum MarketOutcome {
    Optimized(MarketMetrics),
    Flagged { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchResult {
    pub market_id: String,
    pub commodity: techno::Commodity,
    pub region: techno::Region,
    pub scenario: String,
    pub outcome: MarketOutcome,
}

impl BatchResult {
    pub fn metrics(&self) -> Option<&MarketMetrics> {
        match &self.outcome {
            MarketOutcome::Optimized(m) => Some(m),
            MarketOutcome::Flagged { .. } => None,
        }
    }
}

fn solve(params: &GeneralModelParams) -> Result<MarketMetrics> {
    let opt = general::optimal_n_general(params, Granularity::PerLocomotive(params.locomotives))?;
    let e = &opt.integer.evaluation;
    let total = e.total_cost;
    let loco = e.component(CostComponent::Locomotive);
    let tender = e.component(CostComponent::Tender);
    let charging = e.component(CostComponent::Charging);
    let delay = e.component(CostComponent::Delay) + e.component(CostComponent::Constant);
    let share = |x: f64| 100.0 * x / total;
    Ok(MarketMetrics {
        locomotives: params.locomotives,
        n_continuous: opt.continuous.n,
        method: opt.method,
        tenders: opt.integer.tenders,
        per_locomotive: opt.integer.per_locomotive,
        range: e.range,
        stops_continuous: e.stops_continuous,
        stops_practical: e.stops_practical,
        stops_per_1000mi: e.stops_continuous * 1000.0 / params.base.distance,
        trip_time: e.trip_time,
        total_cost: total,
        locomotive_cost: loco,
        tender_cost: tender,
        charging_cost: charging,
        delay_cost: delay,
        locomotive_share: share(loco),
        tender_share: share(tender),
        charging_share: share(charging),
        delay_share: share(delay),
    })
}

/// Optimizes one market. Markets that cannot be evaluated are flagged with the reason, never dropped.
pub fn optimize_market(
    record: &MarketRecord,
    tech: &TechInputs,
    table: &CommodityEnergyTable,
    scenario: &ScenarioSpec,
) -> BatchResult {
    let outcome = match market_params(record, tech, table, scenario).and_then(|p| solve(&p)) {
        Ok(m) => MarketOutcome::Optimized(m),
        Err(e) => MarketOutcome::Flagged { reason: e.to_string() },
    };
    BatchResult {
        market_id: record.market_id.clone(),
        commodity: record.commodity,
        region: record.region,
        scenario: scenario.label.clone(),
        outcome,
    }
}

/// Every record under every scenario, records major and scenarios minor.
/// Debug builds also audit a 1% sample against the exhaustive integer scan.
pub fn sweep(
    records: &[MarketRecord],
    tech: &TechInputs,
    table: &CommodityEnergyTable,
    scenarios: &[ScenarioSpec],
) -> Result<Vec<BatchResult>> {
    if scenarios.is_empty() {
        return Err(Error::Config("scenario grid is empty".into()));
    }
    for s in scenarios {
        s.validate()?;
    }
    tech.validate()?;
    let results: Vec<BatchResult> = records
        .par_iter()
        .flat_map_iter(|r| scenarios.iter().map(move |s| optimize_market(r, tech, table, s)))
        .collect();
    if cfg!(debug_assertions) {
        let report = audit(records, &results, tech, table, scenarios, 0.01, 0)?;
        assert!(report.mismatches.is_empty(), "integer scan audit failed: {:?}", report.mismatches);
    }
    Ok(results)
}

/// Outcome of checking batch optima against the exhaustive scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub checked: usize,
    pub mismatches: Vec<String>,
}

/// Re-solves a random `fraction` of the optimized results (every result when `fraction >= 1`)
/// by scanning all feasible multiples of the locomotive count.
pub fn audit(
    records: &[MarketRecord],
    results: &[BatchResult],
    tech: &TechInputs,
    table: &CommodityEnergyTable,
    scenarios: &[ScenarioSpec],
    fraction: f64,
    seed: u64,
) -> Result<AuditReport> {
    if results.len() != records.len() * scenarios.len() {
        return Err(Error::Inconsistent(format!(
            "{} results for {} records x {} scenarios",
            results.len(),
            records.len(),
            scenarios.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AuditReport {
        checked: 0,
        mismatches: Vec::new(),
    };
    for (i, result) in results.iter().enumerate() {
        if fraction < 1.0 && !rng.random_bool(fraction.max(0.0)) {
            continue;
        }
        let Some(m) = result.metrics() else { continue };
        let params = market_params(&records[i / scenarios.len()], tech, table, &scenarios[i % scenarios.len()])?;
        let (n, _) = tender_oracle::integer_scan(
            |n| general::total_cost(&params, n as f64).map(|e| e.total_cost).unwrap_or(f64::INFINITY),
            params.base.train_length,
            params.base.weight_ratio,
            params.locomotives,
        )
        .map_err(|e| Error::Inconsistent(e.to_string()))?;
        report.checked += 1;
        if n != m.tenders {
            report.mismatches.push(format!(
                "{} [{}]: optimizer {} tenders, scan {}",
                result.market_id, result.scenario, m.tenders, n
            ));
        }
    }
    Ok(report)
}

/// Annual cost split into equipment-and-energy and delay parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostSplit {
    pub financial: f64,
    pub delay: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DieselComparison {
    pub market_id: String,
    pub tenders: u32,
    pub per_locomotive: u32,
    pub battery: CostSplit,
    pub diesel: CostSplit,
    pub baseline: DieselBaseline,
    pub battery_cheaper_financial: bool,
    pub battery_cheaper_total: bool,
}

/// Battery-optimal configuration next to the same market run with diesel locomotives.
pub fn compare_diesel(
    record: &MarketRecord,
    tech: &TechInputs,
    table: &CommodityEnergyTable,
    scenario: &ScenarioSpec,
) -> Result<DieselComparison> {
    let params = market_params(record, tech, table, scenario)?;
    let opt = general::optimal_n_general(&params, Granularity::PerLocomotive(params.locomotives))?;
    let n = opt.integer.tenders as f64;
    let e = &opt.integer.evaluation;
    let trips = params.base.annual_demand / e.payload;
    let battery_delay = params.base.holding_cost * simple::trip_time(&params.base, n)? * params.base.annual_demand;
    let battery = CostSplit {
        financial: general::fixed_cost(&params, n)? * trips,
        delay: battery_delay,
        total: e.total_cost,
    };

    let scenario_tech = scenario.apply(tech);
    let market = DieselMarket {
        commodity: record.commodity,
        region: record.region,
        distance: record.distance,
        annual_demand: record.annual_demand,
        train_length: record.train_length,
        locomotives: record.locomotives,
        trip_time: params.base.nominal_time,
        gross_tons: Some(market_gross_tons(record, &scenario_tech)),
    };
    let baseline = techno::diesel_baseline(&market, table, &scenario_tech)?;
    let diesel_delay = params.base.holding_cost * params.base.nominal_time * params.base.annual_demand;
    let diesel = CostSplit {
        financial: baseline.total,
        delay: diesel_delay,
        total: baseline.total + diesel_delay,
    };
    Ok(DieselComparison {
        market_id: record.market_id.clone(),
        tenders: opt.integer.tenders,
        per_locomotive: opt.integer.per_locomotive,
        battery,
        diesel,
        baseline,
        battery_cheaper_financial: battery.financial < diesel.financial,
        battery_cheaper_total: battery.total < diesel.total,
    })
}
