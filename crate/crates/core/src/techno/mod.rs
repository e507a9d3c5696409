//! Model parameters derived from battery, finance and diesel inputs.

mod finance;
mod tables;

pub use finance::{hourly_cost_from_annual, EquipmentCashFlows, HOURS_PER_YEAR};
pub use tables::{delay_cost_lookup, Commodity, CommodityEnergyTable, Region, TrainType};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// BTU per kWh.
pub const BTU_PER_KWH: f64 = 3412.14;

pub const DEFAULTS_TOML: &str = include_str!("../../data/tech_defaults.toml");

/// Where charging energy is metered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BillingBasis {
    /// Energy delivered into the battery, capacity times depth.
    #[default]
    Terminal,
    /// Energy drawn from the grid, terminal energy over battery efficiency.
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TechInputs {
    /// tons per tender car
    pub tender_weight: f64,
    /// MWh
    pub battery_capacity: f64,
    /// MW
    pub charger_power: f64,
    pub charging_depth: f64,
    pub battery_efficiency: f64,
    /// USD
    pub battery_capital: f64,
    /// USD
    pub battery_future_capital: f64,
    /// USD/day
    pub battery_maintenance: f64,
    /// years
    pub battery_lifetime: f64,
    pub relative_efficiency: f64,
    /// 1/year
    pub discount_rate: f64,
    /// years
    pub horizon: f64,
    /// USD/kWh
    pub electricity_price: f64,
    /// kg CO2-eq/kWh
    pub grid_intensity: f64,
    /// USD/ton CO2-eq
    pub carbon_price: f64,
    pub loco_utilization: f64,
    pub loco_new_cost: f64,
    pub loco_annual_capital: f64,
    pub loco_annual_opex: f64,
    /// USD/year
    pub loco_annual_total_cost: f64,
    pub loco_cost_of_capital: f64,
    pub loco_horizon: f64,
    /// hours
    pub initial_stop: f64,
    /// tons per locomotive
    pub nominal_payload: f64,
    /// USD/gallon
    pub diesel_price: f64,
    /// BTU/gallon
    pub diesel_lhv: f64,
    /// kg CO2-eq/gallon
    pub diesel_emission: f64,
    pub billing_basis: BillingBasis,
}

impl Default for TechInputs {
    fn default() -> Self {
        Self {
            tender_weight: 150.0,
            battery_capacity: 14.0,
            charger_power: 3.0,
            charging_depth: 0.8,
            battery_efficiency: 0.95,
            battery_capital: 1_271_816.0,
            battery_future_capital: 452_908.0,
            battery_maintenance: 100.0,
            battery_lifetime: 13.0,
            relative_efficiency: 2.44,
            discount_rate: 0.03,
            horizon: 26.0,
            electricity_price: 0.15,
            grid_intensity: 0.387,
            carbon_price: 125.0,
            loco_utilization: 0.25,
            loco_new_cost: 2_560_000.0,
            loco_annual_capital: 389_000.0,
            loco_annual_opex: 127_000.0,
            loco_annual_total_cost: 516_000.0,
            loco_cost_of_capital: 0.0934,
            loco_horizon: 20.0,
            initial_stop: 4.0,
            nominal_payload: 1700.0,
            diesel_price: 2.47,
            diesel_lhv: 129_488.0,
            diesel_emission: 12.36,
            billing_basis: BillingBasis::Terminal,
        }
    }
}

impl TechInputs {
    /// Reads a (possibly partial) key/value file over the defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let tech: TechInputs = toml::from_str(text).map_err(|e| Error::Config(format!("technology inputs: {e}")))?;
        tech.validate()?;
        Ok(tech)
    }

    pub fn bundled() -> Self {
        Self::from_toml_str(DEFAULTS_TOML).expect("bundled defaults are valid")
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tender_weight", self.tender_weight),
            ("battery_capacity", self.battery_capacity),
            ("battery_lifetime", self.battery_lifetime),
            ("relative_efficiency", self.relative_efficiency),
            ("horizon", self.horizon),
            ("diesel_lhv", self.diesel_lhv),
            ("nominal_payload", self.nominal_payload),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        let nonnegative = [
            ("charger_power", self.charger_power),
            ("battery_capital", self.battery_capital),
            ("battery_future_capital", self.battery_future_capital),
            ("battery_maintenance", self.battery_maintenance),
            ("discount_rate", self.discount_rate),
            ("electricity_price", self.electricity_price),
            ("grid_intensity", self.grid_intensity),
            ("carbon_price", self.carbon_price),
            ("loco_annual_total_cost", self.loco_annual_total_cost),
            ("initial_stop", self.initial_stop),
            ("diesel_price", self.diesel_price),
            ("diesel_emission", self.diesel_emission),
        ];
        for (name, v) in nonnegative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        for (name, v) in [
            ("charging_depth", self.charging_depth),
            ("battery_efficiency", self.battery_efficiency),
            ("loco_utilization", self.loco_utilization),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::invalid(name, format!("must lie in (0, 1], got {v}")));
            }
        }
        Ok(())
    }

    /// Battery maintenance over a 365-day year.
    pub fn annual_battery_maintenance(&self) -> f64 {
        self.battery_maintenance * 365.0
    }

    pub fn battery_cash_flows(&self) -> EquipmentCashFlows {
        EquipmentCashFlows {
            capital: self.battery_capital,
            future_capital: self.battery_future_capital,
            annual_maintenance: self.annual_battery_maintenance(),
            lifetime: self.battery_lifetime,
            horizon: self.horizon,
            rate: self.discount_rate,
            utilization: self.loco_utilization,
        }
    }

    /// `c_n`, USD per road-service hour of one tender.
    pub fn battery_hourly_cost(&self) -> Result<f64> {
        self.battery_cash_flows().hourly()
    }

    /// `c_l`, USD per road-service hour of one locomotive.
    pub fn locomotive_hourly_cost(&self) -> Result<f64> {
        hourly_cost_from_annual(self.loco_annual_total_cost, self.loco_utilization)
    }

    /// Diesel cost per gallon including the emissions charge.
    pub fn diesel_cost_per_gallon(&self) -> f64 {
        self.diesel_price + self.diesel_emission * self.carbon_price / 1000.0
    }
}

/// Usable energy per tender in MWh: capacity x depth x efficiency.
pub fn effective_capacity(tech: &TechInputs) -> f64 {
    tech.battery_capacity * tech.charging_depth * tech.battery_efficiency
}

/// How a stop replenishes the tenders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopMode {
    /// Recharge at the configured charger power.
    Charge,
    /// Exchange tenders; takes the given hours.
    Swap(f64),
}

/// Hours per stop.
pub fn stop_time(tech: &TechInputs, mode: StopMode) -> Result<f64> {
    match mode {
        StopMode::Charge => {
            if !(tech.charger_power > 0.0) {
                return Err(Error::invalid(
                    "charger_power",
                    format!("charging needs positive power, got {}", tech.charger_power),
                ));
            }
            Ok(tech.battery_capacity * tech.charging_depth / tech.charger_power)
        }
        StopMode::Swap(hours) => {
            if !(hours.is_finite() && hours >= 0.0) {
                return Err(Error::invalid("swap_hours", format!("must be finite and >= 0, got {hours}")));
            }
            Ok(hours)
        }
    }
}

/// Energy billed per tender per stop, in kWh.
pub fn billed_energy_per_stop(tech: &TechInputs) -> f64 {
    let terminal = tech.battery_capacity * tech.charging_depth * 1000.0;
    match tech.billing_basis {
        BillingBasis::Terminal => terminal,
        BillingBasis::Grid => terminal / tech.battery_efficiency,
    }
}

/// `f`: electricity plus the carbon charge for one tender recharge (USD).
pub fn charge_cost_per_stop(tech: &TechInputs) -> f64 {
    let kwh = billed_energy_per_stop(tech);
    kwh * tech.electricity_price + kwh * tech.grid_intensity * tech.carbon_price / 1000.0
}

/// Battery energy needed per ton-mile (kWh), from the diesel intensity.
pub fn battery_energy_requirement(diesel_btu_per_ton_mile: f64, tech: &TechInputs) -> f64 {
    diesel_btu_per_ton_mile / tech.relative_efficiency / BTU_PER_KWH
}

/// Miles one tender moves `gross_tons`.
pub fn range_per_tender(
    tech: &TechInputs,
    table: &CommodityEnergyTable,
    commodity: Commodity,
    region: Region,
    gross_tons: f64,
) -> Result<f64> {
    if !(gross_tons.is_finite() && gross_tons > 0.0) {
        return Err(Error::invalid("gross_tons", format!("must be finite and > 0, got {gross_tons}")));
    }
    let diesel = table.diesel_requirement(commodity, region)?;
    let per_ton_mile = battery_energy_requirement(diesel, tech);
    Ok(effective_capacity(tech) * 1000.0 / (per_ton_mile * gross_tons))
}

/// Gross tons hauled per locomotive when a market does not say.
///
/// Coal and the light, energy-hungry intermodal/automotive groups use the
/// tonnages that reproduce the reference linehaul ranges; everything else
/// uses the nominal payload.
pub fn default_gross_tons(tech: &TechInputs, commodity: Commodity) -> f64 {
    match commodity {
        Commodity::Coal => 2540.0,
        Commodity::Intermodal | Commodity::MotorVehicles => 1600.0,
        _ => tech.nominal_payload,
    }
}

/// `t0 = D / speed + initial stop`.
pub fn nominal_trip_time(distance: f64, speed: f64, initial_stop: f64) -> Result<f64> {
    if !(speed.is_finite() && speed > 0.0) {
        return Err(Error::invalid("speed", format!("must be finite and > 0, got {speed}")));
    }
    Ok(distance / speed + initial_stop)
}

/// Inputs for the conventional diesel comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DieselMarket {
    pub commodity: Commodity,
    pub region: Region,
    pub distance: f64,
    pub annual_demand: f64,
    /// Revenue cars per diesel train.
    pub train_length: f64,
    pub locomotives: u32,
    /// Trip time without charging stops (hours).
    pub trip_time: f64,
    /// Gross tons per train.
    pub gross_tons: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DieselBaseline {
    pub trips: f64,
    pub gross_ton_miles: f64,
    pub fuel_gallons: f64,
    pub fuel_cost: f64,
    pub locomotive_cost: f64,
    pub total: f64,
}

/// Annual locomotive and fuel (with emissions) cost of running the market on diesel.
pub fn diesel_baseline(market: &DieselMarket, table: &CommodityEnergyTable, tech: &TechInputs) -> Result<DieselBaseline> {
    let gross_tons = market
        .gross_tons
        .ok_or_else(|| Error::invalid("gross_tons", "diesel baseline needs the gross tonnage per train"))?;
    if !(gross_tons > 0.0) {
        return Err(Error::invalid("gross_tons", format!("must be > 0, got {gross_tons}")));
    }
    if !(market.train_length > 0.0 && market.annual_demand > 0.0 && market.distance > 0.0) {
        return Err(Error::invalid(
            "market",
            "distance, annual demand and train length must be positive",
        ));
    }
    let trips = market.annual_demand / market.train_length;
    let gross_ton_miles = gross_tons * market.distance * trips;
    let fuel_gallons = gross_ton_miles * table.diesel_requirement(market.commodity, market.region)? / tech.diesel_lhv;
    let fuel_cost = fuel_gallons * tech.diesel_cost_per_gallon();
    let locomotive_cost = market.locomotives as f64 * tech.locomotive_hourly_cost()? * market.trip_time * trips;
    Ok(DieselBaseline {
        trips,
        gross_ton_miles,
        fuel_gallons,
        fuel_cost,
        locomotive_cost,
        total: fuel_cost + locomotive_cost,
    })
}

/// One derived value with the arithmetic that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedParameter {
    pub name: String,
    pub symbol: String,
    pub value: f64,
    pub unit: String,
    pub formula: String,
}

fn derived(name: &str, symbol: &str, value: f64, unit: &str, formula: String) -> DerivedParameter {
    DerivedParameter {
        name: name.into(),
        symbol: symbol.into(),
        value,
        unit: unit.into(),
        formula,
    }
}

/// Up to six decimals without trailing zeros, for formula text.
fn tidy(x: f64) -> String {
    let s = format!("{x:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Every model input that follows from `tech`, in display order.
pub fn derive_parameters(tech: &TechInputs, table: &CommodityEnergyTable) -> Result<Vec<DerivedParameter>> {
    tech.validate()?;
    let mut out = vec![
        derived(
            "effective battery capacity",
            "E_eff",
            effective_capacity(tech),
            "MWh",
            format!(
                "{} x {} x {}",
                tech.battery_capacity, tech.charging_depth, tech.battery_efficiency
            ),
        ),
        derived(
            "time per charging stop",
            "t_s",
            stop_time(tech, StopMode::Charge)?,
            "h",
            format!("{} x {} / {}", tech.battery_capacity, tech.charging_depth, tech.charger_power),
        ),
    ];
    let kwh = tidy(billed_energy_per_stop(tech));
    out.push(derived(
        "charging cost per tender per stop",
        "f",
        charge_cost_per_stop(tech),
        "USD",
        format!(
            "{kwh} kWh x {} + {kwh} kWh x {} kg/kWh x {} USD/t / 1000",
            tech.electricity_price, tech.grid_intensity, tech.carbon_price
        ),
    ));
    out.push(derived(
        "locomotive hourly cost",
        "c_l",
        tech.locomotive_hourly_cost()?,
        "USD/h",
        format!(
            "{} / ({} x {HOURS_PER_YEAR})",
            tech.loco_annual_total_cost, tech.loco_utilization
        ),
    ));
    let flows = tech.battery_cash_flows();
    out.push(derived(
        "battery tender hourly cost",
        "c_n",
        flows.hourly()?,
        "USD/h",
        format!(
            "annuity of NPV {:.0} (capital {}, replacement {} every {} y, maintenance {} /y, {} y at {}) / ({} x {HOURS_PER_YEAR})",
            flows.net_present_cost()?,
            flows.capital,
            flows.future_capital,
            flows.lifetime,
            flows.annual_maintenance,
            flows.horizon,
            flows.rate,
            flows.utilization
        ),
    ));
    out.push(derived(
        "diesel cost per gallon with emissions",
        "p_d",
        tech.diesel_cost_per_gallon(),
        "USD/gal",
        format!(
            "{} + {} kg/gal x {} USD/t / 1000",
            tech.diesel_price, tech.diesel_emission, tech.carbon_price
        ),
    ));
    for commodity in [Commodity::Coal, Commodity::Intermodal, Commodity::MotorVehicles] {
        let tons = default_gross_tons(tech, commodity);
        let diesel = table.diesel_requirement(commodity, Region::Western)?;
        out.push(derived(
            &format!("range per tender, {} (western)", commodity.label().to_lowercase()),
            "r",
            range_per_tender(tech, table, commodity, Region::Western, tons)?,
            "mi",
            format!(
                "{} MWh x 1000 / ({diesel} BTU/ton-mi / {} / {BTU_PER_KWH} x {tons} t)",
                effective_capacity(tech),
                tech.relative_efficiency
            ),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effective_capacity_values() {
        let tech = TechInputs::default();
        assert!((effective_capacity(&tech) - 10.64).abs() < 1e-12);
        let ideal = TechInputs {
            charging_depth: 1.0,
            battery_efficiency: 1.0,
            ..tech.clone()
        };
        assert_eq!(effective_capacity(&ideal), 14.0);
        let small = TechInputs {
            battery_capacity: 10.0,
            charging_depth: 0.5,
            battery_efficiency: 0.9,
            ..tech
        };
        assert!((effective_capacity(&small) - 4.5).abs() < 1e-12);
    }

    #[test]
    fn stop_times() {
        let tech = TechInputs::default();
        let ts = stop_time(&tech, StopMode::Charge).unwrap();
        assert!((ts - 3.733_333_333).abs() < 1e-8);
        assert!((ts - 3.73).abs() / 3.73 < 0.005);
        let slow = TechInputs {
            charger_power: 0.4,
            ..tech.clone()
        };
        assert!((stop_time(&slow, StopMode::Charge).unwrap() - 28.0).abs() < 1e-12);
        assert_eq!(stop_time(&tech, StopMode::Swap(0.5)).unwrap(), 0.5);
        let dead = TechInputs {
            charger_power: 0.0,
            ..tech
        };
        assert!(stop_time(&dead, StopMode::Charge).is_err());
    }

    #[test]
    fn stop_time_times_power_is_energy() {
        for power in [0.4, 1.0, 3.0, 7.5] {
            let tech = TechInputs {
                charger_power: power,
                ..TechInputs::default()
            };
            let ts = stop_time(&tech, StopMode::Charge).unwrap();
            assert!((ts * power - 14.0 * 0.8).abs() < 1e-12);
        }
    }

    #[test]
    fn charging_cost_per_stop() {
        let tech = TechInputs::default();
        let f = charge_cost_per_stop(&tech);
        assert!((f - 2221.8).abs() < 1e-9);
        assert!((f - 2240.0).abs() / 2240.0 < 0.01);
        let no_carbon = TechInputs {
            carbon_price: 0.0,
            ..tech.clone()
        };
        assert!((charge_cost_per_stop(&no_carbon) - 1680.0).abs() < 1e-9);
        let clean_grid = TechInputs {
            grid_intensity: 0.0,
            ..tech.clone()
        };
        assert_eq!(charge_cost_per_stop(&clean_grid), charge_cost_per_stop(&no_carbon));
        let grid = TechInputs {
            billing_basis: BillingBasis::Grid,
            ..tech
        };
        assert!(charge_cost_per_stop(&grid) > 2240.0 * 1.03);
    }

    #[test]
    fn range_inversion_fixtures() {
        let tech = TechInputs::default();
        let table = CommodityEnergyTable::bundled();
        let coal = range_per_tender(&tech, &table, Commodity::Coal, Region::Western, 2540.0).unwrap();
        assert!((coal - 320.0).abs() / 320.0 < 0.01, "{coal}");
        let im = range_per_tender(&tech, &table, Commodity::Intermodal, Region::Western, 1600.0).unwrap();
        assert!((im - 62.0).abs() / 62.0 < 0.02, "{im}");
    }

    #[test]
    fn range_unit_cancellation() {
        let tech = TechInputs {
            relative_efficiency: 1.0,
            ..TechInputs::default()
        };
        let table = CommodityEnergyTable::from_csv(
            &format!("commodity,region,btu_per_ton_mile\ncoal,western,{BTU_PER_KWH}\n"),
            "railroad,train_type,mph\n",
        )
        .unwrap();
        let tons = effective_capacity(&tech) * 1000.0;
        let r = range_per_tender(&tech, &table, Commodity::Coal, Region::Western, tons).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn range_halves_when_tonnage_doubles() {
        let tech = TechInputs::default();
        let table = CommodityEnergyTable::bundled();
        for tons in [500.0, 1600.0, 2540.0, 9000.0] {
            let a = range_per_tender(&tech, &table, Commodity::Others, Region::Eastern, tons).unwrap();
            let b = range_per_tender(&tech, &table, Commodity::Others, Region::Eastern, 2.0 * tons).unwrap();
            assert_eq!(a, 2.0 * b);
        }
        assert!(range_per_tender(&tech, &table, Commodity::Coal, Region::Western, 0.0).is_err());
    }

    #[test]
    fn hourly_rates_from_defaults() {
        let tech = TechInputs::default();
        assert!((tech.locomotive_hourly_cost().unwrap() - 235.616).abs() < 1e-3);
        assert!((tech.battery_hourly_cost().unwrap() - 56.59).abs() < 0.01);
    }

    #[test]
    fn diesel_fuel_price_with_emissions() {
        let tech = TechInputs::default();
        assert!((tech.diesel_cost_per_gallon() - 4.015).abs() < 1e-12);
        let market = DieselMarket {
            commodity: Commodity::Coal,
            region: Region::Western,
            distance: 1400.0,
            annual_demand: 1000.0,
            train_length: 73.0,
            locomotives: 5,
            trip_time: 70.7,
            gross_tons: Some(12_700.0),
        };
        let table = CommodityEnergyTable::bundled();
        let base = diesel_baseline(&market, &table, &tech).unwrap();
        assert!((base.fuel_cost - base.fuel_gallons * 4.015).abs() < 1e-6);
        let free_carbon = TechInputs {
            carbon_price: 0.0,
            ..tech.clone()
        };
        let b0 = diesel_baseline(&market, &table, &free_carbon).unwrap();
        assert!((b0.fuel_cost - b0.fuel_gallons * 2.47).abs() < 1e-6);
        let missing = DieselMarket {
            gross_tons: None,
            ..market
        };
        assert!(diesel_baseline(&missing, &table, &tech).is_err());
    }

    #[test]
    fn nominal_trip_time_helper() {
        assert_eq!(nominal_trip_time(1400.0, 20.0, 4.0).unwrap(), 74.0);
        assert!(nominal_trip_time(1400.0, 0.0, 4.0).is_err());
    }

    #[test]
    fn bundled_file_matches_defaults() {
        assert_eq!(TechInputs::bundled(), TechInputs::default());
        let back = toml::to_string(&TechInputs::bundled()).unwrap();
        assert_eq!(TechInputs::from_toml_str(&back).unwrap(), TechInputs::default());
    }

    #[test]
    fn partial_config_merges_over_defaults() {
        let tech = TechInputs::from_toml_str("charger_power = 0.4\ncarbon_price = 0\n").unwrap();
        assert_eq!(tech.charger_power, 0.4);
        assert_eq!(tech.carbon_price, 0.0);
        assert_eq!(tech.battery_capacity, 14.0);
        assert!(TechInputs::from_toml_str("charger_powr = 1").is_err());
        assert!(TechInputs::from_toml_str("charging_depth = 1.5").is_err());
    }

    #[test]
    fn derived_parameter_list() {
        let list = derive_parameters(&TechInputs::default(), &CommodityEnergyTable::bundled()).unwrap();
        let ts = list.iter().find(|d| d.symbol == "t_s").unwrap();
        assert_eq!(ts.formula, "14 x 0.8 / 3");
        assert!(list.iter().any(|d| d.symbol == "c_n"));
    }
}
