//! Equivalent uniform hourly cost of equipment from continuously discounted
//! cash flows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HOURS_PER_YEAR: f64 = 8760.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquipmentCashFlows {
    /// Purchase price at time zero (USD).
    pub capital: f64,
    /// Price of each replacement bought at the end of every service life (USD).
    pub future_capital: f64,
    /// Maintenance spend (USD/year), paid continuously.
    pub annual_maintenance: f64,
    /// Service life (years).
    pub lifetime: f64,
    /// Study horizon (years); a whole number of service lives.
    pub horizon: f64,
    /// Continuous discount rate (1/year).
    pub rate: f64,
    /// Fraction of the year the equipment is in road service.
    pub utilization: f64,
}

impl EquipmentCashFlows {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("capital", self.capital),
            ("future_capital", self.future_capital),
            ("annual_maintenance", self.annual_maintenance),
            ("rate", self.rate),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        for (name, v) in [("lifetime", self.lifetime), ("horizon", self.horizon)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.utilization > 0.0 && self.utilization <= 1.0) {
            return Err(Error::invalid(
                "utilization",
                format!("must lie in (0, 1], got {}", self.utilization),
            ));
        }
        let lives = self.horizon / self.lifetime;
        if (lives - lives.round()).abs() > 1e-9 * lives.max(1.0) {
            return Err(Error::invalid(
                "horizon",
                format!(
                    "horizon {} is not a whole number of {}-year lifetimes; replacement schedule is ambiguous",
                    self.horizon, self.lifetime
                ),
            ));
        }
        Ok(())
    }

    /// Present value of purchases, replacements and maintenance.
    pub fn net_present_cost(&self) -> Result<f64> {
        self.validate()?;
        let lives = (self.horizon / self.lifetime).round() as u32;
        let replacements: f64 = (1..lives)
            .map(|k| self.future_capital * (-self.rate * k as f64 * self.lifetime).exp())
            .sum();
        Ok(self.capital + replacements + self.annual_maintenance * self.discounted_years())
    }

    /// `integral_0^H e^(-rate t) dt`, equal to `H` when the rate is zero.
    fn discounted_years(&self) -> f64 {
        if self.rate == 0.0 {
            self.horizon
        } else {
            -(-self.rate * self.horizon).exp_m1() / self.rate
        }
    }

    /// Uniform annual cost with the same present value.
    pub fn annualized(&self) -> Result<f64> {
        Ok(self.net_present_cost()? / self.discounted_years())
    }

    /// Annualized cost spread over road-service hours.
    pub fn hourly(&self) -> Result<f64> {
        Ok(self.annualized()? / (self.utilization * HOURS_PER_YEAR))
    }
}

/// Hourly cost rate from an annual cost and a utilization share.
pub fn hourly_cost_from_annual(annual: f64, utilization: f64) -> Result<f64> {
    if !(utilization > 0.0 && utilization <= 1.0) {
        return Err(Error::invalid("utilization", format!("must lie in (0, 1], got {utilization}")));
    }
    Ok(annual / (utilization * HOURS_PER_YEAR))
}
