//! Shared pieces for both cost models: the per-configuration evaluation
//! record, the feasible tender range, and the adjacent-integer rule.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Named cost terms reported per configuration (USD/year).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostComponent {
    /// Dispatch (order) cost of the constant-fixed-cost model.
    Order,
    /// Purchase cost per car, independent of the tender count.
    Purchase,
    Locomotive,
    Tender,
    Charging,
    Delay,
    /// Holding cost over the nominal trip time.
    Constant,
}

impl CostComponent {
    pub fn as_str(self) -> &'static str {
        match self {
            CostComponent::Order => "order",
            CostComponent::Purchase => "purchase",
            CostComponent::Locomotive => "locomotive",
            CostComponent::Tender => "tender",
            CostComponent::Charging => "charging",
            CostComponent::Delay => "delay",
            CostComponent::Constant => "constant",
        }
    }
}

/// One candidate tender count with its operational and cost figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationEvaluation {
    /// Tender cars per train.
    pub n: f64,
    /// Revenue cars per train, `L - alpha n`.
    pub payload: f64,
    /// `D / (r n)`, the stop count used in the cost math.
    pub stops_continuous: f64,
    /// Whole stops actually taken, `ceil(D / (r n)) - 1`, floored at zero.
    pub stops_practical: u32,
    /// Train range `r n` in miles.
    pub range: f64,
    /// Trip time in hours.
    pub trip_time: f64,
    pub components: BTreeMap<CostComponent, f64>,
    pub total_cost: f64,
}

impl ConfigurationEvaluation {
    pub(crate) fn new(
        n: f64,
        payload: f64,
        distance: f64,
        range: f64,
        trip_time: f64,
        components: BTreeMap<CostComponent, f64>,
    ) -> Self {
        let total_cost = components.values().sum();
        Self {
            n,
            payload,
            stops_continuous: distance / range,
            stops_practical: practical_stops(distance, range),
            range,
            trip_time,
            components,
            total_cost,
        }
    }

    /// Value of a component, zero when the model does not report it.
    pub fn component(&self, which: CostComponent) -> f64 {
        self.components.get(&which).copied().unwrap_or(0.0)
    }
}

/// `ceil(D / R) - 1`, never negative.
pub fn practical_stops(distance: f64, range: f64) -> u32 {
    let ratio = distance / range;
    (ratio.ceil() - 1.0).max(0.0) as u32
}

/// Granularity of the integer search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    /// Any whole number of tenders per train.
    PerTrain,
    /// Tender counts restricted to multiples of the locomotive count.
    PerLocomotive(u32),
}

impl Granularity {
    pub fn step(self) -> u32 {
        match self {
            Granularity::PerTrain => 1,
            Granularity::PerLocomotive(n_l) => n_l.max(1),
        }
    }
}

/// Which side of the feasible range a clamped optimum landed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Lower,
    Upper,
}

/// Integer optimum with its evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegerOptimum {
    /// Tender cars per train.
    pub tenders: u32,
    /// Tenders per locomotive (equals `tenders` in per-train mode).
    pub per_locomotive: u32,
    pub evaluation: ConfigurationEvaluation,
}

/// Feasible tender range `[1, (L - 1) / alpha]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TenderDomain {
    pub train_length: f64,
    pub weight_ratio: f64,
}

const PAYLOAD_SLACK: f64 = 1e-9;

impl TenderDomain {
    pub fn upper(&self) -> f64 {
        (self.train_length - 1.0) / self.weight_ratio
    }

    pub fn payload(&self, n: f64) -> f64 {
        self.train_length - self.weight_ratio * n
    }

    /// Continuous feasibility, with a little slack so the computed upper
    /// bound itself is accepted.
    pub fn check(&self, n: f64) -> Result<()> {
        if !n.is_finite() {
            return Err(Error::Domain {
                n,
                bound: "tender count must be finite".into(),
            });
        }
        if n < 1.0 - PAYLOAD_SLACK {
            return Err(Error::Domain {
                n,
                bound: "n >= 1 (at least one tender car)".into(),
            });
        }
        if self.payload(n) < 1.0 - PAYLOAD_SLACK * self.train_length.max(1.0) {
            return Err(Error::Domain {
                n,
                bound: format!(
                    "n <= (L - 1) / alpha = {} (at least one revenue car)",
                    self.upper()
                ),
            });
        }
        Ok(())
    }

    /// Largest `m` with `L - alpha * m * step >= 1`, or zero.
    pub fn max_multiple(&self, step: u32) -> u32 {
        let step_f = step.max(1) as f64;
        let mut m = (self.upper() / step_f).floor().max(0.0) as u32;
        while self.payload((m + 1) as f64 * step_f) >= 1.0 {
            m += 1;
        }
        while m > 0 && self.payload(m as f64 * step_f) < 1.0 {
            m -= 1;
        }
        m
    }

    pub fn clamp(&self, n: f64) -> (f64, Option<Boundary>) {
        if n <= 1.0 {
            (1.0, (n < 1.0).then_some(Boundary::Lower))
        } else if n >= self.upper() {
            (self.upper(), (n > self.upper()).then_some(Boundary::Upper))
        } else {
            (n, None)
        }
    }
}

/// Compares the two multiples of `step` adjacent to the continuous optimum
/// and keeps the cheaper one (ties go to the smaller count).
pub(crate) fn adjacent_integer<F>(
    domain: &TenderDomain,
    n_star: f64,
    step: u32,
    evaluate: F,
) -> Result<IntegerOptimum>
where
    F: Fn(f64) -> Result<ConfigurationEvaluation>,
{
    let step = step.max(1);
    let max_m = domain.max_multiple(step);
    if max_m == 0 {
        return Err(Error::Infeasible(format!(
            "no feasible tender count in steps of {step}: train length {} with weight ratio {} leaves no revenue car",
            domain.train_length, domain.weight_ratio
        )));
    }
    let ratio = n_star / step as f64;
    let lo = (ratio.floor().max(1.0) as u32).min(max_m);
    let hi = (ratio.ceil().max(1.0) as u32).min(max_m);
    let at = |m: u32| -> Result<IntegerOptimum> {
        let tenders = m * step;
        Ok(IntegerOptimum {
            tenders,
            per_locomotive: m,
            evaluation: evaluate(tenders as f64)?,
        })
    };
    let low = at(lo)?;
    if hi == lo {
        return Ok(low);
    }
    let high = at(hi)?;
    Ok(if high.evaluation.total_cost < low.evaluation.total_cost {
        high
    } else {
        low
    })
}
