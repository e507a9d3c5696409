//! Constant-fixed-cost tender model.
//!
//! Annual cost of shipping `Q` cars with `n` tenders per train:
//!
//! ```text
//! TC(n) = k Q / (L - alpha n) + h t(n) Q + p Q,   t(n) = t0 + D / (r n) * ts
//! ```
//!
//! The first term falls with payload, the second with range, so `TC` is
//! convex on `[1, (L - 1) / alpha]` and has the closed-form minimizer
//! `n* = L / (alpha + sqrt(k alpha r / (h ts D)))`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{
    adjacent_integer, Boundary, ConfigurationEvaluation, CostComponent, Granularity, IntegerOptimum,
    TenderDomain,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimpleModelParams {
    /// Trip distance `D` (miles).
    pub distance: f64,
    /// Nominal trip duration `t0` (hours).
    pub nominal_time: f64,
    /// Total cars per train `L`.
    pub train_length: f64,
    /// Annual demand `Q` (cars/year).
    pub annual_demand: f64,
    /// Range provided by one tender car `r` (miles).
    pub range_per_tender: f64,
    /// Tender weight over loaded railcar weight `alpha`.
    pub weight_ratio: f64,
    /// Holding cost `h` (USD per car-hour).
    pub holding_cost: f64,
    /// Time per charging/refuelling/swap stop `ts` (hours).
    pub stop_time: f64,
    /// Fixed cost per dispatched train `k` (USD/train).
    pub dispatch_cost: f64,
    /// Variable cost per railcar `p` (USD/car).
    #[serde(default)]
    pub car_cost: f64,
}

/// Continuous optimum, possibly clamped to the feasible range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousOptimum {
    pub n: f64,
    /// Set when the optimum sits on a bound rather than at a stationary point.
    pub boundary: Option<Boundary>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub first: f64,
    pub second: f64,
}

fn require_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

fn require_nonnegative(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")))
    }
}

impl SimpleModelParams {
    pub fn validate(&self) -> Result<()> {
        require_positive("distance", self.distance)?;
        require_nonnegative("nominal_time", self.nominal_time)?;
        require_positive("train_length", self.train_length)?;
        require_positive("annual_demand", self.annual_demand)?;
        require_positive("range_per_tender", self.range_per_tender)?;
        require_positive("weight_ratio", self.weight_ratio)?;
        require_nonnegative("holding_cost", self.holding_cost)?;
        require_nonnegative("stop_time", self.stop_time)?;
        require_nonnegative("dispatch_cost", self.dispatch_cost)?;
        require_nonnegative("car_cost", self.car_cost)?;
        if self.train_length < 2.0 {
            return Err(Error::invalid(
                "train_length",
                format!("need at least 2 cars, got {}", self.train_length),
            ));
        }
        if self.train_length - self.weight_ratio < 1.0 {
            return Err(Error::Infeasible(format!(
                "one tender (weight ratio {}) leaves no revenue car in a {}-car train",
                self.weight_ratio, self.train_length
            )));
        }
        Ok(())
    }

    pub(crate) fn domain(&self) -> TenderDomain {
        TenderDomain {
            train_length: self.train_length,
            weight_ratio: self.weight_ratio,
        }
    }

    /// `D / r`, the distance in units of one tender's range.
    pub(crate) fn range_units(&self) -> f64 {
        self.distance / self.range_per_tender
    }

    /// Upper end of the feasible range, `(L - 1) / alpha`.
    pub fn max_tenders(&self) -> f64 {
        self.domain().upper()
    }

    /// Trip time with the continuous stop count.
    pub(crate) fn trip_time_unchecked(&self, n: f64) -> f64 {
        self.nominal_time + self.distance / (self.range_per_tender * n) * self.stop_time
    }
}

/// `t(n) = t0 + D / (r n) * ts`.
pub fn trip_time(params: &SimpleModelParams, n: f64) -> Result<f64> {
    params.validate()?;
    params.domain().check(n)?;
    Ok(params.trip_time_unchecked(n))
}

/// Evaluates `TC(n)` with components `order`, `delay` and `purchase`.
pub fn total_cost(params: &SimpleModelParams, n: f64) -> Result<ConfigurationEvaluation> {
    params.validate()?;
    let domain = params.domain();
    domain.check(n)?;
    Ok(evaluate_unchecked(params, n))
}

pub(crate) fn evaluate_unchecked(params: &SimpleModelParams, n: f64) -> ConfigurationEvaluation {
    let payload = params.domain().payload(n);
    let trip = params.trip_time_unchecked(n);
    let q = params.annual_demand;
    let mut components = BTreeMap::new();
    components.insert(CostComponent::Order, params.dispatch_cost * q / payload);
    components.insert(CostComponent::Delay, params.holding_cost * trip * q);
    components.insert(CostComponent::Purchase, params.car_cost * q);
    ConfigurationEvaluation::new(
        n,
        payload,
        params.distance,
        params.range_per_tender * n,
        trip,
        components,
    )
}

/// Closed-form continuous optimum, clamped to `[1, (L - 1) / alpha]`.
///
/// With no stop-related delay (`h ts D = 0`) the cost only grows with `n`
/// and the lower bound is returned; with `k = 0` the cost only falls and the
/// upper bound is returned. Either way the boundary flag is set.
pub fn optimal_n_continuous(params: &SimpleModelParams) -> Result<ContinuousOptimum> {
    params.validate()?;
    let domain = params.domain();
    let delay_weight = params.holding_cost * params.stop_time * params.distance;
    if delay_weight == 0.0 {
        return Ok(ContinuousOptimum {
            n: 1.0,
            boundary: Some(Boundary::Lower),
        });
    }
    if params.dispatch_cost == 0.0 {
        return Ok(ContinuousOptimum {
            n: domain.upper(),
            boundary: Some(Boundary::Upper),
        });
    }
    let root = (params.dispatch_cost * params.weight_ratio * params.range_per_tender / delay_weight).sqrt();
    let unconstrained = params.train_length / (params.weight_ratio + root);
    let (n, boundary) = domain.clamp(unconstrained);
    Ok(ContinuousOptimum { n, boundary })
}

/// Economically optimal train range `r n*`.
pub fn optimal_range(params: &SimpleModelParams) -> Result<f64> {
    Ok(params.range_per_tender * optimal_n_continuous(params)?.n)
}

/// Minimum annual cost. Uses the closed form for interior optima and
/// evaluates `TC` at the bound otherwise.
pub fn min_total_cost(params: &SimpleModelParams) -> Result<f64> {
    let opt = optimal_n_continuous(params)?;
    if opt.boundary.is_some() {
        return Ok(evaluate_unchecked(params, opt.n).total_cost);
    }
    let SimpleModelParams {
        train_length: l,
        annual_demand: q,
        weight_ratio: alpha,
        holding_cost: h,
        stop_time: ts,
        dispatch_cost: k,
        ..
    } = *params;
    let delay = h * params.range_units() * ts;
    Ok(q / l * (k + alpha * delay + 2.0 * (k * alpha * delay).sqrt())
        + h * params.nominal_time * q
        + params.car_cost * q)
}

/// Integer optimum by comparing the two feasible counts (or locomotive
/// multiples) adjacent to the continuous optimum.
pub fn optimal_n_integer(params: &SimpleModelParams, granularity: Granularity) -> Result<IntegerOptimum> {
    let opt = optimal_n_continuous(params)?;
    adjacent_integer(&params.domain(), opt.n, granularity.step(), |n| {
        Ok(evaluate_unchecked(params, n))
    })
}

/// First and second derivatives of `TC` with respect to `n`.
pub fn derivatives(params: &SimpleModelParams, n: f64) -> Result<Derivatives> {
    params.validate()?;
    let domain = params.domain();
    domain.check(n)?;
    let kq = params.dispatch_cost * params.annual_demand;
    let alpha = params.weight_ratio;
    let payload = domain.payload(n);
    let delay = params.holding_cost * params.range_units() * params.stop_time * params.annual_demand;
    Ok(Derivatives {
        first: kq * alpha / payload.powi(2) - delay / n.powi(2),
        second: 2.0 * kq * alpha * alpha / payload.powi(3) + 2.0 * delay / n.powi(3),
    })
}
