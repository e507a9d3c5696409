//! Tender model with time-dependent fixed costs.
//!
//! Locomotive and tender equipment are charged by the hour of trip time and
//! energy by the stop, so the per-train fixed cost becomes
//!
//! ```text
//! k(n) = (n_l c_l + n c_n) t(n) + f n s(n)
//! TC(n) = k(n) Q / (L - alpha n) + h t(n) Q
//!       = A n/(L - alpha n) + B/(L n - alpha n^2) + C/(L - alpha n) + E/n + F
//! ```
//!
//! Every term is convex on the feasible range, so the stationary point of
//! the quadratic `TC' = 0` (or a bounded search when that is degenerate)
//! gives the global optimum and the adjacent-integer rule still applies.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{
    adjacent_integer, Boundary, ConfigurationEvaluation, CostComponent, Granularity, IntegerOptimum,
    TenderDomain,
};
use crate::simple::{ContinuousOptimum, Derivatives, SimpleModelParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralModelParams {
    /// Market and operating inputs; `dispatch_cost` is not used here.
    pub base: SimpleModelParams,
    /// Locomotives per train `n_l`.
    pub locomotives: u32,
    /// Locomotive equipment (and labour) cost rate `c_l` (USD/hour).
    pub locomotive_rate: f64,
    /// Tender car equipment cost rate `c_n` (USD/hour).
    pub tender_rate: f64,
    /// Recharging cost per tender per stop `f` (USD).
    pub energy_cost_per_stop: f64,
}

/// The five regrouped coefficients (USD/year scale).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub e: f64,
    pub f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    ClosedForm,
    TernarySearch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralOptimum {
    pub continuous: ContinuousOptimum,
    pub method: SolveMethod,
    pub integer: IntegerOptimum,
}

impl GeneralModelParams {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.locomotives == 0 {
            return Err(Error::invalid("locomotives", "need at least one locomotive"));
        }
        for (name, v) in [
            ("locomotive_rate", self.locomotive_rate),
            ("tender_rate", self.tender_rate),
            ("energy_cost_per_stop", self.energy_cost_per_stop),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    fn domain(&self) -> TenderDomain {
        self.base.domain()
    }

    /// Tenders per locomotive for `n` tenders per train.
    pub fn per_locomotive(&self, n: f64) -> f64 {
        n / self.locomotives as f64
    }

    /// Coefficients of the regrouped cost.
    pub fn coefficients(&self) -> CoefficientSet {
        let p = &self.base;
        let q = p.annual_demand;
        let units = p.range_units();
        let loco = self.locomotives as f64 * self.locomotive_rate;
        CoefficientSet {
            a: self.tender_rate * p.nominal_time * q,
            b: loco * units * p.stop_time * q,
            c: (loco * p.nominal_time
                + self.tender_rate * units * p.stop_time
                + self.energy_cost_per_stop * units)
                * q,
            e: p.holding_cost * units * p.stop_time * q,
            f: p.holding_cost * p.nominal_time * q,
        }
    }

    fn fixed_cost_unchecked(&self, n: f64) -> f64 {
        let p = &self.base;
        let stops = p.distance / (p.range_per_tender * n);
        (self.locomotives as f64 * self.locomotive_rate + n * self.tender_rate) * p.trip_time_unchecked(n)
            + self.energy_cost_per_stop * n * stops
    }

    fn direct_total(&self, n: f64) -> f64 {
        let p = &self.base;
        let q = p.annual_demand;
        self.fixed_cost_unchecked(n) * q / self.domain().payload(n)
            + p.holding_cost * p.trip_time_unchecked(n) * q
            + p.car_cost * q
    }

    fn regrouped_total(&self, n: f64) -> f64 {
        let CoefficientSet { a, b, c, e, f } = self.coefficients();
        let l = self.base.train_length;
        let alpha = self.base.weight_ratio;
        let payload = l - alpha * n;
        a * n / payload + b / (l * n - alpha * n * n) + c / payload + e / n + f + self.base.car_cost * self.base.annual_demand
    }

    fn components_unchecked(&self, n: f64) -> BTreeMap<CostComponent, f64> {
        let p = &self.base;
        let q = p.annual_demand;
        let units = p.range_units();
        let payload = self.domain().payload(n);
        let loco = self.locomotives as f64 * self.locomotive_rate;
        let mut out = BTreeMap::new();
        out.insert(CostComponent::Locomotive, loco * p.nominal_time * q / payload);
        out.insert(CostComponent::Tender, self.tender_rate * p.nominal_time * q * n / payload);
        out.insert(CostComponent::Charging, self.energy_cost_per_stop * units * q / payload);
        out.insert(
            CostComponent::Delay,
            (loco / (n * payload) + self.tender_rate / payload + p.holding_cost / n) * units * p.stop_time * q,
        );
        out.insert(CostComponent::Constant, p.holding_cost * p.nominal_time * q);
        if p.car_cost != 0.0 {
            out.insert(CostComponent::Purchase, p.car_cost * q);
        }
        out
    }

    pub(crate) fn evaluate_unchecked(&self, n: f64) -> ConfigurationEvaluation {
        let p = &self.base;
        ConfigurationEvaluation::new(
            n,
            self.domain().payload(n),
            p.distance,
            p.range_per_tender * n,
            p.trip_time_unchecked(n),
            self.components_unchecked(n),
        )
    }

    fn first_derivative_unchecked(&self, n: f64) -> f64 {
        let CoefficientSet { a, b, c, e, .. } = self.coefficients();
        let l = self.base.train_length;
        let alpha = self.base.weight_ratio;
        let payload = l - alpha * n;
        let g = l * n - alpha * n * n;
        a * l / payload.powi(2) + b * (2.0 * alpha * n - l) / g.powi(2) + c * alpha / payload.powi(2) - e / (n * n)
    }

    fn second_derivative_unchecked(&self, n: f64) -> f64 {
        let CoefficientSet { a, b, c, e, .. } = self.coefficients();
        let l = self.base.train_length;
        let alpha = self.base.weight_ratio;
        let p3 = (l - alpha * n).powi(3);
        let shape = 3.0 * (alpha * n - l / 2.0).powi(2) + l * l / 4.0;
        a * 2.0 * alpha * l / p3
            + b * 2.0 * shape / (n.powi(3) * p3)
            + c * 2.0 * alpha * alpha / p3
            + e * 2.0 / n.powi(3)
    }
}

/// Per-train fixed cost `k(n) = (n_l c_l + n c_n) t(n) + f n s(n)`.
pub fn fixed_cost(params: &GeneralModelParams, n: f64) -> Result<f64> {
    params.validate()?;
    params.domain().check(n)?;
    Ok(params.fixed_cost_unchecked(n))
}

const FORM_TOLERANCE: f64 = 1e-10;

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Evaluates `TC(n)` and its five-way split. The direct and regrouped forms
/// are both computed and must agree.
pub fn total_cost(params: &GeneralModelParams, n: f64) -> Result<ConfigurationEvaluation> {
    params.validate()?;
    params.domain().check(n)?;
    let eval = params.evaluate_unchecked(n);
    let direct = params.direct_total(n);
    let regrouped = params.regrouped_total(n);
    let gap = relative_gap(direct, regrouped);
    if gap > FORM_TOLERANCE {
        return Err(Error::Inconsistent(format!(
            "direct total {direct} and regrouped total {regrouped} differ by {gap:e} at n = {n}"
        )));
    }
    let gap = relative_gap(direct, eval.total_cost);
    if gap > FORM_TOLERANCE {
        return Err(Error::Inconsistent(format!(
            "component sum {} and direct total {direct} differ by {gap:e} at n = {n}",
            eval.total_cost
        )));
    }
    Ok(eval)
}

/// `TC'` and `TC''` at `n`.
pub fn derivatives(params: &GeneralModelParams, n: f64) -> Result<Derivatives> {
    params.validate()?;
    params.domain().check(n)?;
    Ok(Derivatives {
        first: params.first_derivative_unchecked(n),
        second: params.second_derivative_unchecked(n),
    })
}

/// Root of the stationarity quadratic, or `None` when the leading
/// coefficient vanishes.
pub fn closed_form_candidate(coeffs: &CoefficientSet, train_length: f64, weight_ratio: f64) -> Option<f64> {
    let CoefficientSet { a, b, c, e, .. } = *coeffs;
    let (l, alpha) = (train_length, weight_ratio);
    let den = a * l + c * alpha - e * alpha * alpha;
    let scale = a * l + c * alpha + e * alpha * alpha;
    if scale == 0.0 || den.abs() < 1e-12 * scale {
        return None;
    }
    let delay = b + e * l;
    let radicand = delay * (a * l * l + b * alpha * alpha + c * l * alpha);
    let n = (-alpha * delay + radicand.max(0.0).sqrt()) / den;
    n.is_finite().then_some(n)
}

const TERNARY_ITERATIONS: usize = 200;

/// Bounded ternary search on the convex total. Stops when the bracket can no
/// longer shrink in floating point.
fn ternary_minimum(params: &GeneralModelParams) -> ContinuousOptimum {
    let domain = params.domain();
    let (lower, upper) = (1.0, domain.upper());
    let (mut lo, mut hi) = (lower, upper);
    for _ in 0..TERNARY_ITERATIONS {
        let third = (hi - lo) / 3.0;
        if third <= f64::EPSILON * hi {
            break;
        }
        let m1 = lo + third;
        let m2 = hi - third;
        if params.direct_total(m1) <= params.direct_total(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let n = 0.5 * (lo + hi);
    let near = 1e-9 * upper.max(1.0);
    if n - lower <= near && params.first_derivative_unchecked(lower) >= 0.0 {
        ContinuousOptimum {
            n: lower,
            boundary: Some(Boundary::Lower),
        }
    } else if upper - n <= near && params.first_derivative_unchecked(upper) <= 0.0 {
        ContinuousOptimum {
            n: upper,
            boundary: Some(Boundary::Upper),
        }
    } else {
        ContinuousOptimum { n, boundary: None }
    }
}

/// Continuous optimum and the solver path that produced it.
pub fn optimal_n_continuous(params: &GeneralModelParams) -> Result<(ContinuousOptimum, SolveMethod)> {
    params.validate()?;
    let domain = params.domain();
    let coeffs = params.coefficients();
    let candidate = closed_form_candidate(&coeffs, params.base.train_length, params.base.weight_ratio)
        .filter(|&n| n >= 1.0 && n <= domain.upper());
    let (opt, method) = match candidate {
        Some(n) => (ContinuousOptimum { n, boundary: None }, SolveMethod::ClosedForm),
        None => (ternary_minimum(params), SolveMethod::TernarySearch),
    };
    debug_assert!(
        method == SolveMethod::TernarySearch || {
            let check = ternary_minimum(params);
            params.direct_total(opt.n) <= params.direct_total(check.n) * (1.0 + 1e-9) + 1e-12
        },
        "closed-form optimum worse than ternary search for {params:?}"
    );
    Ok((opt, method))
}

/// Continuous optimum plus the integer optimum under `granularity`.
pub fn optimal_n_general(params: &GeneralModelParams, granularity: Granularity) -> Result<GeneralOptimum> {
    let (continuous, method) = optimal_n_continuous(params)?;
    let integer = adjacent_integer(&params.domain(), continuous.n, granularity.step(), |n| {
        Ok(params.evaluate_unchecked(n))
    })?;
    Ok(GeneralOptimum {
        continuous,
        method,
        integer,
    })
}

/// Cost of every multiple `from..=to` of the granularity step; `to` defaults to the
/// largest feasible multiple.
pub fn cost_curve(
    params: &GeneralModelParams,
    granularity: Granularity,
    from: u32,
    to: Option<u32>,
) -> Result<Vec<IntegerOptimum>> {
    params.validate()?;
    let step = granularity.step();
    let max_m = params.domain().max_multiple(step);
    let to = to.unwrap_or(max_m);
    if from == 0 {
        return Err(Error::invalid("from", "curve starts at one step or more"));
    }
    if from > to {
        return Err(Error::invalid("to", format!("empty range {from}..={to}")));
    }
    if to > max_m {
        return Err(Error::Domain {
            n: (to * step) as f64,
            bound: format!(
                "largest feasible count in steps of {step} is {} (L - alpha n >= 1)",
                max_m * step
            ),
        });
    }
    Ok((from..=to)
        .map(|m| IntegerOptimum {
            tenders: m * step,
            per_locomotive: m,
            evaluation: params.evaluate_unchecked((m * step) as f64),
        })
        .collect())
}

/// Signs of the component slopes at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub n: f64,
    pub locomotive_slope: f64,
    pub tender_slope: f64,
    pub charging_slope: f64,
    pub delay_slope: f64,
    /// `delay_slope <= 0`.
    pub delay_decreasing: bool,
    /// `c_n <= n_l c_l (L - 2 alpha n)/(alpha n^2) + h (L - alpha n)^2/(alpha n^2)`,
    /// which holds exactly when the delay component is non-increasing.
    pub delay_condition: bool,
    /// The same bound without the `alpha n^2` divisor on the holding term,
    /// combined with `L - 2 alpha n <= 0`.
    pub delay_condition_as_printed: bool,
}

pub fn monotonicity_certificate(params: &GeneralModelParams, n: f64) -> Result<MonotonicityReport> {
    params.validate()?;
    let domain = params.domain();
    domain.check(n)?;
    let p = &params.base;
    let q = p.annual_demand;
    let (l, alpha) = (p.train_length, p.weight_ratio);
    let payload = domain.payload(n);
    let units = p.range_units();
    let loco = params.locomotives as f64 * params.locomotive_rate;
    let g = l * n - alpha * n * n;
    let delay_slope = (loco * (2.0 * alpha * n - l) / g.powi(2) + params.tender_rate * alpha / payload.powi(2)
        - p.holding_cost / (n * n))
        * units
        * p.stop_time
        * q;
    let loco_bound = loco * (l - 2.0 * alpha * n) / (alpha * n * n);
    Ok(MonotonicityReport {
        n,
        locomotive_slope: loco * p.nominal_time * q * alpha / payload.powi(2),
        tender_slope: params.tender_rate * p.nominal_time * q * l / payload.powi(2),
        charging_slope: params.energy_cost_per_stop * units * q * alpha / payload.powi(2),
        delay_slope,
        delay_decreasing: delay_slope <= 0.0,
        delay_condition: params.tender_rate <= loco_bound + p.holding_cost * payload.powi(2) / (alpha * n * n),
        delay_condition_as_printed: params.tender_rate <= loco_bound + p.holding_cost * payload.powi(2)
            && l - 2.0 * alpha * n <= 0.0,
    })
}

/// Second derivatives at one sample point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvaturePoint {
    pub n: f64,
    pub total: f64,
    pub locomotive: f64,
    pub tender: f64,
    pub charging: f64,
    pub delay: f64,
    /// Central second difference of the total, when the point has room for it.
    pub finite_difference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub points: Vec<CurvaturePoint>,
}

impl ConvexityReport {
    /// Largest relative gap between analytic and finite-difference `TC''`.
    pub fn max_relative_gap(&self) -> f64 {
        self.points
            .iter()
            .filter_map(|p| p.finite_difference.map(|fd| relative_gap(p.total, fd)))
            .fold(0.0, f64::max)
    }
}

/// Evaluates `TC''` and each component's curvature at `samples`; any
/// negative analytic value is a model violation.
pub fn convexity_certificate(params: &GeneralModelParams, samples: &[f64]) -> Result<ConvexityReport> {
    params.validate()?;
    let domain = params.domain();
    let p = &params.base;
    let q = p.annual_demand;
    let (l, alpha) = (p.train_length, p.weight_ratio);
    let units = p.range_units();
    let loco = params.locomotives as f64 * params.locomotive_rate;
    let mut points = Vec::with_capacity(samples.len());
    for &n in samples {
        domain.check(n)?;
        let p3 = domain.payload(n).powi(3);
        let g3 = (l * n - alpha * n * n).powi(3);
        let point = CurvaturePoint {
            n,
            total: params.second_derivative_unchecked(n),
            locomotive: loco * p.nominal_time * q * 2.0 * alpha * alpha / p3,
            tender: params.tender_rate * p.nominal_time * q * 2.0 * alpha * l / p3,
            charging: params.energy_cost_per_stop * units * q * 2.0 * alpha * alpha / p3,
            delay: 2.0
                * (loco * (3.0 * alpha * alpha * n * n - 3.0 * l * alpha * n + l * l) / g3
                    + params.tender_rate * alpha * alpha / p3
                    + p.holding_cost / n.powi(3))
                * units
                * p.stop_time
                * q,
            finite_difference: {
                let h = 1e-4 * n.max(1.0);
                (n - 2.0 * h >= 1.0 && n + 2.0 * h <= domain.upper()).then(|| {
                    (params.direct_total(n + h) - 2.0 * params.direct_total(n) + params.direct_total(n - h)) / (h * h)
                })
            },
        };
        for (name, v) in [
            ("total", point.total),
            ("locomotive", point.locomotive),
            ("tender", point.tender),
            ("charging", point.charging),
            ("delay", point.delay),
        ] {
            if !(v >= 0.0) {
                return Err(Error::ModelViolation(format!(
                    "negative second derivative of {name} cost ({v}) at n = {n}"
                )));
            }
        }
        points.push(point);
    }
    Ok(ConvexityReport { points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SimpleModelParams {
        SimpleModelParams {
            distance: 1400.0,
            nominal_time: 70.7,
            train_length: 73.0,
            annual_demand: 1000.0,
            range_per_tender: 64.0,
            weight_ratio: 1.3,
            holding_cost: 9.5,
            stop_time: 3.73,
            dispatch_cost: 0.0,
            car_cost: 0.0,
        }
    }

    fn coal() -> GeneralModelParams {
        GeneralModelParams {
            base: base(),
            locomotives: 5,
            locomotive_rate: 235.6,
            tender_rate: 56.6,
            energy_cost_per_stop: 2240.0,
        }
    }

    #[test]
    fn locomotive_only_fixed_cost() {
        let p = GeneralModelParams {
            tender_rate: 0.0,
            energy_cost_per_stop: 0.0,
            ..coal()
        };
        for n in [1.0, 5.0, 20.0] {
            let t = p.base.trip_time_unchecked(n);
            assert!((fixed_cost(&p, n).unwrap() - 5.0 * 235.6 * t).abs() < 1e-9);
        }
    }

    #[test]
    fn energy_cost_invariant_in_n() {
        let p = GeneralModelParams {
            locomotive_rate: 0.0,
            tender_rate: 0.0,
            ..coal()
        };
        let expected = 2240.0 * 1400.0 / 64.0;
        for n in [1.0, 3.0, 17.5, 40.0] {
            assert!((fixed_cost(&p, n).unwrap() - expected).abs() < 1e-9 * expected);
        }
    }

    #[test]
    fn delay_only_reduces_to_holding() {
        let p = GeneralModelParams {
            locomotive_rate: 0.0,
            tender_rate: 0.0,
            energy_cost_per_stop: 0.0,
            ..coal()
        };
        for n in [1.0, 4.0, 30.0] {
            let e = total_cost(&p, n).unwrap();
            let expected = 9.5 * p.base.trip_time_unchecked(n) * 1000.0;
            assert!((e.total_cost - expected).abs() < 1e-9 * expected);
        }
    }

    #[test]
    fn no_stop_case() {
        let mut p = coal();
        p.base.holding_cost = 0.0;
        p.base.stop_time = 0.0;
        for n in [1.0, 10.0] {
            let payload = 73.0 - 1.3 * n;
            let expected = (5.0 * 235.6 + n * 56.6) * 70.7 * 1000.0 / payload + 2240.0 * 1400.0 / 64.0 * 1000.0 / payload;
            let got = total_cost(&p, n).unwrap().total_cost;
            assert!((got - expected).abs() < 1e-9 * expected);
        }
    }

    #[test]
    fn components_are_the_five_groups() {
        let e = total_cost(&coal(), 5.0).unwrap();
        let keys: Vec<_> = e.components.keys().copied().collect();
        assert_eq!(
            keys,
            vec![
                CostComponent::Locomotive,
                CostComponent::Tender,
                CostComponent::Charging,
                CostComponent::Delay,
                CostComponent::Constant
            ]
        );
    }

    #[test]
    fn coal_curve_increasing() {
        let curve = cost_curve(&coal(), Granularity::PerLocomotive(5), 1, Some(10)).unwrap();
        assert_eq!(curve.len(), 10);
        assert!(curve.windows(2).all(|w| w[0].evaluation.total_cost < w[1].evaluation.total_cost));
        assert_eq!(cost_curve(&coal(), Granularity::PerLocomotive(5), 3, Some(3)).unwrap().len(), 1);
        assert!(cost_curve(&coal(), Granularity::PerLocomotive(5), 1, Some(12)).is_err());
        assert!(cost_curve(&coal(), Granularity::PerTrain, 0, None).is_err());
    }

    #[test]
    fn coal_is_one_per_locomotive() {
        let opt = optimal_n_general(&coal(), Granularity::PerLocomotive(5)).unwrap();
        assert_eq!(opt.integer.per_locomotive, 1);
        assert_eq!(opt.integer.tenders, 5);
        assert!((opt.integer.evaluation.range - 320.0).abs() < 1e-9);
        assert_eq!(opt.integer.evaluation.stops_practical, 4);
    }

    #[test]
    fn closed_form_reduces_to_constant_fixed_cost_model() {
        // c_n = 0 and c_l = 0 leave C = f D/r Q, i.e. k = f D / r.
        let p = GeneralModelParams {
            locomotive_rate: 0.0,
            tender_rate: 0.0,
            ..coal()
        };
        let simple = SimpleModelParams {
            dispatch_cost: 2240.0 * 1400.0 / 64.0,
            ..p.base.clone()
        };
        let (g, method) = optimal_n_continuous(&p).unwrap();
        let s = crate::simple::optimal_n_continuous(&simple).unwrap();
        assert_eq!(method, SolveMethod::ClosedForm);
        assert!((g.n - s.n).abs() <= 1e-9 * s.n);
    }

    #[test]
    fn degenerate_leading_coefficient_uses_search() {
        // A = C = 0 and E = 0 leaves only B/(Ln - alpha n^2), minimized at L/(2 alpha).
        let mut p = coal();
        p.tender_rate = 0.0;
        p.energy_cost_per_stop = 0.0;
        p.base.nominal_time = 0.0;
        p.base.holding_cost = 0.0;
        let (opt, method) = optimal_n_continuous(&p).unwrap();
        assert_eq!(method, SolveMethod::TernarySearch);
        assert!((opt.n - 73.0 / 2.6).abs() < 1e-6);
    }

    #[test]
    fn increasing_cost_lands_on_lower_bound() {
        let mut p = coal();
        p.base.holding_cost = 0.0;
        p.locomotive_rate = 0.0;
        let (opt, _) = optimal_n_continuous(&p).unwrap();
        assert_eq!(opt.n, 1.0);
        assert_eq!(opt.boundary, Some(Boundary::Lower));
    }

    #[test]
    fn charging_slope_positive() {
        let r = monotonicity_certificate(&coal(), 7.0).unwrap();
        let expected = 2240.0 * 1400.0 / 64.0 * 1000.0 * 1.3 / (73.0 - 9.1_f64).powi(2);
        assert!((r.charging_slope - expected).abs() < 1e-9 * expected);
        assert!(r.locomotive_slope > 0.0 && r.tender_slope > 0.0);
    }

    #[test]
    fn delay_decreasing_when_holding_dominates() {
        let mut p = coal();
        p.tender_rate = 0.0;
        p.base.holding_cost = 1e4;
        let r = monotonicity_certificate(&p, 10.0).unwrap();
        assert!(r.delay_decreasing);
        assert!(r.delay_condition);
    }

    #[test]
    fn holding_only_curvature() {
        let mut p = coal();
        p.locomotive_rate = 0.0;
        p.tender_rate = 0.0;
        p.energy_cost_per_stop = 0.0;
        let report = convexity_certificate(&p, &[2.0]).unwrap();
        let e = p.coefficients().e;
        assert!((report.points[0].total - 2.0 * e / 8.0).abs() < 1e-9 * e);
    }

    #[test]
    fn curvature_positive_near_upper_bound() {
        let p = coal();
        let upper = p.base.max_tenders();
        let report = convexity_certificate(&p, &[upper - 1e-6, upper - 1e-3]).unwrap();
        assert!(report.points.iter().all(|pt| pt.total > 0.0));
    }

    #[test]
    fn component_curvatures_sum_to_total() {
        let report = convexity_certificate(&coal(), &[1.5, 10.0, 40.0]).unwrap();
        for pt in &report.points {
            let sum = pt.locomotive + pt.tender + pt.charging + pt.delay;
            assert!(relative_gap(sum, pt.total) < 1e-12);
        }
    }

    #[test]
    fn rejects_zero_locomotives() {
        let p = GeneralModelParams {
            locomotives: 0,
            ..coal()
        };
        assert!(matches!(total_cost(&p, 1.0), Err(Error::InvalidParameter { name: "locomotives", .. })));
    }
}
