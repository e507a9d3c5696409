//! Reference routines used to check the closed-form optimizers.
//!
//! Everything here is deliberately naive: exhaustive grids, full integer
//! scans, textbook central differences and a stop-by-stop trip simulation.
//! The crate has no knowledge of the cost models it is used to check; callers
//! hand it plain closures.

// `!(x > 0.0)` style checks are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("grid is empty: lower {lower} > upper {upper}")]
    EmptyGrid { lower: f64, upper: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("no feasible integer tender count for train length {train_length} and weight ratio {weight_ratio} (multiple {multiple})")]
    EmptyRange {
        train_length: f64,
        weight_ratio: f64,
        multiple: u32,
    },
    #[error("point {n} is within {margin} of the domain edge [{lower}, {upper}]")]
    InsufficientMargin {
        n: f64,
        margin: f64,
        lower: f64,
        upper: f64,
    },
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Evenly spaced points `lower, lower + step, ...` not exceeding `upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    lower: f64,
    upper: f64,
    step: f64,
}

impl GridSpec {
    pub fn new(lower: f64, upper: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(OracleError::InvalidGrid(format!("step must be positive, got {step}")));
        }
        if !lower.is_finite() || !upper.is_finite() {
            return Err(OracleError::InvalidGrid("bounds must be finite".into()));
        }
        if lower > upper {
            return Err(OracleError::EmptyGrid { lower, upper });
        }
        Ok(Self { lower, upper, step })
    }

    /// Grid over the feasible tender range `[1, (L - 1) / alpha]`.
    pub fn tender_domain(train_length: f64, weight_ratio: f64, step: f64) -> Result<Self> {
        Self::new(1.0, (train_length - 1.0) / weight_ratio, step)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        ((self.upper - self.lower) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| (self.lower + i as f64 * self.step).min(self.upper))
    }
}

/// Exhaustive minimum over a grid. Ties go to the smallest point.
pub fn grid_min<F>(cost: F, grid: &GridSpec) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut best = (grid.lower, f64::INFINITY);
    for n in grid.points() {
        let c = cost(n);
        if c < best.1 {
            best = (n, c);
        }
    }
    best
}

/// Evaluates every feasible tender count that is a multiple of `multiple`
/// (`n >= 1`, `L - alpha * n >= 1`) and returns the cheapest `(n, cost)`.
/// Ties go to the smallest `n`.
pub fn integer_scan<F>(cost: F, train_length: f64, weight_ratio: f64, multiple: u32) -> Result<(u32, f64)>
where
    F: Fn(u32) -> f64,
{
    let multiple = multiple.max(1);
    let mut best: Option<(u32, f64)> = None;
    let mut n = multiple;
    while train_length - weight_ratio * n as f64 >= 1.0 {
        let c = cost(n);
        match best {
            Some((_, b)) if c >= b => {}
            _ => best = Some((n, c)),
        }
        n += multiple;
    }
    best.ok_or(OracleError::EmptyRange {
        train_length,
        weight_ratio,
        multiple,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeOrder {
    First,
    Second,
}

impl DerivativeOrder {
    /// Difference step used at `n`.
    pub fn step(self, n: f64) -> f64 {
        let scale = n.abs().max(1.0);
        match self {
            DerivativeOrder::First => 1e-6 * scale,
            DerivativeOrder::Second => 1e-4 * scale,
        }
    }
}

/// Central difference of `cost` at `n`. The point must sit at least two
/// steps inside `[lower, upper]`. The second difference is Richardson
/// extrapolated from steps `h` and `2h`, which keeps it accurate next to the
/// payload pole where the plain difference loses digits to truncation.
pub fn finite_diff<F>(cost: F, n: f64, order: DerivativeOrder, lower: f64, upper: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let h = order.step(n);
    let margin = 2.0 * h;
    if n - margin < lower || n + margin > upper {
        return Err(OracleError::InsufficientMargin {
            n,
            margin,
            lower,
            upper,
        });
    }
    Ok(match order {
        DerivativeOrder::First => (cost(n + h) - cost(n - h)) / (2.0 * h),
        DerivativeOrder::Second => {
            let centre = 2.0 * cost(n);
            let near = (cost(n + h) - centre + cost(n - h)) / (h * h);
            let far = (cost(n + 2.0 * h) - centre + cost(n - 2.0 * h)) / (4.0 * h * h);
            (4.0 * near - far) / 3.0
        }
    })
}

/// Plain ternary search for the minimum of a unimodal function on
/// `[lower, upper]`, stopping once the bracket is narrower than `tol`.
pub fn ternary_search<F>(cost: F, lower: f64, upper: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (lower, upper);
    while hi - lo > tol {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if cost(m1) <= cost(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopCounting {
    /// Fractional stops, `D / (r n)`.
    Continuous,
    /// Whole stops taken whenever the remaining distance exceeds the range.
    Ceiling,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripTrace {
    pub stops: f64,
    pub hours: f64,
}

/// Walks a trip of `distance` miles with `tenders` tenders of `range_per_tender`
/// miles each, starting fully charged.
pub fn trip_accumulate(
    distance: f64,
    range_per_tender: f64,
    tenders: f64,
    nominal_hours: f64,
    hours_per_stop: f64,
    mode: StopCounting,
) -> TripTrace {
    let range = range_per_tender * tenders;
    let stops = match mode {
        StopCounting::Continuous => distance / range,
        StopCounting::Ceiling => {
            let mut stops = 0u64;
            // remaining distance after each recharge, recomputed to avoid drift
            while distance - (stops + 1) as f64 * range > 0.0 {
                stops += 1;
            }
            stops as f64
        }
    };
    let mut hours = nominal_hours;
    match mode {
        StopCounting::Continuous => hours += stops * hours_per_stop,
        StopCounting::Ceiling => {
            for _ in 0..stops as u64 {
                hours += hours_per_stop;
            }
        }
    }
    TripTrace { stops, hours }
}
