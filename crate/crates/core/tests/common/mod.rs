#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tender_core::evaluation::Granularity;
use tender_core::general::GeneralModelParams;
use tender_core::pipeline::MarketRecord;
use tender_core::simple::SimpleModelParams;
use tender_core::techno::{Commodity, Region};
use tender_core::{general, simple};
use tender_oracle::{finite_diff, grid_min, integer_scan, DerivativeOrder, GridSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Feasible instance with at most ~150 tenders in range.
pub fn random_simple(rng: &mut ChaCha8Rng) -> SimpleModelParams {
    let train_length = rng.random_range(10.0..150.0_f64).round();
    let alpha_lo = ((train_length - 1.0) / 150.0).max(0.2);
    let alpha_hi = (train_length - 1.5).min(12.0);
    SimpleModelParams {
        distance: rng.random_range(50.0..3000.0),
        nominal_time: rng.random_range(0.0..120.0),
        train_length,
        annual_demand: rng.random_range(100.0..10_000.0),
        range_per_tender: rng.random_range(20.0..400.0),
        weight_ratio: log_uniform(rng, alpha_lo, alpha_hi),
        holding_cost: rng.random_range(0.5..40.0),
        stop_time: rng.random_range(0.2..30.0),
        dispatch_cost: log_uniform(rng, 100.0, 1e6),
        car_cost: 0.0,
    }
}

pub fn random_general(rng: &mut ChaCha8Rng) -> GeneralModelParams {
    GeneralModelParams {
        base: SimpleModelParams {
            dispatch_cost: 0.0,
            ..random_simple(rng)
        },
        locomotives: rng.random_range(1..=6),
        locomotive_rate: rng.random_range(0.0..400.0),
        tender_rate: rng.random_range(0.0..120.0),
        energy_cost_per_stop: rng.random_range(0.0..5000.0),
    }
}

/// Total cost written out directly from the model definition.
pub fn simple_cost(p: &SimpleModelParams, n: f64) -> f64 {
    let t = p.nominal_time + p.distance / (p.range_per_tender * n) * p.stop_time;
    p.dispatch_cost * p.annual_demand / (p.train_length - p.weight_ratio * n)
        + p.holding_cost * t * p.annual_demand
        + p.car_cost * p.annual_demand
}

/// Total cost with per-train fixed cost `(n_l c_l + n c_n) t(n) + f n s(n)`.
pub fn general_cost(g: &GeneralModelParams, n: f64) -> f64 {
    let p = &g.base;
    let stops = p.distance / (p.range_per_tender * n);
    let t = p.nominal_time + stops * p.stop_time;
    let k = (g.locomotives as f64 * g.locomotive_rate + n * g.tender_rate) * t + g.energy_cost_per_stop * n * stops;
    k * p.annual_demand / (p.train_length - p.weight_ratio * n) + p.holding_cost * t * p.annual_demand
}

#[allow(clippy::too_many_arguments)]
pub fn record(
    id: &str,
    commodity: Commodity,
    distance: f64,
    t0: f64,
    train_length: f64,
    demand: f64,
    alpha: f64,
    locomotives: u32,
    h: f64,
) -> MarketRecord {
    MarketRecord {
        market_id: id.into(),
        railroad: "BNSF".into(),
        region: Region::Western,
        commodity,
        distance,
        annual_demand: demand,
        train_length,
        locomotives,
        speed: None,
        nominal_time: Some(t0),
        alpha,
        gross_tons: None,
        h_override: Some(h),
        origin: None,
        destination: None,
    }
}

/// Western linehaul examples with rates derived from the technology defaults.
pub fn coal_record() -> MarketRecord {
    record("coal", Commodity::Coal, 1400.0, 70.7, 73.0, 1000.0, 1.3, 5, 9.5)
}

pub fn intermodal_record() -> MarketRecord {
    record("intermodal", Commodity::Intermodal, 2300.0, 75.7, 118.0, 1500.0, 10.4, 1, 32.0)
}

pub fn automotive_record() -> MarketRecord {
    record("automotive", Commodity::MotorVehicles, 2300.0, 109.0, 118.0, 3000.0, 10.4, 1, 9.5)
}

pub fn synthetic_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic_markets.csv")
}

/// Closed forms against the 1e-3 grid and the exhaustive integer scan.
/// Returns one message per disagreement.
pub fn check_closed_forms(count: usize, seed: u64) -> Vec<String> {
    let mut rng = rng(seed);
    let mut failures = Vec::new();
    for i in 0..count {
        let p = random_simple(&mut rng);
        let grid = GridSpec::tender_domain(p.train_length, p.weight_ratio, 1e-3).unwrap();
        let (n_grid, _) = grid_min(|n| simple_cost(&p, n), &grid);
        let n_star = simple::optimal_n_continuous(&p).unwrap().n;
        if (n_star - n_grid).abs() > 1e-3 + 1e-9 {
            failures.push(format!("simple #{i}: closed form {n_star} vs grid {n_grid}"));
        }
        for granularity in [Granularity::PerTrain, Granularity::PerLocomotive(1 + (i as u32 % 4))] {
            let step = granularity.step();
            match (
                simple::optimal_n_integer(&p, granularity),
                integer_scan(|n| simple_cost(&p, n as f64), p.train_length, p.weight_ratio, step),
            ) {
                (Ok(opt), Ok((n_scan, _))) if opt.tenders == n_scan => {}
                (Err(_), Err(_)) => {}
                (a, b) => failures.push(format!(
                    "simple #{i} step {step}: optimizer {:?} vs scan {:?}",
                    a.map(|o| o.tenders).map_err(|e| e.to_string()),
                    b.map(|s| s.0)
                )),
            }
        }

        let g = random_general(&mut rng);
        let grid = GridSpec::tender_domain(g.base.train_length, g.base.weight_ratio, 1e-3).unwrap();
        let (n_grid, _) = grid_min(|n| general_cost(&g, n), &grid);
        let (opt, _) = general::optimal_n_continuous(&g).unwrap();
        if (opt.n - n_grid).abs() > 1e-3 + 1e-9 {
            failures.push(format!("general #{i}: optimum {} vs grid {n_grid}", opt.n));
        }
        let step = g.locomotives;
        let (n_scan, _) = integer_scan(|n| general_cost(&g, n as f64), g.base.train_length, g.base.weight_ratio, step)
            .unwrap_or((0, 0.0));
        match general::optimal_n_general(&g, Granularity::PerLocomotive(step)) {
            Ok(o) if o.integer.tenders == n_scan => {}
            Err(_) if n_scan == 0 => {}
            other => failures.push(format!(
                "general #{i}: integer {:?} vs scan {n_scan}",
                other.map(|o| o.integer.tenders).map_err(|e| e.to_string())
            )),
        }
    }
    failures
}

/// Relative gap with a floor for values that pass through zero.
fn rel_gap(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(floor)
}

/// Analytic derivatives against central differences, curvature signs,
/// component slope signs and the delay-monotonicity condition.
pub fn check_derivatives(count: usize, seed: u64) -> Vec<String> {
    let mut rng = rng(seed);
    let mut failures = Vec::new();
    let mut condition_checked = 0;
    for i in 0..count {
        let p = random_simple(&mut rng);
        let g = random_general(&mut rng);

        for (label, upper_len, alpha) in [
            ("simple", p.train_length, p.weight_ratio),
            ("general", g.base.train_length, g.base.weight_ratio),
        ] {
            // Keep a revenue car of margin so the second difference stays well conditioned.
            let hi = (upper_len - 2.0) / alpha;
            if hi <= 1.01 {
                continue;
            }
            let n = rng.random_range(1.01..hi);
            let lower = 1.0;
            let upper = (upper_len - 1.0) / alpha;
            let (analytic, cost): (tender_core::simple::Derivatives, Box<dyn Fn(f64) -> f64>) = if label == "simple" {
                (simple::derivatives(&p, n).unwrap(), Box::new(|x| simple_cost(&p, x)))
            } else {
                (general::derivatives(&g, n).unwrap(), Box::new(|x| general_cost(&g, x)))
            };
            let scale = cost(n) / n;
            let Ok(d1) = finite_diff(&cost, n, DerivativeOrder::First, lower, upper) else { continue };
            let Ok(d2) = finite_diff(&cost, n, DerivativeOrder::Second, lower, upper) else { continue };
            let gap1 = rel_gap(analytic.first, d1, 1e-4 * scale);
            if gap1 > 1e-5 {
                failures.push(format!("{label} #{i} n={n}: TC' {} vs fd {d1} (gap {gap1:e})", analytic.first));
            }
            // Sanity bound only: a large n-independent cost term leaves the second
            // difference rounding-limited when the curvature itself is small.
            let gap2 = rel_gap(analytic.second, d2, 1e-4 * scale / n);
            if gap2 > 1e-3 {
                failures.push(format!("{label} #{i} n={n}: TC'' {} vs fd {d2} (gap {gap2:e})", analytic.second));
            }
            if !(analytic.second > 0.0) {
                failures.push(format!("{label} #{i} n={n}: TC'' = {} not positive", analytic.second));
            }
        }

        let upper = (g.base.train_length - 1.0) / g.base.weight_ratio;
        let n = rng.random_range(1.0..upper.max(1.0 + 1e-9));
        let samples = [1.0, n, upper];
        if let Err(e) = general::convexity_certificate(&g, &samples) {
            failures.push(format!("general #{i}: {e}"));
        }
        let cert = general::monotonicity_certificate(&g, n).unwrap();
        let t0_q = g.base.nominal_time * g.base.annual_demand;
        if g.locomotive_rate > 0.0 && t0_q > 0.0 && !(cert.locomotive_slope > 0.0) {
            failures.push(format!("general #{i}: locomotive slope {}", cert.locomotive_slope));
        }
        if g.tender_rate > 0.0 && t0_q > 0.0 && !(cert.tender_slope > 0.0) {
            failures.push(format!("general #{i}: tender slope {}", cert.tender_slope));
        }
        if g.energy_cost_per_stop > 0.0 && !(cert.charging_slope > 0.0) {
            failures.push(format!("general #{i}: charging slope {}", cert.charging_slope));
        }
        // Numeric sign of the delay slope from a central difference of the delay component.
        let delay = |x: f64| {
            general::total_cost(&g, x)
                .unwrap()
                .component(tender_core::evaluation::CostComponent::Delay)
        };
        if let Ok(slope) = finite_diff(delay, n, DerivativeOrder::First, 1.0, upper) {
            let scale = delay(n) / n;
            if slope.abs() > 1e-6 * scale {
                condition_checked += 1;
                if cert.delay_condition != (slope <= 0.0) {
                    failures.push(format!(
                        "general #{i} n={n}: delay condition {} but numeric slope {slope}",
                        cert.delay_condition
                    ));
                }
            }
        }
    }
    if condition_checked < count / 2 {
        failures.push(format!("delay condition decided on only {condition_checked} of {count} instances"));
    }
    failures
}

/// Comparative statics of the closed-form optimum under one-at-a-time perturbation.
pub fn check_comparative_statics(count: usize, seed: u64) -> Vec<String> {
    let mut rng = rng(seed);
    let mut failures = Vec::new();
    let n_of = |p: &SimpleModelParams| simple::optimal_n_continuous(p).unwrap().n;
    for i in 0..count {
        let p = random_simple(&mut rng);
        let base = n_of(&p);
        let f = 1.0 + rng.random_range(0.01..1.0);
        let tol = 1e-12 * base;
        let up = |q: SimpleModelParams| n_of(&q) >= base - tol;
        let down = |q: SimpleModelParams| n_of(&q) <= base + tol;
        let checks = [
            ("h", up(SimpleModelParams { holding_cost: p.holding_cost * f, ..p.clone() })),
            ("t_s", up(SimpleModelParams { stop_time: p.stop_time * f, ..p.clone() })),
            ("D", up(SimpleModelParams { distance: p.distance * f, ..p.clone() })),
            ("k", down(SimpleModelParams { dispatch_cost: p.dispatch_cost * f, ..p.clone() })),
            ("r", down(SimpleModelParams { range_per_tender: p.range_per_tender * f, ..p.clone() })),
        ];
        for (name, ok) in checks {
            if !ok {
                failures.push(format!("#{i}: n* moved the wrong way when {name} grew by {f}"));
            }
        }
    }
    failures
}
