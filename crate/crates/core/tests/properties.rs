use proptest::prelude::*;
use tender_core::evaluation::{CostComponent, Granularity};
use tender_core::general::{self, GeneralModelParams};
use tender_core::simple::{self, SimpleModelParams};

prop_compose! {
    fn simple_params()(
        train_length in 10.0..150.0_f64,
        alpha_frac in 0.01..0.9_f64,
        distance in 50.0..3000.0_f64,
        nominal_time in 0.0..120.0_f64,
        demand in 100.0..10_000.0_f64,
        range in 20.0..400.0_f64,
        holding in 0.5..40.0_f64,
        stop_time in 0.2..30.0_f64,
        dispatch in 100.0..1e6_f64,
    ) -> SimpleModelParams {
        SimpleModelParams {
            distance,
            nominal_time,
            train_length,
            annual_demand: demand,
            range_per_tender: range,
            weight_ratio: alpha_frac * (train_length - 1.0),
            holding_cost: holding,
            stop_time,
            dispatch_cost: dispatch,
            car_cost: 0.0,
        }
    }
}

prop_compose! {
    fn general_params()(
        base in simple_params(),
        locomotives in 1u32..6,
        locomotive_rate in 0.0..400.0_f64,
        tender_rate in 0.0..120.0_f64,
        energy in 0.0..5000.0_f64,
    ) -> GeneralModelParams {
        GeneralModelParams {
            base: SimpleModelParams { dispatch_cost: 0.0, ..base },
            locomotives,
            locomotive_rate,
            tender_rate,
            energy_cost_per_stop: energy,
        }
    }
}

fn upper(p: &SimpleModelParams) -> f64 {
    (p.train_length - 1.0) / p.weight_ratio
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn simple_curvature_positive(p in simple_params(), t in 0.0..1.0_f64) {
        let n = 1.0 + t * (upper(&p) - 1.0);
        prop_assert!(simple::derivatives(&p, n).unwrap().second > 0.0);
    }

    #[test]
    fn simple_order_and_delay_terms_trade_off(p in simple_params(), t in 0.0..0.99_f64) {
        let a = 1.0 + t * (upper(&p) - 1.0);
        let b = a + 0.01 * (upper(&p) - 1.0);
        let ea = simple::total_cost(&p, a).unwrap();
        let eb = simple::total_cost(&p, b).unwrap();
        prop_assert!(eb.component(CostComponent::Order) > ea.component(CostComponent::Order));
        prop_assert!(eb.component(CostComponent::Delay) < ea.component(CostComponent::Delay));
    }

    #[test]
    fn optimum_invariant_to_common_cost_scale(p in simple_params(), c in 0.01..100.0_f64) {
        let scaled = SimpleModelParams {
            dispatch_cost: p.dispatch_cost * c,
            holding_cost: p.holding_cost * c,
            car_cost: p.car_cost * c,
            ..p.clone()
        };
        let a = simple::optimal_n_continuous(&p).unwrap().n;
        let b = simple::optimal_n_continuous(&scaled).unwrap().n;
        prop_assert!((a - b).abs() <= 1e-12 * a);
        prop_assert_eq!(
            simple::optimal_n_integer(&p, Granularity::PerTrain).unwrap().tenders,
            simple::optimal_n_integer(&scaled, Granularity::PerTrain).unwrap().tenders
        );
    }

    #[test]
    fn demand_is_linear(p in simple_params(), t in 0.0..1.0_f64) {
        let n = 1.0 + t * (upper(&p) - 1.0);
        let doubled = SimpleModelParams { annual_demand: 2.0 * p.annual_demand, ..p.clone() };
        let a = simple::total_cost(&p, n).unwrap().total_cost;
        let b = simple::total_cost(&doubled, n).unwrap().total_cost;
        prop_assert!((b - 2.0 * a).abs() <= 1e-12 * b);
    }

    #[test]
    fn range_and_distance_scale_together(p in simple_params(), c in 0.1..10.0_f64) {
        let scaled = SimpleModelParams {
            distance: p.distance * c,
            range_per_tender: p.range_per_tender * c,
            ..p.clone()
        };
        let a = simple::optimal_n_continuous(&p).unwrap().n;
        let b = simple::optimal_n_continuous(&scaled).unwrap().n;
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn general_identity_and_convexity(g in general_params(), t in 0.0..1.0_f64) {
        let n = 1.0 + t * (upper(&g.base) - 1.0);
        let e = general::total_cost(&g, n).unwrap();
        let sum: f64 = e.components.values().sum();
        prop_assert!((sum - e.total_cost).abs() <= 1e-10 * e.total_cost);
        prop_assert!(general::derivatives(&g, n).unwrap().second >= 0.0);
        prop_assert!(general::convexity_certificate(&g, &[n]).is_ok());
    }

    #[test]
    fn general_optimum_nondecreasing_in_holding_cost(g in general_params(), f in 1.01..5.0_f64) {
        let more = GeneralModelParams {
            base: SimpleModelParams { holding_cost: g.base.holding_cost * f, ..g.base.clone() },
            ..g.clone()
        };
        let a = general::optimal_n_continuous(&g).unwrap().0.n;
        let b = general::optimal_n_continuous(&more).unwrap().0.n;
        prop_assert!(b >= a - 1e-6 * a, "{} -> {}", a, b);
    }

    #[test]
    fn general_integer_beats_both_neighbours(g in general_params()) {
        let step = g.locomotives;
        let Ok(opt) = general::optimal_n_general(&g, Granularity::PerLocomotive(step)) else {
            return Ok(());
        };
        let best = opt.integer.evaluation.total_cost;
        for m in [opt.integer.per_locomotive.saturating_sub(1), opt.integer.per_locomotive + 1] {
            let n = (m * step) as f64;
            if m >= 1 && g.base.train_length - g.base.weight_ratio * n >= 1.0 {
                prop_assert!(best <= general::total_cost(&g, n).unwrap().total_cost);
            }
        }
    }
}
