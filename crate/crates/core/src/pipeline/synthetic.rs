//! Seeded synthetic markets standing in for confidential waybill flows.
//!
//! Each commodity group draws distance, demand, train length, locomotive count
//! and tender weight ratio from uniform ranges chosen so that light, fast,
//! delay-sensitive groups (intermodal, motor vehicles) need more tenders per
//! locomotive than heavy bulk groups. Values are rounded so a CSV round trip is
//! exact.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::MarketRecord;
use crate::techno::{default_gross_tons, Commodity, CommodityEnergyTable, Region, TechInputs};

pub const SYNTHETIC_SEED: u64 = 20_190_101;
pub const SYNTHETIC_COUNT: usize = 22_501;

struct Profile {
    commodity: Commodity,
    weight: f64,
    western_share: f64,
    distance: (f64, f64),
    demand: (f64, f64),
    train_length: (f64, f64),
    locomotives: (u32, u32),
    alpha: (f64, f64),
}

const PROFILES: [Profile; 9] = [
    Profile {
        commodity: Commodity::Intermodal,
        weight: 0.24,
        western_share: 0.6,
        distance: (1200.0, 2800.0),
        demand: (800.0, 6000.0),
        train_length: (100.0, 140.0),
        locomotives: (1, 1),
        alpha: (9.5, 11.0),
    },
    Profile {
        commodity: Commodity::MotorVehicles,
        weight: 0.07,
        western_share: 0.5,
        distance: (1000.0, 2600.0),
        demand: (800.0, 5000.0),
        train_length: (100.0, 130.0),
        locomotives: (1, 1),
        alpha: (9.5, 11.0),
    },
    Profile {
        commodity: Commodity::Coal,
        weight: 0.13,
        western_share: 0.7,
        distance: (600.0, 1800.0),
        demand: (500.0, 4000.0),
        train_length: (100.0, 135.0),
        locomotives: (3, 5),
        alpha: (1.1, 1.5),
    },
    Profile {
        commodity: Commodity::AgriculturalFoods,
        weight: 0.12,
        western_share: 0.6,
        distance: (400.0, 2000.0),
        demand: (300.0, 4000.0),
        train_length: (80.0, 120.0),
        locomotives: (2, 4),
        alpha: (1.1, 1.6),
    },
    Profile {
        commodity: Commodity::ChemicalPetroleum,
        weight: 0.12,
        western_share: 0.5,
        distance: (300.0, 2000.0),
        demand: (200.0, 3000.0),
        train_length: (70.0, 110.0),
        locomotives: (2, 4),
        alpha: (1.2, 1.8),
    },
    Profile {
        commodity: Commodity::ForestProducts,
        weight: 0.06,
        western_share: 0.5,
        distance: (300.0, 2200.0),
        demand: (100.0, 2000.0),
        train_length: (60.0, 100.0),
        locomotives: (2, 3),
        alpha: (1.3, 2.0),
    },
    Profile {
        commodity: Commodity::MetalsOres,
        weight: 0.08,
        western_share: 0.5,
        distance: (300.0, 1800.0),
        demand: (100.0, 2500.0),
        train_length: (60.0, 110.0),
        locomotives: (2, 4),
        alpha: (1.1, 1.6),
    },
    Profile {
        commodity: Commodity::NonmetallicProducts,
        weight: 0.08,
        western_share: 0.5,
        distance: (200.0, 1500.0),
        demand: (100.0, 2500.0),
        train_length: (60.0, 110.0),
        locomotives: (2, 4),
        alpha: (1.1, 1.6),
    },
    Profile {
        commodity: Commodity::Others,
        weight: 0.10,
        western_share: 0.5,
        distance: (300.0, 2200.0),
        demand: (100.0, 2000.0),
        train_length: (60.0, 100.0),
        locomotives: (2, 3),
        alpha: (1.5, 3.0),
    },
];

fn round_to(x: f64, decimals: i32) -> f64 {
    let s = 10f64.powi(decimals);
    (x * s).round() / s
}

/// `count` markets from `seed`; the same arguments always give the same records.
pub fn generate_markets(count: usize, seed: u64) -> Vec<MarketRecord> {
    let tech = TechInputs::default();
    let table = CommodityEnergyTable::bundled();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = WeightedIndex::new(PROFILES.iter().map(|p| p.weight)).expect("positive weights");
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let p = &PROFILES[pick.sample(&mut rng)];
        let region = if rng.random_bool(p.western_share) {
            Region::Western
        } else {
            Region::Eastern
        };
        let railroads = region.railroads();
        let railroad = railroads[rng.random_range(0..railroads.len())];
        let distance = rng.random_range(p.distance.0..=p.distance.1).round();
        let locomotives = rng.random_range(p.locomotives.0..=p.locomotives.1);
        let speed = table
            .speed(railroad, p.commodity.speed_class())
            .or_else(|_| table.speed(railroad, "manifest"))
            .unwrap_or(20.0);
        let (speed, nominal_time) = if rng.random_bool(0.7) {
            (Some(speed), None)
        } else {
            (None, Some(round_to(distance / speed + tech.initial_stop, 1)))
        };
        let gross_tons = rng.random_bool(0.15).then(|| {
            (default_gross_tons(&tech, p.commodity) * locomotives as f64 * rng.random_range(0.85..1.15)).round()
        });
        let h_override = rng.random_bool(0.05).then(|| round_to(rng.random_range(5.0..40.0), 2));
        out.push(MarketRecord {
            market_id: format!("SYN{:05}", i + 1),
            railroad: railroad.to_string(),
            region,
            commodity: p.commodity,
            distance,
            annual_demand: rng.random_range(p.demand.0..=p.demand.1).round(),
            train_length: rng.random_range(p.train_length.0..=p.train_length.1).round(),
            locomotives,
            speed,
            nominal_time,
            alpha: round_to(rng.random_range(p.alpha.0..=p.alpha.1), 2),
            gross_tons,
            h_override,
            origin: None,
            destination: None,
        });
    }
    out
}
