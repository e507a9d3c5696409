//! Commodity energy intensities, train speeds and hourly delay costs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const COMMODITY_ENERGY_CSV: &str = include_str!("../../data/commodity_energy.csv");
const TRAIN_SPEEDS_CSV: &str = include_str!("../../data/train_speeds.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Commodity {
    AgriculturalFoods,
    ChemicalPetroleum,
    Coal,
    ForestProducts,
    Intermodal,
    MetalsOres,
    MotorVehicles,
    NonmetallicProducts,
    Others,
}

impl Commodity {
    pub const ALL: [Commodity; 9] = [
        Commodity::AgriculturalFoods,
        Commodity::ChemicalPetroleum,
        Commodity::Coal,
        Commodity::ForestProducts,
        Commodity::Intermodal,
        Commodity::MetalsOres,
        Commodity::MotorVehicles,
        Commodity::NonmetallicProducts,
        Commodity::Others,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Commodity::AgriculturalFoods => "agricultural_foods",
            Commodity::ChemicalPetroleum => "chemical_petroleum",
            Commodity::Coal => "coal",
            Commodity::ForestProducts => "forest_products",
            Commodity::Intermodal => "intermodal",
            Commodity::MetalsOres => "metals_ores",
            Commodity::MotorVehicles => "motor_vehicles",
            Commodity::NonmetallicProducts => "nonmetallic_products",
            Commodity::Others => "others",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Commodity::AgriculturalFoods => "Agricultural & Foods",
            Commodity::ChemicalPetroleum => "Chemical & Petroleum",
            Commodity::Coal => "Coal",
            Commodity::ForestProducts => "Forest Products",
            Commodity::Intermodal => "Intermodal",
            Commodity::MetalsOres => "Metals & Ores",
            Commodity::MotorVehicles => "Motor Vehicles",
            Commodity::NonmetallicProducts => "Nonmetallic Products",
            Commodity::Others => "Others",
        }
    }

    /// Train service a commodity usually moves in.
    pub fn train_type(self) -> TrainType {
        match self {
            Commodity::Intermodal => TrainType::Intermodal,
            Commodity::Coal | Commodity::AgriculturalFoods | Commodity::ChemicalPetroleum | Commodity::MotorVehicles => {
                TrainType::Unit
            }
            Commodity::ForestProducts | Commodity::MetalsOres | Commodity::NonmetallicProducts | Commodity::Others => {
                TrainType::Manifest
            }
        }
    }

    /// Row of the speed table used for this commodity.
    pub fn speed_class(self) -> &'static str {
        match self {
            Commodity::Intermodal => "intermodal",
            Commodity::Coal => "coal_unit",
            Commodity::AgriculturalFoods => "grain_unit",
            Commodity::ChemicalPetroleum => "crude_oil_unit",
            Commodity::MotorVehicles => "automotive_unit",
            _ => "manifest",
        }
    }
}

impl fmt::Display for Commodity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

fn normalize(s: &str) -> String {
    s.trim()
        .to_ascii_lowercase()
        .replace(" & ", "_")
        .replace(" and ", "_")
        .replace([' ', '-', '&'], "_")
}

impl FromStr for Commodity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = normalize(s);
        Commodity::ALL
            .into_iter()
            .find(|c| c.key() == key)
            .ok_or_else(|| Error::Lookup {
                kind: "commodity group",
                key: s.to_string(),
                valid: Commodity::ALL.map(Commodity::key).join(", "),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Western,
    Eastern,
}

impl Region {
    pub fn key(self) -> &'static str {
        match self {
            Region::Western => "western",
            Region::Eastern => "eastern",
        }
    }

    /// Class I railroads grouped into the region.
    pub fn railroads(self) -> &'static [&'static str] {
        match self {
            Region::Western => &["BNSF", "CN", "CP", "UP"],
            Region::Eastern => &["CSX", "KCS", "NS"],
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match normalize(s).as_str() {
            "western" | "west" => Ok(Region::Western),
            "eastern" | "east" => Ok(Region::Eastern),
            _ => Err(Error::Lookup {
                kind: "region",
                key: s.to_string(),
                valid: "western, eastern".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainType {
    Unit,
    Manifest,
    Intermodal,
}

/// Hourly delay cost per car (USD/car-hour) by train type and trip distance.
/// Bands are `(0, 1000]`, `(1000, 1500]` and above 1,500 miles.
pub fn delay_cost_lookup(train_type: TrainType, distance: f64) -> f64 {
    match train_type {
        TrainType::Unit => 8.42,
        TrainType::Manifest => 17.57,
        TrainType::Intermodal => {
            if distance <= 1000.0 {
                26.06
            } else if distance <= 1500.0 {
                26.95
            } else {
                28.36
            }
        }
    }
}

#[derive(Debug, Deserialize)]
struct EnergyRow {
    commodity: String,
    region: String,
    btu_per_ton_mile: f64,
}

#[derive(Debug, Deserialize)]
struct SpeedRow {
    railroad: String,
    train_type: String,
    mph: f64,
}

/// Diesel energy requirements and average train speeds.
#[derive(Debug, Clone, PartialEq)]
pub struct CommodityEnergyTable {
    energy: BTreeMap<(Commodity, Region), f64>,
    speeds: BTreeMap<(String, String), f64>,
}

impl CommodityEnergyTable {
    /// The bundled tables.
    pub fn bundled() -> Self {
        Self::from_csv(COMMODITY_ENERGY_CSV, TRAIN_SPEEDS_CSV).expect("bundled tables are well formed")
    }

    pub fn from_csv(energy_csv: &str, speeds_csv: &str) -> Result<Self> {
        let mut energy = BTreeMap::new();
        for (i, row) in csv::Reader::from_reader(energy_csv.as_bytes()).deserialize::<EnergyRow>().enumerate() {
            let row = row?;
            let commodity: Commodity = row.commodity.parse()?;
            let region: Region = row.region.parse()?;
            if !(row.btu_per_ton_mile > 0.0) {
                return Err(Error::Ingest {
                    row: i + 2,
                    column: "btu_per_ton_mile".into(),
                    message: format!("must be positive, got {}", row.btu_per_ton_mile),
                });
            }
            energy.insert((commodity, region), row.btu_per_ton_mile);
        }
        let mut speeds = BTreeMap::new();
        for row in csv::Reader::from_reader(speeds_csv.as_bytes()).deserialize::<SpeedRow>() {
            let row = row?;
            speeds.insert((row.railroad.to_ascii_uppercase(), row.train_type.to_ascii_lowercase()), row.mph);
        }
        Ok(Self { energy, speeds })
    }

    /// Diesel energy requirement in BTU per ton-mile.
    pub fn diesel_requirement(&self, commodity: Commodity, region: Region) -> Result<f64> {
        self.energy.get(&(commodity, region)).copied().ok_or_else(|| Error::Lookup {
            kind: "commodity/region pair",
            key: format!("{commodity}/{region}"),
            valid: self
                .energy
                .keys()
                .map(|(c, r)| format!("{c}/{r}"))
                .collect::<Vec<_>>()
                .join(", "),
        })
    }

    /// Average speed in mph.
    pub fn speed(&self, railroad: &str, train_type: &str) -> Result<f64> {
        let key = (railroad.to_ascii_uppercase(), train_type.to_ascii_lowercase());
        self.speeds.get(&key).copied().ok_or_else(|| Error::Lookup {
            kind: "railroad/train type pair",
            key: format!("{railroad}/{train_type}"),
            valid: self
                .speeds
                .keys()
                .map(|(r, t)| format!("{r}/{t}"))
                .collect::<Vec<_>>()
                .join(", "),
        })
    }

    pub fn energy_entries(&self) -> impl Iterator<Item = (Commodity, Region, f64)> + '_ {
        self.energy.iter().map(|(&(c, r), &v)| (c, r, v))
    }

    pub fn speed_entries(&self) -> impl Iterator<Item = (&str, &str, f64)> + '_ {
        self.speeds.iter().map(|((r, t), &v)| (r.as_str(), t.as_str(), v))
    }
}
