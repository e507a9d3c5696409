//! Results CSV and aggregates JSON, each with a metadata block.

use std::io::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{AggregateStats, BatchResult, MarketOutcome, ScenarioSpec};
use crate::error::Result;
use crate::techno::TechInputs;

pub const RESULT_COLUMNS: [&str; 25] = [
    "market_id",
    "commodity_group",
    "region",
    "scenario",
    "status",
    "note",
    "num_locomotives",
    "n_continuous",
    "solve_method",
    "tenders",
    "batteries_per_locomotive",
    "range_mi",
    "stops_continuous",
    "stops_practical",
    "stops_per_1000mi",
    "trip_time_h",
    "total_cost",
    "locomotive_cost",
    "tender_cost",
    "charging_cost",
    "delay_cost",
    "locomotive_share",
    "tender_share",
    "charging_share",
    "delay_share",
];

/// Provenance written at the top of every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub tool: String,
    pub version: String,
    pub input_sha256: String,
    pub scenarios: Vec<ScenarioSpec>,
    pub tech: TechInputs,
}

impl RunMetadata {
    pub fn new(input: &[u8], scenarios: &[ScenarioSpec], tech: &TechInputs) -> Self {
        Self {
            tool: "tender".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            input_sha256: sha256_hex(input),
            scenarios: scenarios.to_vec(),
            tech: tech.clone(),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// One row per result, preceded by `#` lines carrying the metadata as JSON.
pub fn write_results_csv<W: Write>(mut out: W, meta: &RunMetadata, results: &[BatchResult]) -> Result<()> {
    writeln!(out, "# tool: {} {}", meta.tool, meta.version)?;
    writeln!(out, "# input_sha256: {}", meta.input_sha256)?;
    writeln!(out, "# scenarios: {}", serde_json::to_string(&meta.scenarios)?)?;
    writeln!(out, "# tech: {}", serde_json::to_string(&meta.tech)?)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULT_COLUMNS)?;
    for r in results {
        let mut row = vec![
            r.market_id.clone(),
            r.commodity.key().to_string(),
            r.region.key().to_string(),
            r.scenario.clone(),
        ];
        match &r.outcome {
            MarketOutcome::Optimized(m) => {
                let method = serde_json::to_value(m.method)?;
                row.extend([
                    "optimized".to_string(),
                    String::new(),
                    m.locomotives.to_string(),
                    m.n_continuous.to_string(),
                    method.as_str().unwrap_or_default().to_string(),
                    m.tenders.to_string(),
                    m.per_locomotive.to_string(),
                    m.range.to_string(),
                    m.stops_continuous.to_string(),
                    m.stops_practical.to_string(),
                    m.stops_per_1000mi.to_string(),
                    m.trip_time.to_string(),
                    m.total_cost.to_string(),
                    m.locomotive_cost.to_string(),
                    m.tender_cost.to_string(),
                    m.charging_cost.to_string(),
                    m.delay_cost.to_string(),
                    m.locomotive_share.to_string(),
                    m.tender_share.to_string(),
                    m.charging_share.to_string(),
                    m.delay_share.to_string(),
                ]);
            }
            MarketOutcome::Flagged { reason } => {
                row.extend(["flagged".to_string(), reason.clone()]);
                row.resize(RESULT_COLUMNS.len(), String::new());
            }
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn aggregates_json(meta: &RunMetadata, stats: &AggregateStats) -> Result<serde_json::Value> {
    Ok(serde_json::json!({
        "metadata": meta,
        "aggregates": stats,
    }))
}

pub fn write_aggregates_json<W: Write>(mut out: W, meta: &RunMetadata, stats: &AggregateStats) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &aggregates_json(meta, stats)?)?;
    writeln!(out)?;
    Ok(())
}
