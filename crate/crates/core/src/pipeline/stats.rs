//! Per-group descriptive statistics of batch results.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{BatchResult, MarketMetrics, MarketOutcome};
use crate::techno::Commodity;

pub const PERCENTILE_RULE: &str =
    "linear interpolation between order statistics: position (n - 1) * p over the sorted values";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    BatteriesPerLocomotive,
    RangeMi,
    #[serde(rename = "stops_per_1000mi")]
    StopsPer1000Mi,
    LocomotiveShare,
    TenderShare,
    ChargingShare,
    DelayShare,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::BatteriesPerLocomotive,
        Metric::RangeMi,
        Metric::StopsPer1000Mi,
        Metric::LocomotiveShare,
        Metric::TenderShare,
        Metric::ChargingShare,
        Metric::DelayShare,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Metric::BatteriesPerLocomotive => "batteries_per_locomotive",
            Metric::RangeMi => "range_mi",
            Metric::StopsPer1000Mi => "stops_per_1000mi",
            Metric::LocomotiveShare => "locomotive_share",
            Metric::TenderShare => "tender_share",
            Metric::ChargingShare => "charging_share",
            Metric::DelayShare => "delay_share",
        }
    }

    pub fn value(self, m: &MarketMetrics) -> f64 {
        match self {
            Metric::BatteriesPerLocomotive => m.per_locomotive as f64,
            Metric::RangeMi => m.range,
            Metric::StopsPer1000Mi => m.stops_per_1000mi,
            Metric::LocomotiveShare => m.locomotive_share,
            Metric::TenderShare => m.tender_share,
            Metric::ChargingShare => m.charging_share,
            Metric::DelayShare => m.delay_share,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// Reported once per group as `markets`.
    #[serde(skip)]
    pub count: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
}

/// `p` in [0, 1] of ascending `sorted`, interpolating linearly between neighbours.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of an empty sample");
    let pos = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Statistics of `values`; the result does not depend on their order.
pub fn summarize(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let var = sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Some(Summary {
        count: sorted.len(),
        mean,
        std: var.sqrt(),
        p25: percentile(&sorted, 0.25),
        median: percentile(&sorted, 0.5),
        p75: percentile(&sorted, 0.75),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub scenario: String,
    pub commodity: Commodity,
    pub markets: usize,
    pub flagged: usize,
    pub metrics: BTreeMap<Metric, Summary>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FlaggedMarket {
    pub scenario: String,
    pub market_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub percentile_rule: String,
    pub groups: Vec<GroupStats>,
    /// Groups with no optimized market, omitted from `groups`.
    pub omitted: Vec<String>,
    pub flagged: Vec<FlaggedMarket>,
}

/// Groups results by scenario and commodity. Flagged markets are left out of the
/// statistics but listed and counted.
pub fn aggregate(results: &[BatchResult]) -> AggregateStats {
    // (scenario, commodity) -> (values per metric, flagged count)
    type Groups = BTreeMap<(String, Commodity), (BTreeMap<Metric, Vec<f64>>, usize)>;
    let mut values = Groups::new();
    let mut flagged = Vec::new();
    for r in results {
        let entry = values.entry((r.scenario.clone(), r.commodity)).or_default();
        match &r.outcome {
            MarketOutcome::Optimized(m) => {
                for metric in Metric::ALL {
                    entry.0.entry(metric).or_default().push(metric.value(m));
                }
            }
            MarketOutcome::Flagged { reason } => {
                entry.1 += 1;
                flagged.push(FlaggedMarket {
                    scenario: r.scenario.clone(),
                    market_id: r.market_id.clone(),
                    reason: reason.clone(),
                });
            }
        }
    }
    flagged.sort();
    let mut groups = Vec::new();
    let mut omitted = Vec::new();
    for ((scenario, commodity), (per_metric, flagged_count)) in values {
        if per_metric.is_empty() {
            omitted.push(format!(
                "{scenario}/{commodity}: all {flagged_count} markets flagged, no statistics"
            ));
            continue;
        }
        let metrics: BTreeMap<Metric, Summary> = per_metric
            .iter()
            .map(|(&k, v)| (k, summarize(v).expect("non-empty")))
            .collect();
        groups.push(GroupStats {
            scenario,
            commodity,
            markets: metrics[&Metric::BatteriesPerLocomotive].count,
            flagged: flagged_count,
            metrics,
        });
    }
    AggregateStats {
        percentile_rule: PERCENTILE_RULE.into(),
        groups,
        omitted,
        flagged,
    }
}
