use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};
use tender_core::evaluation::{ConfigurationEvaluation, CostComponent, Granularity};
use tender_core::general::{self, GeneralModelParams};
use tender_core::pipeline::{
    self, aggregate, parse_markets, Charging, MarketOutcome, RunMetadata, ScenarioSpec,
};
use tender_core::techno::{derive_parameters, CommodityEnergyTable, TechInputs};

use crate::args::{CapitalArg, ConfigFile, MarketArgs, ScenarioArgs};

/// A command's result in every output format.
pub struct Rendered {
    pub json: Value,
    /// Header row first.
    pub csv: Vec<Vec<String>>,
    pub table: String,
}

fn num(x: f64) -> String {
    x.to_string()
}

/// Rounded for reading; csv and json carry the exact values.
fn show(x: f64) -> String {
    if x.abs() >= 1000.0 {
        format!("{x:.0}")
    } else if x == x.trunc() {
        format!("{x}")
    } else {
        format!("{x:.3}")
    }
}

fn text_table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(i, s)| if i == 0 { format!("{s:<w$}", w = widths[i]) } else { format!("{s:>w$}", w = widths[i]) })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub struct Market {
    pub params: GeneralModelParams,
    pub record: pipeline::MarketRecord,
    pub scenario: ScenarioSpec,
    pub tech: TechInputs,
    pub effective: Value,
}

pub fn market_setup(cfg: ConfigFile, flags: MarketArgs, scenario: ScenarioArgs) -> Result<Market> {
    let market = flags.merge(cfg.market);
    let scenario_args = scenario.merge(cfg.scenario);
    let record = market.record()?;
    let spec = scenario_args.spec()?;
    let table = CommodityEnergyTable::bundled();
    let mut params = pipeline::market_params(&record, &cfg.tech, &table, &spec)?;
    if let Some(r) = market.range_per_tender {
        params.base.range_per_tender = r;
    }
    if let Some(t) = market.stop_time {
        params.base.stop_time = t;
    }
    if let Some(c) = market.locomotive_rate {
        params.locomotive_rate = c;
    }
    if let Some(c) = market.tender_rate {
        params.tender_rate = c;
    }
    if let Some(f) = market.charge_cost {
        params.energy_cost_per_stop = f;
    }
    params.validate()?;
    let effective = json!({ "market": market, "scenario": scenario_args, "tech": cfg.tech });
    Ok(Market {
        params,
        record,
        scenario: spec,
        tech: cfg.tech,
        effective,
    })
}

const COST_COLUMNS: [(&str, CostComponent); 5] = [
    ("locomotive", CostComponent::Locomotive),
    ("tender", CostComponent::Tender),
    ("charging", CostComponent::Charging),
    ("delay", CostComponent::Delay),
    ("constant", CostComponent::Constant),
];

fn evaluation_header(first: &str) -> Vec<String> {
    let mut h: Vec<String> = [first, "tenders", "batteries_per_locomotive", "payload", "range_mi", "stops_continuous", "stops_practical", "trip_time_h"]
        .into_iter()
        .map(String::from)
        .collect();
    h.extend(COST_COLUMNS.iter().map(|(k, _)| k.to_string()));
    h.push("total".into());
    h
}

fn evaluation_row(label: String, per_loco: f64, e: &ConfigurationEvaluation, fmt: fn(f64) -> String) -> Vec<String> {
    let mut row = vec![
        label,
        fmt(e.n),
        fmt(per_loco),
        fmt(e.payload),
        fmt(e.range),
        fmt(e.stops_continuous),
        e.stops_practical.to_string(),
        fmt(e.trip_time),
    ];
    row.extend(COST_COLUMNS.iter().map(|(_, c)| fmt(e.component(*c))));
    row.push(fmt(e.total_cost));
    row
}

pub fn optimize(m: Market) -> Result<Rendered> {
    let p = &m.params;
    let per_loco = general::optimal_n_general(p, Granularity::PerLocomotive(p.locomotives))?;
    let per_train = general::optimal_n_general(p, Granularity::PerTrain)?.integer;
    let cont = general::total_cost(p, per_loco.continuous.n)?;
    let rows = [
        ("continuous", p.per_locomotive(cont.n), &cont),
        ("per_train", p.per_locomotive(per_train.evaluation.n), &per_train.evaluation),
        ("per_locomotive", per_loco.integer.per_locomotive as f64, &per_loco.integer.evaluation),
    ];
    let mut csv = vec![evaluation_header("configuration")];
    let mut shown = vec![evaluation_header("configuration")];
    for (label, ratio, e) in rows {
        csv.push(evaluation_row(label.into(), ratio, e, num));
        shown.push(evaluation_row(label.into(), ratio, e, show));
    }
    let best = &per_loco.integer;
    let method = serde_json::to_value(per_loco.method)?;
    let mut table = format!(
        "m*={}, R*={:.0} mi, stops={}\n\n",
        best.per_locomotive, best.evaluation.range, best.evaluation.stops_practical
    );
    table.push_str(&format!(
        "continuous n*      {} tenders ({} per locomotive), {}{}\n",
        show(cont.n),
        show(p.per_locomotive(cont.n)),
        method.as_str().unwrap_or_default(),
        per_loco
            .continuous
            .boundary
            .map(|b| format!(", at {b:?} bound").to_lowercase())
            .unwrap_or_default()
    ));
    table.push_str(&format!("integer per train  {} tenders\n", per_train.tenders));
    table.push_str(&format!(
        "per locomotive     m*={} ({} tenders, {} locomotives)\n",
        best.per_locomotive, best.tenders, p.locomotives
    ));
    table.push_str(&format!(
        "range              {} mi per tender, R*={} mi\n",
        show(p.base.range_per_tender),
        show(best.evaluation.range)
    ));
    table.push_str(&format!(
        "stops              {} continuous, {} practical\n",
        show(best.evaluation.stops_continuous),
        best.evaluation.stops_practical
    ));
    table.push_str(&format!("trip time          {} h\n\n", show(best.evaluation.trip_time)));
    table.push_str(&text_table(&shown));
    let json = json!({
        "config": m.effective,
        "params": m.params,
        "continuous": {
            "n": cont.n,
            "per_locomotive": p.per_locomotive(cont.n),
            "boundary": per_loco.continuous.boundary,
            "method": per_loco.method,
            "evaluation": cont,
        },
        "per_train": per_train,
        "per_locomotive": per_loco.integer,
    });
    Ok(Rendered { json, csv, table })
}

pub fn curve(m: Market, from: u32, to: Option<u32>, per_train: bool) -> Result<Rendered> {
    let p = &m.params;
    let granularity = if per_train {
        Granularity::PerTrain
    } else {
        Granularity::PerLocomotive(p.locomotives)
    };
    let points = general::cost_curve(p, granularity, from, to)?;
    let mut csv = vec![evaluation_header("step")];
    let mut shown = vec![evaluation_header("step")];
    for pt in &points {
        let ratio = p.per_locomotive(pt.evaluation.n);
        csv.push(evaluation_row(pt.per_locomotive.to_string(), ratio, &pt.evaluation, num));
        shown.push(evaluation_row(pt.per_locomotive.to_string(), ratio, &pt.evaluation, show));
    }
    let json = json!({ "config": m.effective, "params": m.params, "points": points });
    Ok(Rendered {
        json,
        csv,
        table: text_table(&shown),
    })
}

pub fn compare_diesel(m: Market) -> Result<Rendered> {
    let table_data = CommodityEnergyTable::bundled();
    let c = pipeline::compare_diesel(&m.record, &m.tech, &table_data, &m.scenario)?;
    let header: Vec<String> = ["technology", "financial", "delay", "total"].map(String::from).to_vec();
    let csv = vec![
        header.clone(),
        vec!["battery".into(), num(c.battery.financial), num(c.battery.delay), num(c.battery.total)],
        vec!["diesel".into(), num(c.diesel.financial), num(c.diesel.delay), num(c.diesel.total)],
    ];
    let shown = vec![
        header,
        vec!["battery".into(), show(c.battery.financial), show(c.battery.delay), show(c.battery.total)],
        vec!["diesel".into(), show(c.diesel.financial), show(c.diesel.delay), show(c.diesel.total)],
    ];
    let verdict = |cheaper: bool| if cheaper { "battery" } else { "diesel" };
    let mut table = format!(
        "battery optimum m*={} ({} tenders); USD/year\n\n",
        c.per_locomotive, c.tenders
    );
    table.push_str(&text_table(&shown));
    table.push_str(&format!(
        "\ncheaper without delay costs: {}\ncheaper with delay costs:    {}\n",
        verdict(c.battery_cheaper_financial),
        verdict(c.battery_cheaper_total)
    ));
    table.push_str(&format!(
        "diesel: {} gal/year, fuel {} USD, locomotives {} USD\n",
        show(c.baseline.fuel_gallons),
        show(c.baseline.fuel_cost),
        show(c.baseline.locomotive_cost)
    ));
    let json = json!({ "config": m.effective, "comparison": c });
    Ok(Rendered { json, csv, table })
}

pub fn derive(cfg: ConfigFile) -> Result<Rendered> {
    let list = derive_parameters(&cfg.tech, &CommodityEnergyTable::bundled())?;
    let mut csv = vec![["name", "symbol", "value", "unit", "formula"].map(String::from).to_vec()];
    let mut table = String::new();
    for d in &list {
        csv.push(vec![d.name.clone(), d.symbol.clone(), num(d.value), d.unit.clone(), d.formula.clone()]);
        table.push_str(&format!(
            "{} = {} = {} {}  ({})\n",
            d.symbol,
            d.formula,
            show(d.value),
            d.unit,
            d.name
        ));
    }
    let json = json!({ "tech": cfg.tech, "derived": list });
    Ok(Rendered { json, csv, table })
}

fn scenario_label(delay: f64, charging: Charging, capital: CapitalArg) -> String {
    let charging = match charging {
        Charging::Configured => "configured".to_string(),
        Charging::Charger { power_mw } => format!("{power_mw}MW"),
        Charging::Swap { hours } => format!("swap{hours}h"),
    };
    let capital = match capital {
        CapitalArg::Included => "included",
        CapitalArg::Excluded => "excluded",
    };
    format!("delay={delay} charging={charging} capital={capital}")
}

pub fn scenario_grid(
    delay_factors: &[f64],
    charger_mw: &[f64],
    swap_hours: &[f64],
    capital: &[CapitalArg],
    carbon_price: Option<f64>,
) -> Vec<ScenarioSpec> {
    let mut charging: Vec<Charging> = charger_mw.iter().map(|&power_mw| Charging::Charger { power_mw }).collect();
    charging.extend(swap_hours.iter().map(|&hours| Charging::Swap { hours }));
    if charging.is_empty() {
        charging.push(Charging::Configured);
    }
    let mut grid = Vec::new();
    for &k in capital {
        for &c in &charging {
            for &d in delay_factors {
                grid.push(ScenarioSpec {
                    label: scenario_label(d, c, k),
                    capital: k.into(),
                    delay_factor: d,
                    charging: c,
                    carbon_price,
                });
            }
        }
    }
    grid
}

pub fn run_batch(tech: &TechInputs, input: &Path, out_dir: &Path, scenarios: &[ScenarioSpec]) -> Result<Rendered> {
    let bytes = std::fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let records = parse_markets(bytes.as_slice()).with_context(|| format!("in {}", input.display()))?;
    let table_data = CommodityEnergyTable::bundled();
    let results = pipeline::sweep(&records, tech, &table_data, scenarios)?;
    let stats = aggregate(&results);
    let meta = RunMetadata::new(&bytes, scenarios, tech);

    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let results_path = out_dir.join("results.csv");
    let aggregates_path = out_dir.join("aggregates.json");
    let file = std::fs::File::create(&results_path).with_context(|| format!("creating {}", results_path.display()))?;
    pipeline::write_results_csv(std::io::BufWriter::new(file), &meta, &results)?;
    let file =
        std::fs::File::create(&aggregates_path).with_context(|| format!("creating {}", aggregates_path.display()))?;
    pipeline::write_aggregates_json(std::io::BufWriter::new(file), &meta, &stats)?;

    let mut csv = vec![["scenario", "markets", "optimized", "flagged"].map(String::from).to_vec()];
    let mut blocks = Vec::new();
    for s in scenarios {
        let of: Vec<_> = results.iter().filter(|r| r.scenario == s.label).collect();
        let flagged = of.iter().filter(|r| matches!(r.outcome, MarketOutcome::Flagged { .. })).count();
        csv.push(vec![
            s.label.clone(),
            of.len().to_string(),
            (of.len() - flagged).to_string(),
            flagged.to_string(),
        ]);
        blocks.push(json!({ "scenario": s.label, "markets": of.len(), "optimized": of.len() - flagged, "flagged": flagged }));
    }
    let mut table = format!(
        "{} markets x {} scenarios from {}\n\n",
        records.len(),
        scenarios.len(),
        input.display()
    );
    table.push_str(&text_table(&csv));
    if !stats.flagged.is_empty() {
        table.push_str(&format!("\nflagged markets ({}):\n", stats.flagged.len()));
        for f in stats.flagged.iter().take(20) {
            table.push_str(&format!("  {} [{}]: {}\n", f.market_id, f.scenario, f.reason));
        }
        if stats.flagged.len() > 20 {
            table.push_str(&format!("  ... {} more in {}\n", stats.flagged.len() - 20, results_path.display()));
        }
    }
    table.push_str(&format!(
        "\nresults:    {}\naggregates: {}\n",
        results_path.display(),
        aggregates_path.display()
    ));
    let json = json!({
        "input": input,
        "input_sha256": meta.input_sha256,
        "markets": records.len(),
        "scenarios": blocks,
        "flagged": stats.flagged,
        "outputs": { "results": results_path, "aggregates": aggregates_path },
    });
    Ok(Rendered { json, csv, table })
}

pub fn generate(count: usize, seed: u64, output: Option<&Path>) -> Result<()> {
    let records = pipeline::generate_markets(count, seed);
    match output {
        Some(path) => {
            let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            pipeline::write_markets(std::io::BufWriter::new(file), &records)?;
            eprintln!("wrote {} markets to {}", records.len(), path.display());
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            pipeline::write_markets(&mut lock, &records)?;
            lock.flush()?;
        }
    }
    Ok(())
}
