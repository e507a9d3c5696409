mod args;
mod commands;

use std::io::{IsTerminal, Write};
use std::process::ExitCode;

use anyhow::Result;
use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, ConfigFile, Format};
use commands::Rendered;

const EXIT_VALIDATION: u8 = 2;
const EXIT_IO: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            _ => {
                let text = e.to_string();
                let first = text.lines().next().unwrap_or_default().trim_start_matches("error: ");
                eprintln!("error[validation]: {first}");
                return ExitCode::from(EXIT_VALIDATION);
            }
        },
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (class, code) = classify(&err);
            eprintln!("error[{class}]: {}", format!("{err:#}").replace('\n', " "));
            ExitCode::from(code)
        }
    }
}

fn classify(err: &anyhow::Error) -> (&'static str, u8) {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<tender_core::Error>() {
            return if e.is_validation() {
                ("validation", EXIT_VALIDATION)
            } else {
                ("io", EXIT_IO)
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return ("io", EXIT_IO);
        }
    }
    ("validation", EXIT_VALIDATION)
}

fn run(cli: Cli) -> Result<()> {
    let cfg = ConfigFile::load(cli.config.as_ref())?;
    let format = cli.format.unwrap_or(if std::io::stdout().is_terminal() {
        Format::Table
    } else {
        Format::Csv
    });
    let rendered = match cli.command {
        Command::Optimize { market, scenario } => commands::optimize(setup(cfg, market, scenario, cli.verbose)?)?,
        Command::Curve {
            market,
            scenario,
            from,
            to,
            per_train,
        } => commands::curve(setup(cfg, market, scenario, cli.verbose)?, from, to, per_train)?,
        Command::CompareDiesel { market, scenario } => {
            commands::compare_diesel(setup(cfg, market, scenario, cli.verbose)?)?
        }
        Command::Derive => commands::derive(cfg)?,
        Command::Batch {
            input,
            out_dir,
            scenario,
        } => {
            let mut spec = scenario.merge(cfg.scenario.clone()).spec()?;
            spec.label = "default".into();
            if cli.verbose {
                eprintln!("scenario: {}", serde_json::to_string(&spec)?);
            }
            commands::run_batch(&cfg.tech, &input, &out_dir, &[spec])?
        }
        Command::Sweep {
            input,
            out_dir,
            delay_factors,
            charger_mw,
            swap_hours,
            capital,
            carbon_price,
        } => {
            let grid = commands::scenario_grid(
                &delay_factors,
                &charger_mw,
                &swap_hours,
                &capital,
                carbon_price.or(cfg.scenario.carbon_price),
            );
            if cli.verbose {
                eprintln!("scenarios: {}", serde_json::to_string(&grid)?);
            }
            commands::run_batch(&cfg.tech, &input, &out_dir, &grid)?
        }
        Command::GenerateMarkets { count, seed, output } => {
            return commands::generate(count, seed, output.as_deref());
        }
    };
    emit(&rendered, format)
}

fn setup(
    cfg: ConfigFile,
    market: args::MarketArgs,
    scenario: args::ScenarioArgs,
    verbose: bool,
) -> Result<commands::Market> {
    let m = commands::market_setup(cfg, market, scenario)?;
    if verbose {
        eprintln!("config: {}", m.effective);
    }
    Ok(m)
}

fn emit(r: &Rendered, format: Format) -> Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Table => out.write_all(r.table.as_bytes())?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &r.json)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            for row in &r.csv {
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}
