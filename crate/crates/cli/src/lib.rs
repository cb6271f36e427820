//! Command-line front end for `wnl-core`.
//!
//! Every number in a table is computed by the core crate at run time and
//! rounded to 12 significant digits; stderr carries 6-digit summaries.

pub mod commands;
pub mod config;
pub mod error;
pub mod plot;
pub mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};

use commands::{execute, Outcome, Status};
use config::{Cli, Command, RunConfig};
use error::{CliError, EXIT_BOUND_VIOLATION, EXIT_OK};
use plot::LinePlot;
use report::Report;

/// Merges flags over the config file and runs the command without printing.
pub fn run_config(cli: Cli) -> Result<(RunConfig, Outcome), CliError> {
    let flags = RunConfig::from_flags(cli.command, cli.flags);
    let merged = match &cli.config {
        Some(path) => {
            let file = RunConfig::load(path)?;
            if let (Some(a), Some(b)) = (cli.command, file.command) {
                if a != b {
                    return Err(CliError::Config(format!(
                        "command {} conflicts with {} in {}",
                        a.name(),
                        b.name(),
                        path.display()
                    )));
                }
            }
            flags.or(file)
        }
        None => flags,
    };
    let (resolved, plan) = merged.resolve()?;
    let outcome = execute(resolved.clone(), &plan)?;
    Ok((resolved, outcome))
}

/// Runs `cli` end to end and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match run_and_write(cli) {
        Ok(Status::Ok) => EXIT_OK,
        Ok(Status::BoundViolation) => EXIT_BOUND_VIOLATION,
        Err(e) => {
            eprintln!("wnl: {e}");
            e.exit_code()
        }
    }
}

fn run_and_write(cli: Cli) -> Result<Status, CliError> {
    let (cfg, outcome) = run_config(cli)?;
    let format = cfg.format.unwrap_or_default();
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            outcome.report.write(format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            outcome.report.write(format, &mut w)?;
            w.flush()?;
        }
    }
    if let Some(path) = &cfg.plot {
        match plot_for(&outcome.report) {
            Some(p) => p.write_svg(path)?,
            None => eprintln!(
                "wnl: --plot ignored for {}",
                cfg.command.map_or("this command", Command::name)
            ),
        }
    }
    for line in &outcome.summary {
        eprintln!("{line}");
    }
    Ok(outcome.status)
}

fn plot_for(report: &Report) -> Option<LinePlot<'static>> {
    match report {
        Report::Scan(d) => Some(LinePlot {
            title: "W-state value of Omega(n)",
            x_label: "n",
            y_label: "Omega_W",
            points: d.items().iter().map(|r| (r.n as f64, r.omega)).collect(),
            bound: Some(0.0),
            marker: None,
        }),
        Report::NoiseSweep(d) => Some(LinePlot {
            title: "Noisy Omega",
            x_label: "p",
            y_label: "Omega",
            points: d
                .items()
                .iter()
                .filter(|r| !r.critical)
                .map(|r| (r.p, r.omega_noisy))
                .collect(),
            bound: Some(0.0),
            marker: d.items().iter().find(|r| r.critical).map(|r| r.p),
        }),
        _ => None,
    }
}
