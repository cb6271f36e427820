use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use wnl_core::lhv::{DEFAULT_ENUMERATION_CEILING, MAX_ENUMERATION_CEILING};
use wnl_core::{NoiseKind, NoiseModel};

use crate::error::CliError;

pub const DEFAULT_SCAN_RANGE: RangeInclusive<usize> = 3..=20;
pub const DEFAULT_SHOTS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_GRID_STEPS: usize = 20;

#[derive(Debug, Parser)]
#[command(
    name = "wnl",
    version,
    about = "Single-photon W-state nonlocality toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// JSON run configuration; flags take precedence over its fields.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Ω(n) for the W state and the conflict probability over a range of n.
    Scan,
    /// Exhaustively certify the local bound of Ω(n).
    Certify,
    /// Sample every setting of Ω(n) and estimate it with a confidence interval.
    Simulate,
    /// Ω(n) of the noisy W state over a grid of noise parameters.
    NoiseSweep,
    /// Check that local strategies obeying the quantum certainties answer X uniformly.
    HardyCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Scan => "scan",
            Command::Certify => "certify",
            Command::Simulate => "simulate",
            Command::NoiseSweep => "noise-sweep",
            Command::HardyCheck => "hardy-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Noise {
    White,
    Loss,
}

impl From<Noise> for NoiseKind {
    fn from(noise: Noise) -> Self {
        match noise {
            Noise::White => NoiseKind::WhiteNoise,
            Noise::Loss => NoiseKind::PhotonLoss,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Noise parameter grid: `START:STOP:STEPS` (STEPS equal intervals) or a
/// comma-separated list.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad grid value {t:?}: {e}"))
        };
        if let Some((start, rest)) = s.split_once(':') {
            let (stop, steps) = rest
                .split_once(':')
                .ok_or_else(|| format!("expected START:STOP:STEPS, got {s:?}"))?;
            let (start, stop) = (num(start)?, num(stop)?);
            let steps: usize = steps
                .trim()
                .parse()
                .map_err(|e| format!("bad step count {steps:?}: {e}"))?;
            return Ok(Grid(linear_grid(start, stop, steps)));
        }
        s.split(',').map(num).collect::<Result<_, _>>().map(Grid)
    }
}

pub fn linear_grid(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![start];
    }
    (0..=steps)
        .map(|i| start + (stop - start) * i as f64 / steps as f64)
        .collect()
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Number of sites (lower end of the range for scan, certify, hardy-check).
    #[arg(long, global = true)]
    pub n: Option<usize>,

    /// Upper end of the site range.
    #[arg(long, global = true)]
    pub n_max: Option<usize>,

    #[arg(long, global = true, value_enum)]
    pub noise: Option<Noise>,

    /// Visibility (white) or survival probability (loss).
    #[arg(long, global = true)]
    pub p: Option<f64>,

    #[arg(long, global = true, value_name = "START:STOP:STEPS|LIST")]
    pub p_grid: Option<Grid>,

    /// Shots per measurement setting.
    #[arg(long, global = true)]
    pub shots: Option<u64>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the table here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Write an SVG plot (scan, noise-sweep).
    #[arg(long, global = true, value_name = "PATH")]
    pub plot: Option<PathBuf>,

    /// Largest n the exhaustive search will attempt.
    #[arg(long, global = true)]
    pub ceiling: Option<usize>,
}

/// Run configuration; also the schema of `--config` files.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<Noise>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ceiling: Option<usize>,
}

impl RunConfig {
    pub fn from_flags(command: Option<Command>, flags: Flags) -> Self {
        Self {
            command,
            n: flags.n,
            n_max: flags.n_max,
            noise: flags.noise,
            p: flags.p,
            p_grid: flags.p_grid.map(|g| g.0),
            shots: flags.shots,
            seed: flags.seed,
            format: flags.format,
            out: flags.out,
            plot: flags.plot,
            ceiling: flags.ceiling,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }

    /// Field-wise `self` over `fallback`.
    pub fn or(self, fallback: RunConfig) -> Self {
        Self {
            command: self.command.or(fallback.command),
            n: self.n.or(fallback.n),
            n_max: self.n_max.or(fallback.n_max),
            noise: self.noise.or(fallback.noise),
            p: self.p.or(fallback.p),
            p_grid: self.p_grid.or(fallback.p_grid),
            shots: self.shots.or(fallback.shots),
            seed: self.seed.or(fallback.seed),
            format: self.format.or(fallback.format),
            out: self.out.or(fallback.out),
            plot: self.plot.or(fallback.plot),
            ceiling: self.ceiling.or(fallback.ceiling),
        }
    }

    /// Fills command defaults and validates. The returned config keeps only
    /// the fields the command uses.
    pub fn resolve(self) -> Result<(RunConfig, Plan), CliError> {
        let command = self
            .command
            .ok_or_else(|| CliError::Config("no command given".into()))?;
        let base = RunConfig {
            command: Some(command),
            format: Some(self.format.unwrap_or_default()),
            out: self.out.clone(),
            ..RunConfig::default()
        };
        let (resolved, plan) = match command {
            Command::Scan => {
                let range = self.range()?;
                let cfg = RunConfig {
                    n: Some(*range.start()),
                    n_max: Some(*range.end()),
                    plot: self.plot.clone(),
                    ..base
                };
                (cfg, Plan::Scan { range })
            }
            Command::Certify | Command::HardyCheck => {
                let range = self.range()?;
                let ceiling = self.ceiling.unwrap_or(DEFAULT_ENUMERATION_CEILING);
                if ceiling > MAX_ENUMERATION_CEILING {
                    return Err(CliError::Config(format!(
                        "--ceiling {ceiling} exceeds the hard limit of {MAX_ENUMERATION_CEILING}"
                    )));
                }
                let cfg = RunConfig {
                    n: Some(*range.start()),
                    n_max: Some(*range.end()),
                    ceiling: Some(ceiling),
                    ..base
                };
                let plan = if command == Command::Certify {
                    Plan::Certify { range, ceiling }
                } else {
                    Plan::HardyCheck { range, ceiling }
                };
                (cfg, plan)
            }
            Command::Simulate => {
                let n = self.single_n()?;
                let noise = self.noise.unwrap_or(Noise::White);
                let p = self.p.unwrap_or(1.0);
                let model = NoiseModel::new(noise.into(), p).map_err(config)?;
                let shots = self.shots.unwrap_or(DEFAULT_SHOTS);
                if shots == 0 {
                    return Err(CliError::Config("--shots must be positive".into()));
                }
                let seed = self.seed.unwrap_or(DEFAULT_SEED);
                let cfg = RunConfig {
                    n: Some(n),
                    noise: Some(noise),
                    p: Some(p),
                    shots: Some(shots),
                    seed: Some(seed),
                    ..base
                };
                (
                    cfg,
                    Plan::Simulate {
                        n,
                        model,
                        shots,
                        seed,
                    },
                )
            }
            Command::NoiseSweep => {
                let n = self.single_n()?;
                let noise = self.noise.unwrap_or(Noise::White);
                let grid = match (&self.p_grid, self.p) {
                    (Some(g), _) => g.clone(),
                    (None, Some(p)) => vec![p],
                    (None, None) => linear_grid(0.0, 1.0, DEFAULT_GRID_STEPS),
                };
                if grid.is_empty() {
                    return Err(CliError::Config("empty --p-grid".into()));
                }
                if let Some(bad) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                    return Err(CliError::Config(format!(
                        "grid value {bad} lies outside [0, 1]"
                    )));
                }
                let cfg = RunConfig {
                    n: Some(n),
                    noise: Some(noise),
                    p_grid: Some(grid.clone()),
                    plot: self.plot.clone(),
                    ..base
                };
                (
                    cfg,
                    Plan::NoiseSweep {
                        n,
                        kind: noise.into(),
                        grid,
                    },
                )
            }
        };
        Ok((resolved, plan))
    }

    fn range(&self) -> Result<RangeInclusive<usize>, CliError> {
        let (lo, hi) = match (self.n, self.n_max) {
            (None, None) if self.command == Some(Command::Scan) => {
                (*DEFAULT_SCAN_RANGE.start(), *DEFAULT_SCAN_RANGE.end())
            }
            (None, None) => (3, 3),
            (Some(n), None) => (n, n),
            (None, Some(m)) => (3, m),
            (Some(n), Some(m)) => (n, m),
        };
        check_n(lo)?;
        if hi < lo {
            return Err(CliError::Config(format!("empty range {lo}..={hi}")));
        }
        Ok(lo..=hi)
    }

    fn single_n(&self) -> Result<usize, CliError> {
        let n = self.n.unwrap_or(3);
        check_n(n)?;
        Ok(n)
    }
}

fn check_n(n: usize) -> Result<(), CliError> {
    if n < 3 {
        return Err(CliError::Config(format!(
            "n = {n}: at least 3 sites required"
        )));
    }
    Ok(())
}

fn config(e: wnl_core::Error) -> CliError {
    CliError::Config(e.to_string())
}

/// A validated unit of work.
#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    Scan {
        range: RangeInclusive<usize>,
    },
    Certify {
        range: RangeInclusive<usize>,
        ceiling: usize,
    },
    Simulate {
        n: usize,
        model: NoiseModel,
        shots: u64,
        seed: u64,
    },
    NoiseSweep {
        n: usize,
        kind: NoiseKind,
        grid: Vec<f64>,
    },
    HardyCheck {
        range: RangeInclusive<usize>,
        ceiling: usize,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "0:1:4".parse().unwrap();
        assert_eq!(g.0, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g: Grid = "0.1, 0.9".parse().unwrap();
        assert_eq!(g.0, vec![0.1, 0.9]);
        assert!("0:1".parse::<Grid>().is_err());
        assert!("a,b".parse::<Grid>().is_err());
    }

    #[test]
    fn precedence() {
        let flags = RunConfig {
            n: Some(5),
            ..RunConfig::default()
        };
        let file = RunConfig {
            command: Some(Command::Scan),
            n: Some(4),
            n_max: Some(9),
            ..RunConfig::default()
        };
        let (cfg, plan) = flags.or(file).resolve().unwrap();
        assert_eq!(plan, Plan::Scan { range: 5..=9 });
        assert_eq!(cfg.format, Some(Format::Csv));
    }

    #[test]
    fn validation() {
        let cfg = |c, n| RunConfig {
            command: Some(c),
            n: Some(n),
            ..RunConfig::default()
        };
        assert!(cfg(Command::Scan, 2).resolve().is_err());
        assert!(RunConfig {
            n_max: Some(3),
            ..cfg(Command::Scan, 5)
        }
        .resolve()
        .is_err());
        assert!(RunConfig {
            p: Some(1.5),
            ..cfg(Command::Simulate, 3)
        }
        .resolve()
        .is_err());
        assert!(RunConfig {
            ceiling: Some(40),
            ..cfg(Command::Certify, 3)
        }
        .resolve()
        .is_err());
        assert!(RunConfig::default().resolve().is_err());
    }

    #[test]
    fn config_file_schema() {
        let text = r#"{"command": "noise-sweep", "noise": "loss", "p_grid": [0.5, 1.0]}"#;
        let cfg: RunConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.command, Some(Command::NoiseSweep));
        assert_eq!(cfg.noise, Some(Noise::Loss));
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }
}
