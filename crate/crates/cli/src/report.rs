//! Output tables, their CSV/JSON encodings, and number formatting.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use wnl_core::noise::IntervalMethod;

use crate::config::{Command, Format, RunConfig};
use crate::error::CliError;

/// Rounds to 12 significant digits. Emitted numbers are the shortest decimal
/// that parses back to the rounded value.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Six significant digits for human-readable summaries.
pub fn human(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        format!("{x:.*}", (5 - exp).max(0) as usize)
    } else {
        format!("{x:.5e}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    pub omega: f64,
    pub p_v: f64,
    pub terms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: f64,
    pub omega_noisy: f64,
    /// Marks the computed threshold row.
    pub critical: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotRow {
    pub setting: String,
    pub outcome: String,
    pub count: u64,
    pub shots: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRecord {
    pub encoding: u64,
    pub z: String,
    pub x: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyRecord {
    pub n: usize,
    pub max_value: f64,
    pub argmax: Vec<StrategyRecord>,
    pub argmax_count: u64,
    pub strategies_searched: u64,
    pub exhaustive: bool,
    pub wall_time: f64,
}

/// CSV form of [`CertifyRecord`]; `argmax` holds `;`-separated encodings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyRow {
    pub n: usize,
    pub max_value: f64,
    pub argmax_count: u64,
    pub argmax: String,
    pub strategies_searched: u64,
    pub exhaustive: bool,
    pub wall_time: f64,
}

impl From<&CertifyRecord> for CertifyRow {
    fn from(r: &CertifyRecord) -> Self {
        let argmax = r
            .argmax
            .iter()
            .map(|s| s.encoding.to_string())
            .collect::<Vec<_>>()
            .join(";");
        Self {
            n: r.n,
            max_value: r.max_value,
            argmax_count: r.argmax_count,
            argmax,
            strategies_searched: r.strategies_searched,
            exhaustive: r.exhaustive,
            wall_time: r.wall_time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyRow {
    pub n: usize,
    pub strategies_searched: u64,
    pub survivors: u64,
    pub uniform_x_survivors: u64,
    pub counterexamples: usize,
    pub quantum_all_equal: f64,
    pub closed_form_all_equal: f64,
    pub implication_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateSummary {
    pub value: f64,
    pub std_error: f64,
    pub lower: f64,
    pub upper: f64,
    pub confidence: f64,
    pub method: IntervalMethod,
    pub shots_per_setting: u64,
    pub classical_bound: f64,
    pub verdict: String,
}

pub const VERDICT_VIOLATION: &str = "violation detected";
pub const VERDICT_NONE: &str = "no violation";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Body<T> {
    Rows(Vec<T>),
    Records(Vec<T>),
}

impl<T> Body<T> {
    pub fn items(&self) -> &[T] {
        match self {
            Body::Rows(v) | Body::Records(v) => v,
        }
    }
}

/// Top-level JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<T> {
    pub command: Command,
    pub config: RunConfig,
    #[serde(flatten)]
    pub body: Body<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateSummary>,
    pub version: String,
}

impl<T> Document<T> {
    pub fn items(&self) -> &[T] {
        self.body.items()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Scan(Document<ScanRow>),
    Certify(Document<CertifyRecord>),
    Simulate(Document<ShotRow>),
    NoiseSweep(Document<SweepRow>),
    HardyCheck(Document<HardyRow>),
}

impl Report {
    pub fn write<W: Write>(&self, format: Format, w: W) -> Result<(), CliError> {
        match self {
            Report::Scan(d) => emit(d, format, w, |r| r.clone()),
            Report::Certify(d) => emit(d, format, w, |r| CertifyRow::from(r)),
            Report::Simulate(d) => emit(d, format, w, |r| r.clone()),
            Report::NoiseSweep(d) => emit(d, format, w, |r| r.clone()),
            Report::HardyCheck(d) => emit(d, format, w, |r| r.clone()),
        }
    }
}

fn emit<T, R, W>(
    doc: &Document<T>,
    format: Format,
    mut w: W,
    to_row: impl Fn(&T) -> R,
) -> Result<(), CliError>
where
    T: Serialize,
    R: Serialize,
    W: Write,
{
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, doc)?;
            writeln!(w)?;
        }
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(w);
            for item in doc.items() {
                csv.serialize(to_row(item))?;
            }
            csv.flush()?;
        }
    }
    Ok(())
}

pub fn read_csv<T: DeserializeOwned, R: Read>(r: R) -> Result<Vec<T>, CliError> {
    csv::Reader::from_reader(r)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(CliError::from)
}

pub fn read_json<T: DeserializeOwned, R: Read>(r: R) -> Result<Document<T>, CliError> {
    Ok(serde_json::from_reader(r)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round12(1.0 - 20.0 / 524_288.0), 0.999961853027);
        assert_eq!(round12(5.0 / 7.0), 0.714285714286);
        assert_eq!(round12(0.25), 0.25);
        assert_eq!(round12(-1.0 / 3.0), -0.333333333333);
        assert_eq!(round12(0.0), 0.0);
    }

    #[test]
    fn human_digits() {
        assert_eq!(human(1.0 - 20.0 / 524_288.0), "0.999962");
        assert_eq!(human(0.25), "0.250000");
        assert_eq!(human(12.5), "12.5000");
        assert_eq!(human(-0.0009765625), "-0.000976562");
        assert_eq!(human(1.5e-9), "1.50000e-9");
    }
}
