use std::ops::RangeInclusive;

use wnl_core::inequality::omega_term_count;
use wnl_core::lhv::EnumerationOptions;
use wnl_core::noise::{estimate_omega_with, EstimateOptions};
use wnl_core::{
    build_omega, critical_parameter, enumerate_bound_with, hardy_implication_check_with,
    noisy_omega, omega_closed_form, violation_probability, NoiseKind, NoiseModel,
};

use crate::config::{Command, Plan, RunConfig};
use crate::error::CliError;
use crate::report::{
    human, round12, Body, CertifyRecord, Document, EstimateSummary, HardyRow, Report, ScanRow,
    ShotRow, StrategyRecord, SweepRow, VERDICT_NONE, VERDICT_VIOLATION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A local strategy beat the bound, or the Hardy implication failed.
    BoundViolation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    /// Human-readable lines for stderr.
    pub summary: Vec<String>,
    pub status: Status,
}

pub fn execute(config: RunConfig, plan: &Plan) -> Result<Outcome, CliError> {
    match plan {
        Plan::Scan { range } => scan(config, range.clone()),
        Plan::Certify { range, ceiling } => certify(config, range.clone(), *ceiling),
        Plan::Simulate {
            n,
            model,
            shots,
            seed,
        } => simulate(config, *n, *model, *shots, *seed),
        Plan::NoiseSweep { n, kind, grid } => noise_sweep(config, *n, *kind, grid),
        Plan::HardyCheck { range, ceiling } => hardy_check(config, range.clone(), *ceiling),
    }
}

fn document<T>(command: Command, config: RunConfig, body: Body<T>) -> Document<T> {
    Document {
        command,
        config,
        body,
        estimate: None,
        version: wnl_core::VERSION.to_string(),
    }
}

pub fn scan_rows(range: RangeInclusive<usize>) -> Result<Vec<ScanRow>, CliError> {
    range
        .map(|n| {
            Ok(ScanRow {
                n,
                omega: round12(omega_closed_form(n)?),
                p_v: round12(violation_probability(n)?),
                terms: omega_term_count(n),
            })
        })
        .collect()
}

fn scan(config: RunConfig, range: RangeInclusive<usize>) -> Result<Outcome, CliError> {
    let rows = scan_rows(range)?;
    let summary = rows
        .iter()
        .map(|r| {
            format!(
                "n = {}: Omega_W = {}, P_v = {}, {} terms",
                r.n,
                human(r.omega),
                human(r.p_v),
                r.terms
            )
        })
        .collect();
    Ok(Outcome {
        report: Report::Scan(document(Command::Scan, config, Body::Rows(rows))),
        summary,
        status: Status::Ok,
    })
}

fn certify(
    config: RunConfig,
    range: RangeInclusive<usize>,
    ceiling: usize,
) -> Result<Outcome, CliError> {
    let opts = EnumerationOptions::with_ceiling(ceiling);
    let mut records = Vec::new();
    let mut summary = Vec::new();
    for n in range {
        let cert = enumerate_bound_with(&build_omega(n)?, &opts)?;
        summary.push(format!(
            "n = {n}: max = {} over {} strategies ({} maximizers) in {} s",
            human(cert.max_value),
            cert.strategies_searched,
            cert.argmax_count,
            human(cert.wall_time)
        ));
        records.push(CertifyRecord {
            n,
            max_value: round12(cert.max_value),
            argmax: cert
                .argmax
                .iter()
                .map(|s| StrategyRecord {
                    encoding: s.encode(),
                    z: signs(s.z_signs()),
                    x: signs(s.x_signs()),
                })
                .collect(),
            argmax_count: cert.argmax_count,
            strategies_searched: cert.strategies_searched,
            exhaustive: cert.exhaustive,
            wall_time: round12(cert.wall_time),
        });
    }
    let status = if records.iter().all(|r| r.max_value == 0.0) {
        Status::Ok
    } else {
        summary.push("local bound exceeds 0".into());
        Status::BoundViolation
    };
    Ok(Outcome {
        report: Report::Certify(document(Command::Certify, config, Body::Records(records))),
        summary,
        status,
    })
}

fn signs(s: &[wnl_core::Sign]) -> String {
    s.iter().map(|s| s.as_char()).collect()
}

fn simulate(
    config: RunConfig,
    n: usize,
    model: NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<Outcome, CliError> {
    let opts = EstimateOptions::default();
    let est = estimate_omega_with(n, model, shots, seed, &opts)?;
    let bound = build_omega(n)?.classical_bound();
    let rows: Vec<ShotRow> = est
        .records
        .iter()
        .flat_map(|rec| {
            rec.counts.iter().map(move |(outcome, &count)| ShotRow {
                setting: rec.setting.to_string(),
                outcome: outcome.to_string(),
                count,
                shots: rec.shots,
            })
        })
        .collect();
    let verdict = if est.violates(bound) {
        VERDICT_VIOLATION
    } else {
        VERDICT_NONE
    };
    let summary = vec![
        format!(
            "Omega_hat = {} +/- {} ({}% interval [{}, {}], {} shots per setting)",
            human(est.value),
            human(est.half_width),
            100.0 * est.confidence,
            human(est.lower),
            human(est.upper),
            shots
        ),
        format!(
            "exact Omega = {}; verdict: {verdict}",
            human(noisy_omega(n, model)?)
        ),
    ];
    let mut doc = document(Command::Simulate, config, Body::Records(rows));
    doc.estimate = Some(EstimateSummary {
        value: round12(est.value),
        std_error: round12(est.std_error),
        lower: round12(est.lower),
        upper: round12(est.upper),
        confidence: est.confidence,
        method: est.method,
        shots_per_setting: est.shots_per_setting,
        classical_bound: bound,
        verdict: verdict.into(),
    });
    Ok(Outcome {
        report: Report::Simulate(doc),
        summary,
        status: Status::Ok,
    })
}

/// Grid rows plus one `critical` row at the threshold, sorted by `p`. Grid
/// rows are evaluated at the printed `p`; the critical row at the exact one.
pub fn sweep_rows(n: usize, kind: NoiseKind, grid: &[f64]) -> Result<Vec<SweepRow>, CliError> {
    let mut rows = grid
        .iter()
        .map(|&p| {
            let p = round12(p);
            Ok(SweepRow {
                p,
                omega_noisy: round12(noisy_omega(n, NoiseModel::new(kind, p)?)?),
                critical: false,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let p_star = critical_parameter(n, kind)?;
    if (0.0..=1.0).contains(&p_star) {
        rows.push(SweepRow {
            p: round12(p_star),
            omega_noisy: round12(noisy_omega(n, NoiseModel::new(kind, p_star)?)?),
            critical: true,
        });
    }
    rows.sort_by(|a, b| a.p.total_cmp(&b.p));
    Ok(rows)
}

fn noise_sweep(
    config: RunConfig,
    n: usize,
    kind: NoiseKind,
    grid: &[f64],
) -> Result<Outcome, CliError> {
    let rows = sweep_rows(n, kind, grid)?;
    let p_star = critical_parameter(n, kind)?;
    let label = match kind {
        NoiseKind::WhiteNoise => "visibility v*",
        NoiseKind::PhotonLoss => "survival eta*",
    };
    let summary = vec![format!(
        "n = {n}: critical {label} = {}; Omega(1) = {}, Omega(0) = {}",
        human(p_star),
        human(noisy_omega(n, NoiseModel::new(kind, 1.0)?)?),
        human(noisy_omega(n, NoiseModel::new(kind, 0.0)?)?)
    )];
    Ok(Outcome {
        report: Report::NoiseSweep(document(Command::NoiseSweep, config, Body::Rows(rows))),
        summary,
        status: Status::Ok,
    })
}

fn hardy_check(
    config: RunConfig,
    range: RangeInclusive<usize>,
    ceiling: usize,
) -> Result<Outcome, CliError> {
    let opts = EnumerationOptions::with_ceiling(ceiling);
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for n in range {
        let r = hardy_implication_check_with(n, &opts)?;
        summary.push(format!(
            "n = {n}: {} of {} survivors answer X uniformly; quantum P(all X equal) = {}; implication {}",
            r.uniform_x_survivors,
            r.survivors,
            human(r.quantum_all_equal),
            if r.implication_holds { "holds" } else { "FAILS" }
        ));
        rows.push(HardyRow {
            n,
            strategies_searched: r.strategies_searched,
            survivors: r.survivors,
            uniform_x_survivors: r.uniform_x_survivors,
            counterexamples: r.counterexamples.len(),
            quantum_all_equal: round12(r.quantum_all_equal),
            closed_form_all_equal: round12(r.closed_form_all_equal),
            implication_holds: r.implication_holds,
        });
    }
    let status = if rows.iter().all(|r| r.implication_holds) {
        Status::Ok
    } else {
        Status::BoundViolation
    };
    Ok(Outcome {
        report: Report::HardyCheck(document(Command::HardyCheck, config, Body::Rows(rows))),
        summary,
        status,
    })
}
