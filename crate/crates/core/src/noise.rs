//! Noisy W-state predictions and finite-shot simulation of the test protocol.
//!
//! Noise mixes the ideal state with a background `σ` at the probability
//! level: `P = p·P_W + (1 − p)·P_σ`. White noise uses the maximally mixed
//! state; photon loss uses the vacuum, which is exact for a single excitation
//! with uniform per-site survival probability `p`.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF, Normal};

use crate::error::{check_len, Error, Result};
use crate::inequality::{build_omega, omega_closed_form, BellExpression};
use crate::measurement::{MeasurementSetting, OutcomeAssignment, PartialAssignment, Sign};
use crate::state::{OutcomeModel, Vacuum, WState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Mixture with the maximally mixed state; `p` is the visibility.
    WhiteNoise,
    /// Mixture with the vacuum; `p` is the photon survival probability.
    PhotonLoss,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub p: f64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "noise parameter must lie in [0, 1], got {p}"
            )));
        }
        Ok(Self { kind, p })
    }

    pub fn white(visibility: f64) -> Result<Self> {
        Self::new(NoiseKind::WhiteNoise, visibility)
    }

    pub fn loss(survival: f64) -> Result<Self> {
        Self::new(NoiseKind::PhotonLoss, survival)
    }

    /// The noiseless W state.
    pub fn ideal() -> Self {
        Self {
            kind: NoiseKind::WhiteNoise,
            p: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        Self::new(self.kind, self.p).map(|_| ())
    }
}

/// The maximally mixed state: every product outcome has probability `2^-n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaximallyMixed {
    n: usize,
}

impl MaximallyMixed {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModeCount { n, min: 1 });
        }
        Ok(Self { n })
    }
}

impl OutcomeModel for MaximallyMixed {
    fn modes(&self) -> usize {
        self.n
    }

    fn outcome_probability(
        &self,
        setting: &MeasurementSetting,
        outcome: &OutcomeAssignment,
    ) -> Result<f64> {
        check_len(self.n, setting.len())?;
        check_len(self.n, outcome.len())?;
        Ok(0.5f64.powi(self.n as i32))
    }

    fn partial_probability(
        &self,
        setting: &MeasurementSetting,
        partial: &PartialAssignment,
    ) -> Result<f64> {
        check_len(self.n, setting.len())?;
        check_len(self.n, partial.len())?;
        Ok(0.5f64.powi(partial.fixed_sites().count() as i32))
    }
}

/// W state mixed with a noise background, evaluated in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyW {
    w: WState,
    n: usize,
    model: NoiseModel,
}

impl NoisyW {
    pub fn new(n: usize, model: NoiseModel) -> Result<Self> {
        model.validate()?;
        Ok(Self {
            w: WState::new(n)?,
            n,
            model,
        })
    }

    pub fn ideal(n: usize) -> Result<Self> {
        Self::new(n, NoiseModel::ideal())
    }

    pub fn model(&self) -> NoiseModel {
        self.model
    }

    fn mix(&self, ideal: f64, background: f64) -> f64 {
        let p = self.model.p;
        p * ideal + (1.0 - p) * background
    }
}

impl OutcomeModel for NoisyW {
    fn modes(&self) -> usize {
        self.n
    }

    fn outcome_probability(
        &self,
        setting: &MeasurementSetting,
        outcome: &OutcomeAssignment,
    ) -> Result<f64> {
        let ideal = self.w.outcome_probability(setting, outcome)?;
        let background = match self.model.kind {
            NoiseKind::WhiteNoise => {
                MaximallyMixed { n: self.n }.outcome_probability(setting, outcome)?
            }
            NoiseKind::PhotonLoss => Vacuum::new(self.n)?.outcome_probability(setting, outcome)?,
        };
        Ok(self.mix(ideal, background))
    }

    fn partial_probability(
        &self,
        setting: &MeasurementSetting,
        partial: &PartialAssignment,
    ) -> Result<f64> {
        let ideal = self.w.partial_probability(setting, partial)?;
        let background = match self.model.kind {
            NoiseKind::WhiteNoise => {
                MaximallyMixed { n: self.n }.partial_probability(setting, partial)?
            }
            NoiseKind::PhotonLoss => Vacuum::new(self.n)?.partial_probability(setting, partial)?,
        };
        Ok(self.mix(ideal, background))
    }
}

pub fn noisy_term_probability(
    n: usize,
    model: NoiseModel,
    setting: &MeasurementSetting,
    outcome: &OutcomeAssignment,
) -> Result<f64> {
    NoisyW::new(n, model)?.outcome_probability(setting, outcome)
}

/// Ω(n) evaluated on the noise background alone.
pub fn background_omega(n: usize, kind: NoiseKind) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidModeCount { n, min: 3 });
    }
    let nf = n as f64;
    let pairs = nf * (nf - 1.0);
    let half_pow = 0.5f64.powi(n as i32);
    Ok(match kind {
        NoiseKind::WhiteNoise => (nf - pairs - 2.0) * half_pow,
        NoiseKind::PhotonLoss => -(pairs / 4.0 + 2.0 * half_pow),
    })
}

/// `p·Ω_W(n) + (1 − p)·Ω_σ(n)`.
pub fn noisy_omega(n: usize, model: NoiseModel) -> Result<f64> {
    model.validate()?;
    let ideal = omega_closed_form(n)?;
    let background = background_omega(n, model.kind)?;
    Ok(model.p * ideal + (1.0 - model.p) * background)
}

/// The noise parameter at which the noisy Ω(n) crosses zero.
pub fn critical_parameter(n: usize, kind: NoiseKind) -> Result<f64> {
    let ideal = omega_closed_form(n)?;
    let background = background_omega(n, kind)?;
    if !(background < 0.0 && ideal > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "no crossing: background Ω = {background}, ideal Ω = {ideal}"
        )));
    }
    Ok(background / (background - ideal))
}

/// Outcome counts for one measurement setting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub setting: MeasurementSetting,
    /// Nonzero counts only.
    pub counts: BTreeMap<OutcomeAssignment, u64>,
    pub shots: u64,
}

impl ShotRecord {
    pub fn count(&self, outcome: &OutcomeAssignment) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    pub fn frequency(&self, outcome: &OutcomeAssignment) -> f64 {
        self.count(outcome) as f64 / self.shots as f64
    }
}

/// Draws `shots` i.i.d. outcomes from the exact distribution of `setting`.
pub fn sample_setting<M: OutcomeModel + ?Sized>(
    model: &M,
    setting: &MeasurementSetting,
    shots: u64,
    seed: u64,
) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let n = model.modes();
    let dist = model.distribution(setting)?;
    let sampler = WeightedIndex::new(&dist)
        .map_err(|e| Error::InvalidParameter(format!("bad outcome distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dense = vec![0u64; dist.len()];
    for _ in 0..shots {
        dense[sampler.sample(&mut rng)] += 1;
    }
    let counts = dense
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(mask, c)| (OutcomeAssignment::from_mask(n, mask as u64), c))
        .collect();
    Ok(ShotRecord {
        setting: setting.clone(),
        counts,
        shots,
    })
}

/// Generator seed for one setting: a stable hash of the setting mixed with
/// the master seed.
pub fn setting_seed(master: u64, setting: &MeasurementSetting) -> u64 {
    // FNV-1a over the setting string, then a splitmix64 finalizer.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in setting.to_string().bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = master ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Samples every setting with its own derived generator stream.
pub fn sample_settings<M: OutcomeModel + ?Sized>(
    model: &M,
    settings: &[MeasurementSetting],
    shots: u64,
    seed: u64,
) -> Result<Vec<ShotRecord>> {
    settings
        .par_iter()
        .map(|s| sample_setting(model, s, shots, setting_seed(seed, s)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalMethod {
    /// Normal approximation `p̂ ± z·√(p̂(1−p̂)/shots)`.
    Normal,
    /// Exact Clopper–Pearson interval.
    ClopperPearson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    pub confidence: f64,
    pub method: IntervalMethod,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            confidence: 0.99,
            method: IntervalMethod::Normal,
        }
    }
}

/// `(lower, upper)` interval for a binomial proportion.
pub fn binomial_interval(
    count: u64,
    shots: u64,
    confidence: f64,
    method: IntervalMethod,
) -> Result<(f64, f64)> {
    if shots == 0 || count > shots {
        return Err(Error::InvalidParameter(format!(
            "invalid count {count} of {shots}"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )));
    }
    let alpha = 1.0 - confidence;
    let p_hat = count as f64 / shots as f64;
    match method {
        IntervalMethod::Normal => {
            let z = Normal::standard().inverse_cdf(1.0 - alpha / 2.0);
            let hw = z * (p_hat * (1.0 - p_hat) / shots as f64).sqrt();
            Ok(((p_hat - hw).max(0.0), (p_hat + hw).min(1.0)))
        }
        IntervalMethod::ClopperPearson => {
            let k = count as f64;
            let m = shots as f64;
            let beta = |a: f64, b: f64, q: f64| -> Result<f64> {
                Beta::new(a, b)
                    .map(|d| d.inverse_cdf(q))
                    .map_err(|e| Error::InvalidParameter(e.to_string()))
            };
            let lower = if count == 0 {
                0.0
            } else {
                beta(k, m - k + 1.0, alpha / 2.0)?
            };
            let upper = if count == shots {
                1.0
            } else {
                beta(k + 1.0, m - k, 1.0 - alpha / 2.0)?
            };
            Ok((lower, upper))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEstimate {
    pub sign: i8,
    pub setting: MeasurementSetting,
    pub outcome: OutcomeAssignment,
    pub frequency: f64,
    pub lower: f64,
    pub upper: f64,
}

impl TermEstimate {
    pub fn half_width(&self) -> f64 {
        (self.frequency - self.lower).max(self.upper - self.frequency)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpressionEstimate {
    pub value: f64,
    /// `√Σ p̂(1−p̂)/shots` over terms.
    pub std_error: f64,
    /// Sum of per-term half-widths.
    pub half_width: f64,
    pub lower: f64,
    pub upper: f64,
    pub confidence: f64,
    pub method: IntervalMethod,
    pub shots_per_setting: u64,
    pub terms: Vec<TermEstimate>,
    pub records: Vec<ShotRecord>,
}

impl ExpressionEstimate {
    /// Whether the whole interval lies above the classical bound `bound`.
    pub fn violates(&self, bound: f64) -> bool {
        self.lower > bound
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Samples every distinct setting of `expr` and combines the term
/// frequencies into an estimate with a conservative interval.
pub fn estimate_expression<M: OutcomeModel + ?Sized>(
    expr: &BellExpression,
    model: &M,
    shots_per_setting: u64,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<ExpressionEstimate> {
    check_len(expr.modes(), model.modes())?;
    if shots_per_setting == 0 {
        return Err(Error::InvalidParameter(
            "shots per setting must be at least 1".into(),
        ));
    }
    let settings = expr.settings();
    let records = sample_settings(model, &settings, shots_per_setting, seed)?;
    let by_setting: BTreeMap<&MeasurementSetting, &ShotRecord> =
        records.iter().map(|r| (&r.setting, r)).collect();

    let mut value = 0.0;
    let mut variance = 0.0;
    let mut half_width = 0.0;
    let mut terms = Vec::with_capacity(expr.terms().len());
    for t in expr.terms() {
        let record = by_setting[&t.setting];
        let count = record.count(&t.outcome);
        let frequency = count as f64 / shots_per_setting as f64;
        let (lower, upper) =
            binomial_interval(count, shots_per_setting, opts.confidence, opts.method)?;
        let est = TermEstimate {
            sign: t.coefficient.value(),
            setting: t.setting.clone(),
            outcome: t.outcome.clone(),
            frequency,
            lower,
            upper,
        };
        value += t.weight() * frequency;
        variance += frequency * (1.0 - frequency) / shots_per_setting as f64;
        half_width += est.half_width();
        terms.push(est);
    }
    Ok(ExpressionEstimate {
        value,
        std_error: variance.sqrt(),
        half_width,
        lower: value - half_width,
        upper: value + half_width,
        confidence: opts.confidence,
        method: opts.method,
        shots_per_setting,
        terms,
        records,
    })
}

/// Simulated estimate of Ω(n) on the noisy W state.
pub fn estimate_omega(
    n: usize,
    model: NoiseModel,
    shots_per_setting: u64,
    seed: u64,
) -> Result<ExpressionEstimate> {
    estimate_omega_with(
        n,
        model,
        shots_per_setting,
        seed,
        &EstimateOptions::default(),
    )
}

pub fn estimate_omega_with(
    n: usize,
    model: NoiseModel,
    shots_per_setting: u64,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<ExpressionEstimate> {
    let expr = build_omega(n)?;
    estimate_expression(
        &expr,
        &NoisyW::new(n, model)?,
        shots_per_setting,
        seed,
        opts,
    )
}

/// Whether every shot of an all-Z record found exactly one photon.
pub fn single_photon_support(record: &ShotRecord) -> bool {
    record
        .counts
        .keys()
        .all(|o| o.signs().iter().filter(|s| **s == Sign::Minus).count() == 1)
}
