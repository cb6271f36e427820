//! Single-excitation states and exact outcome probabilities.
//!
//! Two independent routes compute the same numbers: a dense statevector over
//! the `2^n` occupation basis ([`PureState`]) and an `O(n)` closed form for the
//! symmetric single-photon state ([`WState`]).

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::measurement::{
    Basis, Event, MeasurementSetting, OutcomeAssignment, PartialAssignment, Sign,
};

/// Largest mode count for which a dense `2^n` amplitude vector is built.
pub const STATEVECTOR_MAX_MODES: usize = 24;

/// Largest outcome space enumerated when an event has no closed form.
pub const ENUMERATION_MAX_SITES: usize = 24;

const NORM_TOLERANCE: f64 = 1e-12;

/// Smallest condition probability accepted by [`conditional_probability`].
pub const CONDITION_EPSILON: f64 = 1e-15;

/// Anything that assigns probabilities to product-basis outcomes.
pub trait OutcomeModel: Sync {
    fn modes(&self) -> usize;

    fn outcome_probability(
        &self,
        setting: &MeasurementSetting,
        outcome: &OutcomeAssignment,
    ) -> Result<f64>;

    /// Marginal probability of the fixed sites of `partial`.
    ///
    /// The default sums [`OutcomeModel::outcome_probability`] over the free
    /// sites only.
    fn partial_probability(
        &self,
        setting: &MeasurementSetting,
        partial: &PartialAssignment,
    ) -> Result<f64> {
        check_len(self.modes(), setting.len())?;
        check_len(self.modes(), partial.len())?;
        let free: Vec<usize> = partial.free_sites().collect();
        if free.len() > ENUMERATION_MAX_SITES {
            return Err(Error::TooManyModes {
                n: free.len(),
                max: ENUMERATION_MAX_SITES,
            });
        }
        let mut signs: Vec<Sign> = partial
            .signs()
            .iter()
            .map(|s| s.unwrap_or(Sign::Plus))
            .collect();
        let mut total = 0.0;
        for combo in 0u64..1 << free.len() {
            for (j, &site) in free.iter().enumerate() {
                signs[site] = Sign::from_bit(combo >> j & 1 == 1);
            }
            total += self.outcome_probability(setting, &OutcomeAssignment::new(signs.clone()))?;
        }
        Ok(total)
    }

    /// Probabilities of every outcome of `setting`, indexed by outcome mask.
    fn distribution(&self, setting: &MeasurementSetting) -> Result<Vec<f64>> {
        let n = self.modes();
        check_len(n, setting.len())?;
        if n > ENUMERATION_MAX_SITES {
            return Err(Error::TooManyModes {
                n,
                max: ENUMERATION_MAX_SITES,
            });
        }
        (0u64..1 << n)
            .map(|m| self.outcome_probability(setting, &OutcomeAssignment::from_mask(n, m)))
            .collect()
    }
}

impl<M: OutcomeModel + ?Sized> OutcomeModel for &M {
    fn modes(&self) -> usize {
        (**self).modes()
    }

    fn outcome_probability(
        &self,
        setting: &MeasurementSetting,
        outcome: &OutcomeAssignment,
    ) -> Result<f64> {
        (**self).outcome_probability(setting, outcome)
    }

    fn partial_probability(
        &self,
        setting: &MeasurementSetting,
        partial: &PartialAssignment,
    ) -> Result<f64> {
        (**self).partial_probability(setting, partial)
    }

    fn distribution(&self, setting: &MeasurementSetting) -> Result<Vec<f64>> {
        (**self).distribution(setting)
    }
}

fn check_modes(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidModeCount { n, min: 1 });
    }
    Ok(())
}

/// Dense statevector over the occupation basis; bit `i` of the index is site `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "amplitude vector length {len} is not 2^n with n >= 1"
            )));
        }
        let n = len.trailing_zeros() as usize;
        if n > STATEVECTOR_MAX_MODES {
            return Err(Error::TooManyModes {
                n,
                max: STATEVECTOR_MAX_MODES,
            });
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { n, amplitudes })
    }

    fn zeroed(n: usize) -> Result<Vec<Complex64>> {
        check_modes(n)?;
        if n > STATEVECTOR_MAX_MODES {
            return Err(Error::TooManyModes {
                n,
                max: STATEVECTOR_MAX_MODES,
            });
        }
        Ok(vec![Complex64::new(0.0, 0.0); 1 << n])
    }

    /// `(|10…0⟩ + |01…0⟩ + … + |0…01⟩)/√n`.
    pub fn w_state(n: usize) -> Result<Self> {
        let mut amplitudes = Self::zeroed(n)?;
        let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        for site in 0..n {
            amplitudes[1 << site] = a;
        }
        Ok(Self { n, amplitudes })
    }

    /// All modes empty.
    pub fn vacuum(n: usize) -> Result<Self> {
        let mut amplitudes = Self::zeroed(n)?;
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amplitudes })
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Splits a setting/outcome pair into the masks used by the contraction
    /// kernels: occupation bits forced by Z sites, the X-site mask, and the
    /// X sites with outcome `-1`.
    fn masks(setting: &MeasurementSetting, partial: &PartialAssignment) -> (u64, u64, u64) {
        let mut z_fixed_care = 0u64;
        let mut z_occupied = 0u64;
        let mut x_mask = 0u64;
        let mut x_minus = 0u64;
        for (site, sign) in partial.fixed_sites() {
            let bit = 1u64 << site;
            match setting.basis(site) {
                Basis::Z => {
                    z_fixed_care |= bit;
                    if sign.is_minus() {
                        z_occupied |= bit;
                    }
                }
                Basis::X => {
                    x_mask |= bit;
                    if sign.is_minus() {
                        x_minus |= bit;
                    }
                }
            }
        }
        debug_assert_eq!(z_fixed_care & x_mask, 0);
        (z_occupied, x_mask, x_minus)
    }

    /// `Σ_b ψ_b ∏ ⟨φ_i|b_i⟩` over the occupation bits `b` that agree with
    /// `base` outside `x_mask`.
    fn projected_amplitude(&self, base: u64, x_mask: u64, x_minus: u64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut sub = 0u64;
        loop {
            let a = self.amplitudes[(base | sub) as usize];
            if (sub & x_minus).count_ones() % 2 == 1 {
                acc -= a;
            } else {
                acc += a;
            }
            sub = sub.wrapping_sub(x_mask) & x_mask;
            if sub == 0 {
                break;
            }
        }
        acc * 0.5f64.powi(x_mask.count_ones() as i32).sqrt()
    }
}

impl OutcomeModel for PureState {
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
        let (z_occupied, x_mask, x_minus) = Self::masks(setting, &outcome.into());
        Ok(self
            .projected_amplitude(z_occupied, x_mask, x_minus)
            .norm_sqr())
    }

    fn partial_probability(
        &self,
        setting: &MeasurementSetting,
        partial: &PartialAssignment,
    ) -> Result<f64> {
        check_len(self.n, setting.len())?;
        check_len(self.n, partial.len())?;
        let (z_occupied, x_mask, x_minus) = Self::masks(setting, partial);
        // Free sites are summed incoherently in the occupation basis.
        let free_mask = partial.free_sites().fold(0u64, |m, site| m | 1 << site);
        let mut total = 0.0;
        let mut sub = 0u64;
        loop {
            total += self
                .projected_amplitude(z_occupied | sub, x_mask, x_minus)
                .norm_sqr();
            sub = sub.wrapping_sub(free_mask) & free_mask;
            if sub == 0 {
                break;
            }
        }
        Ok(total)
    }

    fn distribution(&self, setting: &MeasurementSetting) -> Result<Vec<f64>> {
        check_len(self.n, setting.len())?;
        let mut amps = self.amplitudes.clone();
        // Hadamard on every X site maps |±⟩ onto occupation bit 0/1, so the
        // resulting index is the outcome mask.
        for site in setting.x_sites() {
            let bit = 1usize << site;
            for i in 0..amps.len() {
                if i & bit == 0 {
                    let (a, b) = (amps[i], amps[i | bit]);
                    amps[i] = (a + b) * FRAC_1_SQRT_2;
                    amps[i | bit] = (a - b) * FRAC_1_SQRT_2;
                }
            }
        }
        Ok(amps.into_iter().map(|a| a.norm_sqr()).collect())
    }
}

/// The `n`-mode W state evaluated in closed form, without a statevector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WState {
    n: usize,
}

impl WState {
    pub fn new(n: usize) -> Result<Self> {
        check_modes(n)?;
        Ok(Self { n })
    }
}

/// Closed-form weight of the photon-carrying branch restricted to `sites`.
///
/// Returns `n · P` where `P` is the probability of the given fixed signs on a
/// W state whose photon is spread over exactly the listed sites; callers
/// divide by their own mode count.
fn w_branch_weight(fixed: impl Iterator<Item = (Basis, Sign)>) -> f64 {
    let mut x_count = 0i32;
    let mut occupied = 0usize;
    let mut x_sum = 0i64;
    for (basis, sign) in fixed {
        match basis {
            Basis::Z if sign.is_minus() => occupied += 1,
            Basis::Z => {}
            Basis::X => {
                x_count += 1;
                x_sum += i64::from(sign.value());
            }
        }
    }
    let scale = 0.5f64.powi(x_count);
    match occupied {
        0 => scale * (x_sum * x_sum) as f64,
        1 => scale,
        _ => 0.0,
    }
}

/// Probability that the empty state gives the fixed signs.
fn vacuum_weight(fixed: impl Iterator<Item = (Basis, Sign)>) -> f64 {
    let mut x_count = 0i32;
    for (basis, sign) in fixed {
        match (basis, sign) {
            (Basis::Z, Sign::Minus) => return 0.0,
            (Basis::Z, Sign::Plus) => {}
            (Basis::X, _) => x_count += 1,
        }
    }
    0.5f64.powi(x_count)
}

impl OutcomeModel for WState {
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
        let fixed = setting
            .bases()
            .iter()
            .copied()
            .zip(outcome.signs().iter().copied());
        Ok(w_branch_weight(fixed) / self.n as f64)
    }

    /// The reduced state on `m` fixed sites is `(m/n)·W_m + (1 − m/n)·vacuum`.
    fn partial_probability(
        &self,
        setting: &MeasurementSetting,
        partial: &PartialAssignment,
    ) -> Result<f64> {
        check_len(self.n, setting.len())?;
        check_len(self.n, partial.len())?;
        let fixed: Vec<(Basis, Sign)> = partial
            .fixed_sites()
            .map(|(i, s)| (setting.basis(i), s))
            .collect();
        let m = fixed.len();
        if m == 0 {
            return Ok(1.0);
        }
        let n = self.n as f64;
        let photon_inside = w_branch_weight(fixed.iter().copied()) / n;
        let photon_outside = (self.n - m) as f64 / n * vacuum_weight(fixed.into_iter());
        Ok(photon_inside + photon_outside)
    }
}

/// The all-empty state evaluated in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vacuum {
    n: usize,
}

impl Vacuum {
    pub fn new(n: usize) -> Result<Self> {
        check_modes(n)?;
        Ok(Self { n })
    }
}

impl OutcomeModel for Vacuum {
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
        Ok(vacuum_weight(
            setting
                .bases()
                .iter()
                .copied()
                .zip(outcome.signs().iter().copied()),
        ))
    }

    fn partial_probability(
        &self,
        setting: &MeasurementSetting,
        partial: &PartialAssignment,
    ) -> Result<f64> {
        check_len(self.n, setting.len())?;
        check_len(self.n, partial.len())?;
        Ok(vacuum_weight(
            partial.fixed_sites().map(|(i, s)| (setting.basis(i), s)),
        ))
    }
}

pub fn build_w_state(n: usize) -> Result<PureState> {
    PureState::w_state(n)
}

pub fn build_vacuum(n: usize) -> Result<PureState> {
    PureState::vacuum(n)
}

/// Statevector probability of a full outcome.
pub fn outcome_probability(
    state: &PureState,
    setting: &MeasurementSetting,
    outcome: &OutcomeAssignment,
) -> Result<f64> {
    state.outcome_probability(setting, outcome)
}

/// Closed-form probability of a full outcome on the `n`-mode W state.
pub fn analytic_w_probability(
    n: usize,
    setting: &MeasurementSetting,
    outcome: &OutcomeAssignment,
) -> Result<f64> {
    WState::new(n)?.outcome_probability(setting, outcome)
}

fn sum_outcomes<M: OutcomeModel + ?Sized>(
    model: &M,
    setting: &MeasurementSetting,
    outcomes: impl Iterator<Item = OutcomeAssignment>,
) -> Result<f64> {
    outcomes
        .map(|o| model.outcome_probability(setting, &o))
        .sum()
}

/// Probability that the outcome of `setting` lies in `event`.
pub fn event_probability<M: OutcomeModel + ?Sized>(
    model: &M,
    setting: &MeasurementSetting,
    event: &Event,
) -> Result<f64> {
    let n = model.modes();
    check_len(n, setting.len())?;
    event.validate(n)?;
    let p = match event {
        Event::Never => 0.0,
        Event::Partial(p) => model.partial_probability(setting, p)?,
        Event::AllEqual => sum_outcomes(
            model,
            setting,
            [Sign::Plus, Sign::Minus]
                .into_iter()
                .map(|s| OutcomeAssignment::uniform(n, s)),
        )?,
        Event::ExactlyOneMinus => sum_outcomes(
            model,
            setting,
            (0..n).map(|k| {
                let mut signs = vec![Sign::Plus; n];
                signs[k] = Sign::Minus;
                OutcomeAssignment::new(signs)
            }),
        )?,
        Event::SitesEqual(sites) if sites.is_empty() => 1.0,
        Event::SitesEqual(sites) => [Sign::Plus, Sign::Minus]
            .into_iter()
            .map(|s| {
                let p = sites
                    .iter()
                    .fold(PartialAssignment::free(n), |p, &i| p.with(i, s));
                model.partial_probability(setting, &p)
            })
            .sum::<Result<f64>>()?,
        Event::All(_) | Event::Predicate(_) => enumerate_event(model, setting, event)?,
    };
    Ok(p.clamp(0.0, 1.0))
}

fn enumerate_event<M: OutcomeModel + ?Sized>(
    model: &M,
    setting: &MeasurementSetting,
    event: &Event,
) -> Result<f64> {
    let n = model.modes();
    let dist = model.distribution(setting)?;
    Ok(dist
        .iter()
        .enumerate()
        .filter(|(mask, _)| event.contains(&OutcomeAssignment::from_mask(n, *mask as u64)))
        .map(|(_, p)| p)
        .sum())
}

/// `P(target ∩ condition) / P(condition)`.
pub fn conditional_probability<M: OutcomeModel + ?Sized>(
    model: &M,
    setting: &MeasurementSetting,
    target: &Event,
    condition: &Event,
) -> Result<f64> {
    let p_condition = event_probability(model, setting, condition)?;
    if p_condition <= CONDITION_EPSILON {
        return Err(Error::UndefinedConditional);
    }
    let joint = event_probability(model, setting, &target.clone().and(condition.clone()))?;
    Ok((joint / p_condition).min(1.0))
}
