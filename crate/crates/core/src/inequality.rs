//! The single-photon W-state Bell expression family as explicit term lists.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::measurement::{Basis, MeasurementSetting, OutcomeAssignment, Sign};
use crate::state::OutcomeModel;

/// One signed joint-outcome probability.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTerm", into = "RawTerm")]
pub struct BellTerm {
    pub coefficient: Sign,
    pub setting: MeasurementSetting,
    pub outcome: OutcomeAssignment,
}

/// Wire form: `{"sign": ±1, "bases": "ZXX", "signs": "++-"}`.
#[derive(Serialize, Deserialize)]
struct RawTerm {
    sign: i8,
    bases: MeasurementSetting,
    signs: OutcomeAssignment,
}

impl TryFrom<RawTerm> for BellTerm {
    type Error = Error;

    fn try_from(raw: RawTerm) -> Result<Self> {
        BellTerm::new(Sign::from_i8(raw.sign)?, raw.bases, raw.signs)
    }
}

impl From<BellTerm> for RawTerm {
    fn from(t: BellTerm) -> Self {
        RawTerm {
            sign: t.coefficient.value(),
            bases: t.setting,
            signs: t.outcome,
        }
    }
}

impl BellTerm {
    pub fn new(
        coefficient: Sign,
        setting: MeasurementSetting,
        outcome: OutcomeAssignment,
    ) -> Result<Self> {
        check_len(setting.len(), outcome.len())?;
        Ok(Self {
            coefficient,
            setting,
            outcome,
        })
    }

    pub fn weight(&self) -> f64 {
        f64::from(self.coefficient.value())
    }
}

/// A signed sum of joint-outcome probabilities with its claimed local bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawExpression")]
pub struct BellExpression {
    n: usize,
    terms: Vec<BellTerm>,
    classical_bound: f64,
}

#[derive(Deserialize)]
struct RawExpression {
    n: usize,
    terms: Vec<BellTerm>,
    classical_bound: f64,
}

impl TryFrom<RawExpression> for BellExpression {
    type Error = Error;

    fn try_from(raw: RawExpression) -> Result<Self> {
        BellExpression::new(raw.n, raw.terms, raw.classical_bound)
    }
}

impl BellExpression {
    pub fn new(n: usize, terms: Vec<BellTerm>, classical_bound: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModeCount { n, min: 1 });
        }
        for t in &terms {
            check_len(n, t.setting.len())?;
        }
        Ok(Self {
            n,
            terms,
            classical_bound,
        })
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[BellTerm] {
        &self.terms
    }

    /// Claimed local bound. Certified independently by [`crate::lhv`].
    pub fn classical_bound(&self) -> f64 {
        self.classical_bound
    }

    pub fn positive_terms(&self) -> usize {
        self.terms
            .iter()
            .filter(|t| t.coefficient == Sign::Plus)
            .count()
    }

    pub fn negative_terms(&self) -> usize {
        self.terms.len() - self.positive_terms()
    }

    /// Distinct settings in first-appearance order.
    pub fn settings(&self) -> Vec<MeasurementSetting> {
        let mut seen = Vec::new();
        for t in &self.terms {
            if !seen.contains(&t.setting) {
                seen.push(t.setting.clone());
            }
        }
        seen
    }
}

pub fn omega_term_count(n: usize) -> usize {
    n + n * (n - 1) + 2
}

/// Builds Ω(n). For `n = 3` the terms coincide, in order, with the
/// three-site inequality β.
///
/// Order: the `n` single-photon Z terms (photon on the last site first), then
/// for each unordered pair `(i, j)` the two anti-correlated X outcomes with all
/// other sites in Z at `+1`, then the two uniform all-X outcomes.
pub fn build_omega(n: usize) -> Result<BellExpression> {
    if n < 3 {
        return Err(Error::InvalidModeCount { n, min: 3 });
    }
    let mut terms = Vec::with_capacity(omega_term_count(n));

    let all_z = MeasurementSetting::all_z(n);
    for k in (0..n).rev() {
        let mut signs = vec![Sign::Plus; n];
        signs[k] = Sign::Minus;
        terms.push(BellTerm::new(
            Sign::Plus,
            all_z.clone(),
            OutcomeAssignment::new(signs),
        )?);
    }

    for i in (0..n - 1).rev() {
        for j in (i + 1..n).rev() {
            let mut bases = vec![Basis::Z; n];
            bases[i] = Basis::X;
            bases[j] = Basis::X;
            let setting = MeasurementSetting::new(bases);
            for first in [Sign::Plus, Sign::Minus] {
                let mut signs = vec![Sign::Plus; n];
                signs[i] = first;
                signs[j] = first.flip();
                terms.push(BellTerm::new(
                    Sign::Minus,
                    setting.clone(),
                    OutcomeAssignment::new(signs),
                )?);
            }
        }
    }

    let all_x = MeasurementSetting::all_x(n);
    for s in [Sign::Plus, Sign::Minus] {
        terms.push(BellTerm::new(
            Sign::Minus,
            all_x.clone(),
            OutcomeAssignment::uniform(n, s),
        )?);
    }

    debug_assert_eq!(terms.len(), omega_term_count(n));
    BellExpression::new(n, terms, 0.0)
}

/// `Σ coefficient · P(outcome | setting)` under `model`.
pub fn evaluate_on_state<M: OutcomeModel + ?Sized>(
    expr: &BellExpression,
    model: &M,
) -> Result<f64> {
    check_len(expr.modes(), model.modes())?;
    term_probabilities(expr, model).map(|ps| {
        ps.iter()
            .zip(expr.terms())
            .map(|(p, t)| t.weight() * p)
            .sum()
    })
}

/// Unsigned probability of every term, in term order.
pub fn term_probabilities<M: OutcomeModel + ?Sized>(
    expr: &BellExpression,
    model: &M,
) -> Result<Vec<f64>> {
    check_len(expr.modes(), model.modes())?;
    expr.terms()
        .iter()
        .map(|t| model.outcome_probability(&t.setting, &t.outcome))
        .collect()
}

/// `1 − n/2^(n−1)`: the W-state value of Ω(n).
pub fn omega_closed_form(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidModeCount { n, min: 3 });
    }
    Ok(one_minus_n_over_half_power(n))
}

/// Probability that all-X outcomes on the W state are not all equal.
pub fn violation_probability(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidModeCount { n, min: 2 });
    }
    Ok(one_minus_n_over_half_power(n))
}

/// `n / 2^(n−1)`: the W-state probability of uniform all-X outcomes.
pub fn all_x_equal_probability(n: usize) -> f64 {
    n as f64 * 0.5f64.powi(n as i32 - 1)
}

fn one_minus_n_over_half_power(n: usize) -> f64 {
    1.0 - all_x_equal_probability(n)
}
