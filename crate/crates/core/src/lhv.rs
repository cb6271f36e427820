//! Local deterministic strategies and exhaustive classical bounds.
//!
//! A strategy fixes a `±1` answer for every (site, basis) pair. It is encoded
//! in `2n` bits: bits `0..n` hold the Z answers, bits `n..2n` the X answers,
//! and a set bit means `-1`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{check_len, Error, Result};
use crate::inequality::BellExpression;
use crate::measurement::{Basis, Event, MeasurementSetting, OutcomeAssignment, Sign};
use crate::state::{event_probability, PureState, WState, STATEVECTOR_MAX_MODES};

pub const DEFAULT_ENUMERATION_CEILING: usize = 12;
/// Hard limit imposed by the 64-bit strategy encoding.
pub const MAX_ENUMERATION_CEILING: usize = 31;
pub const DEFAULT_ARGMAX_LIMIT: usize = 1024;
/// Largest number of deterministic strategies mixed in one random trial.
pub const MIXTURE_SUPPORT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    z: Vec<Sign>,
    x: Vec<Sign>,
}

impl DeterministicStrategy {
    pub fn new(z: Vec<Sign>, x: Vec<Sign>) -> Result<Self> {
        check_len(z.len(), x.len())?;
        Ok(Self { z, x })
    }

    pub fn parse(z: &str, x: &str) -> Result<Self> {
        let z: OutcomeAssignment = z.parse()?;
        let x: OutcomeAssignment = x.parse()?;
        Self::new(z.signs().to_vec(), x.signs().to_vec())
    }

    pub fn decode(n: usize, code: u64) -> Result<Self> {
        if n > MAX_ENUMERATION_CEILING || (code >> (2 * n)) != 0 {
            return Err(Error::InvalidParameter(format!(
                "code {code} is not a {n}-site strategy encoding"
            )));
        }
        let z = OutcomeAssignment::from_mask(n, code & low_mask(n));
        let x = OutcomeAssignment::from_mask(n, code >> n);
        Ok(Self {
            z: z.signs().to_vec(),
            x: x.signs().to_vec(),
        })
    }

    pub fn encode(&self) -> u64 {
        let n = self.modes();
        debug_assert!(n <= MAX_ENUMERATION_CEILING);
        let z = OutcomeAssignment::new(self.z.clone()).mask();
        let x = OutcomeAssignment::new(self.x.clone()).mask();
        z | x << n
    }

    pub fn modes(&self) -> usize {
        self.z.len()
    }

    pub fn z_signs(&self) -> &[Sign] {
        &self.z
    }

    pub fn x_signs(&self) -> &[Sign] {
        &self.x
    }

    pub fn answer(&self, site: usize, basis: Basis) -> Sign {
        match basis {
            Basis::Z => self.z[site],
            Basis::X => self.x[site],
        }
    }

    /// Whether the predetermined answers reproduce `outcome` under `setting`.
    pub fn produces(&self, setting: &MeasurementSetting, outcome: &OutcomeAssignment) -> bool {
        setting
            .bases()
            .iter()
            .zip(outcome.signs())
            .enumerate()
            .all(|(site, (&b, &s))| self.answer(site, b) == s)
    }
}

impl Serialize for DeterministicStrategy {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("DeterministicStrategy", 3)?;
        st.serialize_field("encoding", &self.encode())?;
        st.serialize_field("z", &OutcomeAssignment::new(self.z.clone()).to_string())?;
        st.serialize_field("x", &OutcomeAssignment::new(self.x.clone()).to_string())?;
        st.end()
    }
}

fn low_mask(n: usize) -> u64 {
    (1u64 << n) - 1
}

/// Value of `expr` under one deterministic strategy, term by term.
pub fn evaluate_strategy(strategy: &DeterministicStrategy, expr: &BellExpression) -> Result<f64> {
    check_len(expr.modes(), strategy.modes())?;
    Ok(expr
        .terms()
        .iter()
        .filter(|t| strategy.produces(&t.setting, &t.outcome))
        .map(|t| t.weight())
        .sum())
}

/// A term reduced to bit masks over the strategy encoding.
#[derive(Debug, Clone, Copy)]
struct MaskTerm {
    z_care: u64,
    z_value: u64,
    x_care: u64,
    x_value: u64,
    weight: i64,
}

/// Bit-mask form of a Bell expression for the enumeration hot loop.
#[derive(Debug, Clone)]
pub struct CompiledExpression {
    n: usize,
    terms: Vec<MaskTerm>,
}

impl CompiledExpression {
    pub fn new(expr: &BellExpression) -> Result<Self> {
        let n = expr.modes();
        if n > MAX_ENUMERATION_CEILING {
            return Err(Error::EnumerationInfeasible {
                n,
                ceiling: MAX_ENUMERATION_CEILING,
            });
        }
        let terms = expr
            .terms()
            .iter()
            .map(|t| {
                let mut m = MaskTerm {
                    z_care: 0,
                    z_value: 0,
                    x_care: 0,
                    x_value: 0,
                    weight: i64::from(t.coefficient.value()),
                };
                for (site, (&b, &s)) in t.setting.bases().iter().zip(t.outcome.signs()).enumerate()
                {
                    let bit = 1u64 << site;
                    let minus = if s.is_minus() { bit } else { 0 };
                    match b {
                        Basis::Z => {
                            m.z_care |= bit;
                            m.z_value |= minus;
                        }
                        Basis::X => {
                            m.x_care |= bit;
                            m.x_value |= minus;
                        }
                    }
                }
                m
            })
            .collect();
        Ok(Self { n, terms })
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn evaluate(&self, code: u64) -> i64 {
        let z = code & low_mask(self.n);
        let x = code >> self.n;
        self.terms
            .iter()
            .filter(|t| x & t.x_care == t.x_value && z & t.z_care == t.z_value)
            .map(|t| t.weight)
            .sum()
    }

    /// Best value over every Z assignment for a fixed X assignment.
    fn best_for_x(&self, x: u64, limit: usize) -> ChunkBest {
        // Only terms whose X part already matches can contribute.
        let active: Vec<(u64, u64, i64)> = self
            .terms
            .iter()
            .filter(|t| x & t.x_care == t.x_value)
            .map(|t| (t.z_care, t.z_value, t.weight))
            .collect();
        let mut best = ChunkBest::empty();
        for z in 0..=low_mask(self.n) {
            let mut v = 0i64;
            for &(care, value, w) in &active {
                if z & care == value {
                    v += w;
                }
            }
            best.offer(v, z | x << self.n, limit);
        }
        best
    }
}

/// Running maximum with the lowest-encoded maximizers.
#[derive(Debug, Clone)]
struct ChunkBest {
    max: i64,
    count: u64,
    lowest: Vec<u64>,
}

impl ChunkBest {
    fn empty() -> Self {
        Self {
            max: i64::MIN,
            count: 0,
            lowest: Vec::new(),
        }
    }

    fn offer(&mut self, v: i64, code: u64, limit: usize) {
        if v > self.max {
            self.max = v;
            self.count = 1;
            self.lowest.clear();
            self.lowest.push(code);
        } else if v == self.max {
            self.count += 1;
            // Codes arrive in increasing order within a chunk.
            if self.lowest.len() < limit {
                self.lowest.push(code);
            }
        }
    }

    fn merge(self, other: Self, limit: usize) -> Self {
        match self.max.cmp(&other.max) {
            std::cmp::Ordering::Greater => self,
            std::cmp::Ordering::Less => other,
            std::cmp::Ordering::Equal => {
                let mut lowest = self.lowest;
                lowest.extend(other.lowest);
                lowest.sort_unstable();
                lowest.truncate(limit);
                Self {
                    max: self.max,
                    count: self.count + other.count,
                    lowest,
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub ceiling: usize,
    pub argmax_limit: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self {
            ceiling: DEFAULT_ENUMERATION_CEILING,
            argmax_limit: DEFAULT_ARGMAX_LIMIT,
        }
    }
}

impl EnumerationOptions {
    pub fn with_ceiling(ceiling: usize) -> Self {
        Self {
            ceiling,
            ..Self::default()
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        let ceiling = self.ceiling.min(MAX_ENUMERATION_CEILING);
        if n > ceiling {
            return Err(Error::EnumerationInfeasible { n, ceiling });
        }
        Ok(())
    }
}

/// Result of an exhaustive maximization over deterministic strategies.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCertificate {
    pub n: usize,
    pub max_value: f64,
    /// Maximizers with the lowest encodings, at most `argmax_limit` of them.
    pub argmax: Vec<DeterministicStrategy>,
    /// Total number of maximizing strategies.
    pub argmax_count: u64,
    pub strategies_searched: u64,
    pub exhaustive: bool,
    /// Seconds.
    pub wall_time: f64,
}

impl BoundCertificate {
    pub fn contains(&self, strategy: &DeterministicStrategy) -> bool {
        self.argmax.contains(strategy)
    }
}

pub fn enumerate_bound(expr: &BellExpression) -> Result<BoundCertificate> {
    enumerate_bound_with(expr, &EnumerationOptions::default())
}

/// Maximizes `expr` over all `4^n` deterministic strategies.
///
/// The X half of the encoding is split across workers; the reduction keeps the
/// maximum and the lowest maximizer encodings, so the certificate does not
/// depend on the worker count.
pub fn enumerate_bound_with(
    expr: &BellExpression,
    opts: &EnumerationOptions,
) -> Result<BoundCertificate> {
    let n = expr.modes();
    opts.check(n)?;
    let start = Instant::now();
    let compiled = CompiledExpression::new(expr)?;
    let limit = opts.argmax_limit.max(1);
    let best = (0..=low_mask(n))
        .into_par_iter()
        .map(|x| compiled.best_for_x(x, limit))
        .reduce(ChunkBest::empty, |a, b| a.merge(b, limit));
    let argmax = best
        .lowest
        .iter()
        .map(|&c| DeterministicStrategy::decode(n, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundCertificate {
        n,
        max_value: best.max as f64,
        argmax,
        argmax_count: best.count,
        strategies_searched: 1u64 << (2 * n),
        exhaustive: true,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Value of a convex mixture of deterministic strategies.
pub fn evaluate_mixture(
    expr: &BellExpression,
    mixture: &[(f64, DeterministicStrategy)],
) -> Result<f64> {
    if mixture.is_empty() {
        return Err(Error::InvalidParameter("empty mixture".into()));
    }
    let total: f64 = mixture.iter().map(|(w, _)| w).sum();
    if mixture.iter().any(|(w, _)| w.is_nan() || *w < 0.0) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "mixture weights must be non-negative and sum to 1 (sum = {total})"
        )));
    }
    mixture
        .iter()
        .map(|(w, s)| evaluate_strategy(s, expr).map(|v| w * v))
        .sum()
}

/// Largest value over `trials` random convex mixtures.
///
/// Each trial draws between 1 and [`MIXTURE_SUPPORT`] strategies uniformly and
/// weights them with a flat Dirichlet sample.
pub fn mixture_bound_check(expr: &BellExpression, trials: usize, seed: u64) -> Result<f64> {
    mixture_bound_check_with(expr, trials, seed, &EnumerationOptions::default())
}

pub fn mixture_bound_check_with(
    expr: &BellExpression,
    trials: usize,
    seed: u64,
    opts: &EnumerationOptions,
) -> Result<f64> {
    let n = expr.modes();
    opts.check(n)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let compiled = CompiledExpression::new(expr)?;
    let space = 1u64 << (2 * n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    let mut weights = Vec::with_capacity(MIXTURE_SUPPORT);
    for _ in 0..trials {
        let k = rng.random_range(1..=MIXTURE_SUPPORT);
        weights.clear();
        weights.extend((0..k).map(|_| rng.sample::<f64, _>(Exp1)));
        let total: f64 = weights.iter().sum();
        let value: f64 = weights
            .iter()
            .map(|w| {
                let code = rng.random_range(0..space);
                w / total * compiled.evaluate(code) as f64
            })
            .sum();
        best = best.max(value);
    }
    Ok(best)
}

/// Survivor statistics for one choice of the occupied site.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HardyWorld {
    pub photon_site: usize,
    pub survivors: u64,
    pub uniform_x_survivors: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HardyReport {
    pub n: usize,
    pub strategies_searched: u64,
    /// Strategies consistent with every quantum certainty.
    pub survivors: u64,
    /// Survivors whose X answers are all equal.
    pub uniform_x_survivors: u64,
    pub worlds: Vec<HardyWorld>,
    /// Survivors violating the implication (first few, if any).
    pub counterexamples: Vec<DeterministicStrategy>,
    /// Quantum probability that all-X outcomes are equal.
    pub quantum_all_equal: f64,
    /// `n / 2^(n−1)`.
    pub closed_form_all_equal: f64,
    pub implication_holds: bool,
}

/// Whether an encoded strategy respects the single-photon certainty (exactly
/// one Z answer is `-1`) and every pairwise X correlation certainty (for each
/// pair whose complement is all Z = `+1`, the pair's X answers agree).
pub fn satisfies_certainties(n: usize, code: u64) -> bool {
    let z = code & low_mask(n);
    let x = code >> n;
    if z.count_ones() != 1 {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            let pair = 1u64 << i | 1u64 << j;
            if z & !pair == 0 && (x >> i & 1) != (x >> j & 1) {
                return false;
            }
        }
    }
    true
}

pub fn hardy_implication_check(n: usize) -> Result<HardyReport> {
    hardy_implication_check_with(n, &EnumerationOptions::default())
}

const COUNTEREXAMPLE_LIMIT: usize = 16;

/// Enumerates every strategy, keeps those consistent with the quantum
/// certainties, and checks that each survivor answers X uniformly. The filter
/// runs in every "world" (choice of the occupied site) separately.
pub fn hardy_implication_check_with(n: usize, opts: &EnumerationOptions) -> Result<HardyReport> {
    if n < 3 {
        return Err(Error::InvalidModeCount { n, min: 3 });
    }
    opts.check(n)?;
    let uniform_x = |x: u64| x == 0 || x == low_mask(n);

    #[derive(Default)]
    struct Tally {
        survivors: Vec<u64>,
        uniform: Vec<u64>,
        counterexamples: Vec<u64>,
    }
    let tally = (0..=low_mask(n))
        .into_par_iter()
        .map(|x| {
            let mut t = Tally {
                survivors: vec![0; n],
                uniform: vec![0; n],
                counterexamples: Vec::new(),
            };
            for z in 0..=low_mask(n) {
                let code = z | x << n;
                if !satisfies_certainties(n, code) {
                    continue;
                }
                let site = z.trailing_zeros() as usize;
                t.survivors[site] += 1;
                if uniform_x(x) {
                    t.uniform[site] += 1;
                } else if t.counterexamples.len() < COUNTEREXAMPLE_LIMIT {
                    t.counterexamples.push(code);
                }
            }
            t
        })
        .reduce(
            || Tally {
                survivors: vec![0; n],
                uniform: vec![0; n],
                counterexamples: Vec::new(),
            },
            |mut a, b| {
                for k in 0..n {
                    a.survivors[k] += b.survivors[k];
                    a.uniform[k] += b.uniform[k];
                }
                a.counterexamples.extend(b.counterexamples);
                a.counterexamples.sort_unstable();
                a.counterexamples.truncate(COUNTEREXAMPLE_LIMIT);
                a
            },
        );

    let worlds: Vec<HardyWorld> = (0..n)
        .map(|k| HardyWorld {
            photon_site: k,
            survivors: tally.survivors[k],
            uniform_x_survivors: tally.uniform[k],
        })
        .collect();
    let survivors: u64 = tally.survivors.iter().sum();
    let uniform_x_survivors: u64 = tally.uniform.iter().sum();

    let all_x = MeasurementSetting::all_x(n);
    let quantum_all_equal = if n <= STATEVECTOR_MAX_MODES {
        event_probability(&PureState::w_state(n)?, &all_x, &Event::AllEqual)?
    } else {
        event_probability(&WState::new(n)?, &all_x, &Event::AllEqual)?
    };

    let implication_holds = worlds
        .iter()
        .all(|w| w.survivors > 0 && w.survivors == w.uniform_x_survivors);
    Ok(HardyReport {
        n,
        strategies_searched: 1u64 << (2 * n),
        survivors,
        uniform_x_survivors,
        worlds,
        counterexamples: tally
            .counterexamples
            .iter()
            .map(|&c| DeterministicStrategy::decode(n, c))
            .collect::<Result<Vec<_>>>()?,
        quantum_all_equal,
        closed_form_all_equal: crate::inequality::all_x_equal_probability(n),
        implication_holds,
    })
}
