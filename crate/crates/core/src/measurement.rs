//! Per-site measurement bases, outcome signs and events over outcomes.
//!
//! Sites are indexed from 0 in code. In the string forms (`"ZXX"`, `"++-"`)
//! the first character is site 0, which is also the lowest-order bit of the
//! occupation bitstring and of outcome masks.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Local Pauli basis measured on one site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    /// Photon number: `+1` empty, `-1` occupied.
    Z,
    /// Superposition basis `|±⟩ = (|0⟩ ± |1⟩)/√2`.
    X,
}

impl Basis {
    pub fn as_char(self) -> char {
        match self {
            Basis::Z => 'Z',
            Basis::X => 'X',
        }
    }
}

/// A `±1` measurement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_bit(minus: bool) -> Self {
        if minus {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn from_i8(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(Error::Parse(format!("sign must be +1 or -1, got {other}"))),
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            _ => None,
        }
    }
}

/// Basis choice for every site.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct MeasurementSetting {
    bases: Vec<Basis>,
}

impl MeasurementSetting {
    pub fn new(bases: Vec<Basis>) -> Self {
        Self { bases }
    }

    pub fn uniform(n: usize, basis: Basis) -> Self {
        Self::new(vec![basis; n])
    }

    pub fn all_z(n: usize) -> Self {
        Self::uniform(n, Basis::Z)
    }

    pub fn all_x(n: usize) -> Self {
        Self::uniform(n, Basis::X)
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    pub fn basis(&self, site: usize) -> Basis {
        self.bases[site]
    }

    /// Sites measured in `X`.
    pub fn x_sites(&self) -> impl Iterator<Item = usize> + '_ {
        self.bases
            .iter()
            .enumerate()
            .filter(|(_, b)| **b == Basis::X)
            .map(|(i, _)| i)
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bases {
            write!(f, "{}", b.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for MeasurementSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c.to_ascii_uppercase() {
                'Z' => Ok(Basis::Z),
                'X' => Ok(Basis::X),
                other => Err(Error::Parse(format!("unknown basis '{other}' in \"{s}\""))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

impl TryFrom<String> for MeasurementSetting {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MeasurementSetting> for String {
    fn from(s: MeasurementSetting) -> Self {
        s.to_string()
    }
}

/// A full outcome: one sign per site.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct OutcomeAssignment {
    signs: Vec<Sign>,
}

impl OutcomeAssignment {
    pub fn new(signs: Vec<Sign>) -> Self {
        Self { signs }
    }

    pub fn uniform(n: usize, sign: Sign) -> Self {
        Self::new(vec![sign; n])
    }

    /// Builds an outcome from a mask where bit `i` set means site `i` is `-1`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self::new((0..n).map(|i| Sign::from_bit(mask >> i & 1 == 1)).collect())
    }

    /// Inverse of [`OutcomeAssignment::from_mask`]. Only meaningful for `n <= 64`.
    pub fn mask(&self) -> u64 {
        self.signs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_minus())
            .fold(0u64, |m, (i, _)| m | 1 << i)
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn sign(&self, site: usize) -> Sign {
        self.signs[site]
    }

    pub fn minus_count(&self) -> usize {
        self.signs.iter().filter(|s| s.is_minus()).count()
    }
}

impl fmt::Display for OutcomeAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.signs {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for OutcomeAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| {
                Sign::from_char(c)
                    .ok_or_else(|| Error::Parse(format!("unknown sign '{c}' in \"{s}\"")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

impl TryFrom<String> for OutcomeAssignment {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<OutcomeAssignment> for String {
    fn from(o: OutcomeAssignment) -> Self {
        o.to_string()
    }
}

/// Signs fixed on a subset of sites; `None` marks a free site.
///
/// String form uses `.` for free sites, e.g. `"+.-"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialAssignment {
    signs: Vec<Option<Sign>>,
}

impl PartialAssignment {
    pub fn new(signs: Vec<Option<Sign>>) -> Self {
        Self { signs }
    }

    pub fn free(n: usize) -> Self {
        Self::new(vec![None; n])
    }

    /// Fixes `site` to `sign`, builder style.
    pub fn with(mut self, site: usize, sign: Sign) -> Self {
        self.signs[site] = Some(sign);
        self
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[Option<Sign>] {
        &self.signs
    }

    pub fn fixed_sites(&self) -> impl Iterator<Item = (usize, Sign)> + '_ {
        self.signs
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.map(|s| (i, s)))
    }

    pub fn free_sites(&self) -> impl Iterator<Item = usize> + '_ {
        self.signs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_none())
            .map(|(i, _)| i)
    }

    pub fn matches(&self, outcome: &OutcomeAssignment) -> bool {
        self.fixed_sites().all(|(i, s)| outcome.sign(i) == s)
    }

    /// Intersection of two partial assignments; `None` if they conflict.
    pub fn merge(&self, other: &Self) -> Option<Self> {
        if self.len() != other.len() {
            return None;
        }
        self.signs
            .iter()
            .zip(&other.signs)
            .map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) if a != b => Err(()),
                (Some(a), _) => Ok(Some(*a)),
                (None, b) => Ok(*b),
            })
            .collect::<std::result::Result<Vec<_>, ()>>()
            .ok()
            .map(Self::new)
    }
}

impl From<&OutcomeAssignment> for PartialAssignment {
    fn from(o: &OutcomeAssignment) -> Self {
        Self::new(o.signs().iter().copied().map(Some).collect())
    }
}

impl fmt::Display for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.signs {
            write!(f, "{}", s.map_or('.', Sign::as_char))?;
        }
        Ok(())
    }
}

impl FromStr for PartialAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '.' | '?' | '*' => Ok(None),
                c => Sign::from_char(c)
                    .map(Some)
                    .ok_or_else(|| Error::Parse(format!("unknown sign '{c}' in \"{s}\""))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

pub type OutcomePredicate = Arc<dyn Fn(&OutcomeAssignment) -> bool + Send + Sync>;

/// A set of full outcome assignments.
#[derive(Clone)]
pub enum Event {
    /// Outcomes agreeing with the fixed sites.
    Partial(PartialAssignment),
    /// All listed sites carry the same sign.
    SitesEqual(Vec<usize>),
    /// Every site carries the same sign.
    AllEqual,
    /// Exactly one site carries `-1`.
    ExactlyOneMinus,
    /// Arbitrary membership test, evaluated by enumeration.
    Predicate(OutcomePredicate),
    /// Intersection of events.
    All(Vec<Event>),
    /// The empty event.
    Never,
}

impl Event {
    pub fn partial(p: PartialAssignment) -> Self {
        Event::Partial(p)
    }

    pub fn outcome(o: &OutcomeAssignment) -> Self {
        Event::Partial(o.into())
    }

    pub fn sites_equal(sites: impl IntoIterator<Item = usize>) -> Self {
        Event::SitesEqual(sites.into_iter().collect())
    }

    pub fn predicate(f: impl Fn(&OutcomeAssignment) -> bool + Send + Sync + 'static) -> Self {
        Event::Predicate(Arc::new(f))
    }

    /// Intersection, folding pairs of partial assignments together.
    pub fn and(self, other: Event) -> Event {
        match (self, other) {
            (Event::Never, _) | (_, Event::Never) => Event::Never,
            (Event::Partial(a), Event::Partial(b)) => match a.merge(&b) {
                Some(m) => Event::Partial(m),
                None => Event::Never,
            },
            (Event::All(mut a), Event::All(b)) => {
                a.extend(b);
                Event::All(a)
            }
            (Event::All(mut a), e) | (e, Event::All(mut a)) => {
                a.push(e);
                Event::All(a)
            }
            (a, b) => Event::All(vec![a, b]),
        }
    }

    pub fn contains(&self, outcome: &OutcomeAssignment) -> bool {
        match self {
            Event::Partial(p) => p.matches(outcome),
            Event::SitesEqual(sites) => match sites.split_first() {
                None => true,
                Some((first, rest)) => {
                    let s = outcome.sign(*first);
                    rest.iter().all(|&i| outcome.sign(i) == s)
                }
            },
            Event::AllEqual => outcome.signs().windows(2).all(|w| w[0] == w[1]),
            Event::ExactlyOneMinus => outcome.minus_count() == 1,
            Event::Predicate(f) => f(outcome),
            Event::All(events) => events.iter().all(|e| e.contains(outcome)),
            Event::Never => false,
        }
    }

    /// Checks that the event refers only to sites that exist in an `n`-site system.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            Event::Partial(p) => check_len(n, p.len()),
            Event::SitesEqual(sites) => match sites.iter().find(|&&i| i >= n) {
                Some(&i) => Err(Error::DimensionMismatch {
                    expected: n,
                    found: i + 1,
                }),
                None => Ok(()),
            },
            Event::All(events) => events.iter().try_for_each(|e| e.validate(n)),
            _ => Ok(()),
        }
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Partial(p) => write!(f, "Partial({p})"),
            Event::SitesEqual(s) => f.debug_tuple("SitesEqual").field(s).finish(),
            Event::AllEqual => write!(f, "AllEqual"),
            Event::ExactlyOneMinus => write!(f, "ExactlyOneMinus"),
            Event::Predicate(_) => write!(f, "Predicate(..)"),
            Event::All(e) => f.debug_tuple("All").field(e).finish(),
            Event::Never => write!(f, "Never"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_forms_round_trip() {
        let s: MeasurementSetting = "ZXx".parse().unwrap();
        assert_eq!(s.bases(), &[Basis::Z, Basis::X, Basis::X]);
        assert_eq!(s.to_string(), "ZXX");
        let o: OutcomeAssignment = "+-+".parse().unwrap();
        assert_eq!(o.to_string(), "+-+");
        assert!("+0".parse::<OutcomeAssignment>().is_err());
        assert!("ZY".parse::<MeasurementSetting>().is_err());
    }

    #[test]
    fn mask_follows_site_order() {
        let o: OutcomeAssignment = "+-+-".parse().unwrap();
        assert_eq!(o.mask(), 0b1010);
        assert_eq!(OutcomeAssignment::from_mask(4, 0b1010), o);
    }

    #[test]
    fn partial_merge_detects_conflict() {
        let a: PartialAssignment = "+..".parse().unwrap();
        let b: PartialAssignment = ".-.".parse().unwrap();
        let c: PartialAssignment = "-..".parse().unwrap();
        assert_eq!(a.merge(&b).unwrap().to_string(), "+-.");
        assert!(a.merge(&c).is_none());
        assert!(matches!(
            Event::Partial(a).and(Event::Partial(c)),
            Event::Never
        ));
    }

    #[test]
    fn named_predicates() {
        let o: OutcomeAssignment = "++-".parse().unwrap();
        assert!(Event::ExactlyOneMinus.contains(&o));
        assert!(!Event::AllEqual.contains(&o));
        assert!(Event::sites_equal([0, 1]).contains(&o));
        assert!(!Event::sites_equal([1, 2]).contains(&o));
        let both = Event::ExactlyOneMinus.and(Event::sites_equal([0, 2]));
        assert!(!both.contains(&o));
    }

    #[test]
    fn event_validation() {
        assert!(Event::sites_equal([0, 3]).validate(3).is_err());
        assert!(Event::Partial("+.".parse().unwrap()).validate(3).is_err());
        assert!(Event::AllEqual.validate(3).is_ok());
    }
}
