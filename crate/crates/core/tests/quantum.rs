mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use num_complex::Complex64;
use wnl_core::measurement::Basis;
use wnl_core::state::ENUMERATION_MAX_SITES;
use wnl_core::{
    analytic_w_probability, build_vacuum, build_w_state, conditional_probability,
    event_probability, outcome_probability, Event, MeasurementSetting, OutcomeAssignment,
    OutcomeModel, PartialAssignment, PureState, Sign, WState,
};

fn setting(s: &str) -> MeasurementSetting {
    s.parse().unwrap()
}

fn outcome(s: &str) -> OutcomeAssignment {
    s.parse().unwrap()
}

#[test]
fn statevector_matches_kronecker_oracle() {
    for n in 1..=5 {
        let w = build_w_state(n).unwrap();
        let amps = common::w_amplitudes(n);
        for s in common::all_settings(n) {
            for o in common::all_outcomes(n) {
                let lib = outcome_probability(&w, &setting(&s), &outcome(&o)).unwrap();
                let oracle = common::pure_probability(&amps, &s, &o);
                assert!(
                    (lib - oracle).abs() < 1e-12,
                    "n={n} {s} {o}: {lib} vs {oracle}"
                );
            }
        }
    }
}

#[test]
fn oracle_frozen_values() {
    // Computed with the Kronecker oracle above.
    let amps = common::w_amplitudes(4);
    assert!((common::pure_probability(&amps, "XXXX", "++++") - 0.25).abs() < 1e-12);
    let amps = common::w_amplitudes(2);
    assert!(common::pure_probability(&amps, "XX", "+-").abs() < 1e-12);
    let amps = common::w_amplitudes(3);
    assert!((common::pure_probability(&amps, "XXX", "---") - 0.375).abs() < 1e-12);
}

#[test]
fn analytic_equals_statevector_exhaustive_small_n() {
    for n in 1..=6 {
        let w = build_w_state(n).unwrap();
        for s in common::all_settings(n) {
            let s = setting(&s);
            for o in common::all_outcomes(n) {
                let o = outcome(&o);
                let a = analytic_w_probability(n, &s, &o).unwrap();
                let b = outcome_probability(&w, &s, &o).unwrap();
                assert!((a - b).abs() < 1e-10, "n={n} {s} {o}");
            }
        }
    }
}

#[test]
fn analytic_equals_statevector_randomized() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for n in 7..=12 {
        let w = build_w_state(n).unwrap();
        for _ in 0..1000 {
            let s = MeasurementSetting::new(
                (0..n)
                    .map(|_| if rng.random() { Basis::X } else { Basis::Z })
                    .collect(),
            );
            let o = OutcomeAssignment::new((0..n).map(|_| Sign::from_bit(rng.random())).collect());
            let a = analytic_w_probability(n, &s, &o).unwrap();
            let b = outcome_probability(&w, &s, &o).unwrap();
            assert!((a - b).abs() < 1e-10, "n={n} {s} {o}");
        }
    }
}

#[test]
fn single_photon_support_under_all_z() {
    for n in 1..=8 {
        let w = build_w_state(n).unwrap();
        let z = MeasurementSetting::all_z(n);
        for m in 0..1u64 << n {
            let o = OutcomeAssignment::from_mask(n, m);
            let p = outcome_probability(&w, &z, &o).unwrap();
            if m.count_ones() != 1 {
                assert_eq!(p, 0.0);
            } else {
                assert!((p - 1.0 / n as f64).abs() < 1e-12);
            }
        }
    }
}

/// Setting with X on `i`, `k` and Z elsewhere, conditioned on every Z site `+1`.
fn pair_condition(n: usize, i: usize, k: usize) -> (MeasurementSetting, Event) {
    let mut bases = vec![Basis::Z; n];
    bases[i] = Basis::X;
    bases[k] = Basis::X;
    let cond = (0..n)
        .filter(|&s| s != i && s != k)
        .fold(PartialAssignment::free(n), |p, s| p.with(s, Sign::Plus));
    (MeasurementSetting::new(bases), Event::Partial(cond))
}

#[test]
fn hardy_chain_conditionals() {
    for n in 3..=12 {
        let w = build_w_state(n).unwrap();
        let analytic = WState::new(n).unwrap();
        for i in 0..n {
            for k in i + 1..n {
                let (s, cond) = pair_condition(n, i, k);
                let target = Event::sites_equal([i, k]);
                let c = conditional_probability(&w, &s, &target, &cond).unwrap();
                assert!((c - 1.0).abs() < 1e-12, "n={n} ({i},{k}): {c}");
                let c = conditional_probability(&analytic, &s, &target, &cond).unwrap();
                assert!((c - 1.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn anti_correlated_pairs_vanish() {
    for n in 2..=12 {
        let w = build_w_state(n).unwrap();
        for i in 0..n {
            for k in i + 1..n {
                let (s, _) = pair_condition(n, i, k);
                for first in [Sign::Plus, Sign::Minus] {
                    let mut signs = vec![Sign::Plus; n];
                    signs[i] = first;
                    signs[k] = first.flip();
                    let p = outcome_probability(&w, &s, &OutcomeAssignment::new(signs)).unwrap();
                    assert!(p.abs() < 1e-12);
                }
            }
        }
    }
    // Also for large n via the closed form.
    let n = 200;
    let (s, _) = pair_condition(n, 3, 150);
    let mut signs = vec![Sign::Plus; n];
    signs[150] = Sign::Minus;
    assert_eq!(
        analytic_w_probability(n, &s, &OutcomeAssignment::new(signs)).unwrap(),
        0.0
    );
}

#[test]
fn all_x_equal_event() {
    for n in 2..=14 {
        let p = event_probability(
            &build_w_state(n).unwrap(),
            &MeasurementSetting::all_x(n),
            &Event::AllEqual,
        )
        .unwrap();
        assert!((p - n as f64 / 2f64.powi(n as i32 - 1)).abs() < 1e-12);
    }
    let p = event_probability(
        &WState::new(40).unwrap(),
        &MeasurementSetting::all_x(40),
        &Event::AllEqual,
    )
    .unwrap();
    assert!((p - 40.0 / 2f64.powi(39)).abs() < 1e-20);
}

#[test]
fn vacuum_events() {
    let v = build_vacuum(3).unwrap();
    assert_eq!(
        event_probability(&v, &setting("ZZZ"), &Event::ExactlyOneMinus).unwrap(),
        0.0
    );
    let p = event_probability(&v, &setting("XXX"), &Event::AllEqual).unwrap();
    assert!((p - 0.25).abs() < 1e-12);
}

#[test]
fn large_analytic_partial() {
    // Exceeds the enumeration limit, so only the closed form can answer.
    let n = ENUMERATION_MAX_SITES + 10;
    let w = WState::new(n).unwrap();
    let s = MeasurementSetting::all_z(n);
    let p = w
        .partial_probability(&s, &PartialAssignment::free(n).with(0, Sign::Minus))
        .unwrap();
    assert!((p - 1.0 / n as f64).abs() < 1e-15);
}

fn arb_state() -> impl Strategy<Value = PureState> {
    (1usize..=6).prop_flat_map(|n| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map(
            "nonzero",
            |raw| {
                let norm: f64 = raw.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
                (norm > 1e-3).then(|| {
                    PureState::from_amplitudes(
                        raw.iter()
                            .map(|(a, b)| Complex64::new(a / norm, b / norm))
                            .collect(),
                    )
                    .unwrap()
                })
            },
        )
    })
}

proptest! {
    #[test]
    fn normalization(state in arb_state(), bits in any::<u64>()) {
        let n = state.modes();
        let s = MeasurementSetting::new(
            (0..n).map(|i| if bits >> i & 1 == 1 { Basis::X } else { Basis::Z }).collect(),
        );
        let total: f64 = (0..1u64 << n)
            .map(|m| state.outcome_probability(&s, &OutcomeAssignment::from_mask(n, m)).unwrap())
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let dist: f64 = state.distribution(&s).unwrap().iter().sum();
        prop_assert!((dist - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_state_matches_oracle(state in arb_state(), bits in any::<u64>(), out in any::<u64>()) {
        let n = state.modes();
        let s: String = (0..n).map(|i| if bits >> i & 1 == 1 { 'X' } else { 'Z' }).collect();
        let o = OutcomeAssignment::from_mask(n, out & ((1 << n) - 1));
        let lib = state.outcome_probability(&setting(&s), &o).unwrap();
        let oracle = common::pure_probability(state.amplitudes(), &s, &o.to_string());
        prop_assert!((lib - oracle).abs() < 1e-12);
    }

    #[test]
    fn partial_marginals_agree(state in arb_state(), bits in any::<u64>(), fixed in any::<u64>(), vals in any::<u64>()) {
        // Kernel path against the trait's free-site enumeration.
        struct ByOutcome<'a>(&'a PureState);
        impl OutcomeModel for ByOutcome<'_> {
            fn modes(&self) -> usize { self.0.modes() }
            fn outcome_probability(&self, s: &MeasurementSetting, o: &OutcomeAssignment) -> wnl_core::Result<f64> {
                self.0.outcome_probability(s, o)
            }
        }
        let n = state.modes();
        let s = MeasurementSetting::new(
            (0..n).map(|i| if bits >> i & 1 == 1 { Basis::X } else { Basis::Z }).collect(),
        );
        let p = PartialAssignment::new(
            (0..n).map(|i| (fixed >> i & 1 == 1).then(|| Sign::from_bit(vals >> i & 1 == 1))).collect(),
        );
        let a = state.partial_probability(&s, &p).unwrap();
        let b = ByOutcome(&state).partial_probability(&s, &p).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn analytic_partial_matches_statevector(n in 1usize..=8, bits in any::<u64>(), fixed in any::<u64>(), vals in any::<u64>()) {
        let s = MeasurementSetting::new(
            (0..n).map(|i| if bits >> i & 1 == 1 { Basis::X } else { Basis::Z }).collect(),
        );
        let p = PartialAssignment::new(
            (0..n).map(|i| (fixed >> i & 1 == 1).then(|| Sign::from_bit(vals >> i & 1 == 1))).collect(),
        );
        let a = WState::new(n).unwrap().partial_probability(&s, &p).unwrap();
        let b = build_w_state(n).unwrap().partial_probability(&s, &p).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }
}
