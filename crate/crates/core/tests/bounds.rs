use proptest::prelude::*;
use rayon::ThreadPoolBuilder;

use wnl_core::inequality::{all_x_equal_probability, term_probabilities};
use wnl_core::lhv::{
    evaluate_mixture, mixture_bound_check, satisfies_certainties, CompiledExpression,
};
use wnl_core::{
    build_omega, build_w_state, enumerate_bound, enumerate_bound_with, evaluate_on_state,
    evaluate_strategy, hardy_implication_check, omega_closed_form, violation_probability,
    DeterministicStrategy, EnumerationOptions, Error, WState,
};

#[test]
fn omega_consistency_statevector_and_analytic() {
    for n in 3..=16 {
        let e = build_omega(n).unwrap();
        let sv = evaluate_on_state(&e, &build_w_state(n).unwrap()).unwrap();
        let an = evaluate_on_state(&e, &WState::new(n).unwrap()).unwrap();
        let cf = omega_closed_form(n).unwrap();
        assert!((sv - cf).abs() < 1e-10, "n={n}");
        assert!((an - cf).abs() < 1e-10, "n={n}");
    }
    for n in [30, 64, 100] {
        let an = evaluate_on_state(&build_omega(n).unwrap(), &WState::new(n).unwrap()).unwrap();
        assert!((an - omega_closed_form(n).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn violation_probability_equals_omega() {
    for n in 3..60 {
        assert_eq!(
            violation_probability(n).unwrap(),
            omega_closed_form(n).unwrap()
        );
    }
}

#[test]
fn omega_monotone_towards_one() {
    let values: Vec<f64> = (3..60).map(|n| omega_closed_form(n).unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] > w[0] || w[1] == 1.0));
    assert!(values.iter().all(|&v| v <= 1.0));
    assert!(1.0 - omega_closed_form(60).unwrap() < 1e-15);
    assert!(values[..20].windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn gap_structure() {
    for n in 3..=14 {
        let e = build_omega(n).unwrap();
        let probs = term_probabilities(&e, &build_w_state(n).unwrap()).unwrap();
        let positive: f64 = probs[..n].iter().sum();
        let all_x: f64 = probs[probs.len() - 2..].iter().sum();
        assert!((positive - 1.0).abs() < 1e-12);
        assert!((all_x - all_x_equal_probability(n)).abs() < 1e-12);
    }
}

#[test]
fn certified_bound_is_zero() {
    for n in 3..=9 {
        let cert = enumerate_bound(&build_omega(n).unwrap()).unwrap();
        assert_eq!(cert.max_value, 0.0, "n={n}");
        assert_eq!(cert.strategies_searched, 4u64.pow(n as u32));
        assert!(cert.argmax_count > 0);
    }
}

#[test]
fn certified_bound_is_zero_up_to_default_ceiling() {
    for n in 10..=12 {
        let cert = enumerate_bound(&build_omega(n).unwrap()).unwrap();
        assert_eq!(cert.max_value, 0.0, "n={n}");
    }
}

#[test]
fn hardy_implication_holds_up_to_default_ceiling() {
    for n in 10..=12 {
        let r = hardy_implication_check(n).unwrap();
        assert!(r.implication_holds, "n={n}");
        assert_eq!(r.survivors, 2 * n as u64);
    }
}

#[test]
fn argmax_is_sound() {
    for n in 3..=6 {
        let e = build_omega(n).unwrap();
        let cert = enumerate_bound(&e).unwrap();
        for s in &cert.argmax {
            assert_eq!(evaluate_strategy(s, &e).unwrap(), cert.max_value);
        }
    }
}

#[test]
fn four_site_bound() {
    let cert = enumerate_bound(&build_omega(4).unwrap()).unwrap();
    assert_eq!(cert.max_value, 0.0);
    assert_eq!(cert.strategies_searched, 256);
}

#[test]
fn certificate_independent_of_worker_count() {
    let e = build_omega(7).unwrap();
    let run = |threads| {
        ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| enumerate_bound(&e).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a.max_value, b.max_value);
    assert_eq!(a.argmax, b.argmax);
    assert_eq!(a.argmax_count, b.argmax_count);
}

#[test]
fn infeasible_enumeration() {
    let e = build_omega(13).unwrap();
    assert_eq!(
        enumerate_bound(&e).unwrap_err(),
        Error::EnumerationInfeasible { n: 13, ceiling: 12 }
    );
    assert!(matches!(
        enumerate_bound_with(
            &build_omega(32).unwrap(),
            &EnumerationOptions::with_ceiling(40)
        ),
        Err(Error::EnumerationInfeasible { .. })
    ));
}

#[test]
fn mixtures_never_exceed_vertex_max() {
    for n in 3..=5 {
        let e = build_omega(n).unwrap();
        let cert = enumerate_bound(&e).unwrap();
        let best = mixture_bound_check(&e, 10_000, n as u64).unwrap();
        assert!(best <= cert.max_value + 1e-12, "n={n}: {best}");
    }
}

#[test]
fn mixture_matches_behavior_level_evaluation() {
    // Build the mixed behavior P(outcome|setting) explicitly and evaluate the
    // expression on it, instead of averaging strategy values.
    let e = build_omega(3).unwrap();
    let mix: Vec<(f64, DeterministicStrategy)> = [(0.5, 4u64), (0.3, 17), (0.2, 63)]
        .into_iter()
        .map(|(w, c)| (w, DeterministicStrategy::decode(3, c).unwrap()))
        .collect();
    let behavior: f64 = e
        .terms()
        .iter()
        .map(|t| {
            let p: f64 = mix
                .iter()
                .filter(|(_, s)| s.produces(&t.setting, &t.outcome))
                .map(|(w, _)| w)
                .sum();
            t.weight() * p
        })
        .sum();
    assert!((evaluate_mixture(&e, &mix).unwrap() - behavior).abs() < 1e-12);
}

#[test]
fn hardy_implication_holds() {
    for n in 3..=9 {
        let r = hardy_implication_check(n).unwrap();
        assert!(r.implication_holds, "n={n}");
        assert!(r.counterexamples.is_empty());
        assert_eq!(r.survivors, 2 * n as u64);
        assert_eq!(r.strategies_searched, 4u64.pow(n as u32));
        for w in &r.worlds {
            assert_eq!(w.survivors, 2);
            assert_eq!(w.uniform_x_survivors, 2);
        }
        assert!((r.quantum_all_equal - n as f64 / 2f64.powi(n as i32 - 1)).abs() < 1e-12);
    }
}

#[test]
fn encoding_is_a_bijection() {
    for n in 1..=5usize {
        let mut seen = vec![false; 1 << (2 * n)];
        for code in 0..1u64 << (2 * n) {
            let s = DeterministicStrategy::decode(n, code).unwrap();
            assert_eq!(s.encode(), code);
            let key = s.encode() as usize;
            assert!(!seen[key]);
            seen[key] = true;
        }
    }
}

#[test]
fn certainty_filter_excludes_double_occupancy() {
    let s = DeterministicStrategy::parse("-+-+", "++++").unwrap();
    assert!(!satisfies_certainties(4, s.encode()));
    let s = DeterministicStrategy::parse("++++", "++++").unwrap();
    assert!(!satisfies_certainties(4, s.encode()));
    let s = DeterministicStrategy::parse("+-++", "----").unwrap();
    assert!(satisfies_certainties(4, s.encode()));
    let s = DeterministicStrategy::parse("+-++", "--+-").unwrap();
    assert!(!satisfies_certainties(4, s.encode()));
}

proptest! {
    #[test]
    fn compiled_matches_direct(n in 3usize..=8, raw in any::<u64>()) {
        let e = build_omega(n).unwrap();
        let code = raw & ((1u64 << (2 * n)) - 1);
        let compiled = CompiledExpression::new(&e).unwrap();
        let direct = evaluate_strategy(&DeterministicStrategy::decode(n, code).unwrap(), &e).unwrap();
        prop_assert_eq!(compiled.evaluate(code) as f64, direct);
        prop_assert!(direct <= 0.0);
    }

    #[test]
    fn strategy_values_are_bounded(n in 3usize..=8, raw in any::<u64>()) {
        let e = build_omega(n).unwrap();
        let code = raw & ((1u64 << (2 * n)) - 1);
        let v = evaluate_strategy(&DeterministicStrategy::decode(n, code).unwrap(), &e).unwrap();
        prop_assert!(v >= -(e.negative_terms() as f64) && v <= e.positive_terms() as f64);
    }
}
