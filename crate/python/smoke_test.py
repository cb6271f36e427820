"""Smoke test for the `wnl` extension module.

Build and install first:

    maturin build --release -m crates/python/Cargo.toml -o target/wheels
    pip install --force-reinstall target/wheels/wnl-*.whl
"""

import json
import math

import wnl


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol


def main():
    w = wnl.build_w_state(3)
    assert w.modes == 3
    assert close(sum(abs(a) ** 2 for a in w.amplitudes()), 1.0)
    assert close(w.probability("ZZZ", "-++"), 1 / 3)
    assert close(wnl.outcome_probability(w, "XXX", "---"), 0.375)
    assert close(sum(w.distribution("ZXX")), 1.0)
    assert close(wnl.analytic_w_probability(3, "ZXX", "+--"), w.probability("ZXX", "+--"))

    custom = wnl.PureState.from_amplitudes([0, 1 / math.sqrt(2), 1j / math.sqrt(2), 0])
    assert close(custom.probability("ZZ", "-+"), 0.5)

    omega = wnl.build_omega(3)
    assert len(omega) == 11
    assert omega.terms()[0] == (1, "ZZZ", "++-")
    assert close(omega.evaluate(w), 0.25)
    assert close(omega.evaluate_w(), 0.25)
    assert close(omega.strategy_value("++-", "+++"), 0.0)
    again = wnl.BellExpression.from_json(omega.to_json())
    assert again.terms() == omega.terms()

    for n in (3, 4, 20):
        expected = 1 - n / 2 ** (n - 1)
        assert close(wnl.omega_closed_form(n), expected)
        assert close(wnl.violation_probability(n), expected)
    assert round(wnl.violation_probability(20), 6) == 0.999962

    cert = wnl.enumerate_bound(omega)
    assert cert.max_value == 0.0
    assert cert.strategies_searched == 64
    assert any(z == "++-" and x == "+++" for _, z, x in cert.argmax)
    try:
        wnl.enumerate_bound(wnl.build_omega(30))
    except ValueError as e:
        assert "infeasible" in str(e)
    else:
        raise AssertionError("n = 30 should exceed the enumeration ceiling")

    hardy = wnl.hardy_check(5)
    assert hardy.implication_holds
    assert hardy.survivors == hardy.uniform_x_survivors

    assert close(wnl.critical_parameter(3, "white"), 5 / 7)
    assert close(wnl.critical_parameter(3, "loss"), 0.875)
    assert close(wnl.noisy_omega(3, "white", 5 / 7), 0.0)
    model = wnl.NoiseModel("loss", 0.9)
    assert close(omega.evaluate_w(model), wnl.noisy_omega(3, "loss", 0.9))

    est = wnl.estimate_omega(3, shots=100_000, seed=7)
    assert est.violation and est.lower > 0
    assert est.lower <= 0.25 <= est.upper
    assert sum(est.counts()["ZZZ"].values()) == 100_000
    same = wnl.estimate_omega(3, shots=100_000, seed=7)
    assert same.value == est.value
    noisy = wnl.estimate_omega(3, shots=100_000, seed=7, model=wnl.NoiseModel("white", 0.5))
    assert not noisy.violation

    print(json.dumps({
        "version": wnl.__version__,
        "omega_w_20": wnl.omega_closed_form(20),
        "estimate_n3": [est.value, est.lower, est.upper],
        "status": "ok",
    }))


if __name__ == "__main__":
    main()
