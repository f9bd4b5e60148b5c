import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ptlms.afcore import (
    COMPLEXITY_ALGORITHMS,
    FilterState,
    GainPolicy,
    complexity_report,
    compute_gains,
    eval_F,
    filter_output,
    format_complexity_tables,
    step_delayed,
    step_nlms,
    step_plms,
    step_pnlms,
)

weights = arrays(np.float64, st.integers(2, 64).map(lambda n: (n,)),
                 elements=st.floats(-2, 2, allow_nan=False))


def test_gain_policy_validation():
    with pytest.raises(ValueError):
        GainPolicy("cubic")
    with pytest.raises(ValueError):
        GainPolicy(rho=0)
    with pytest.raises(ValueError):
        GainPolicy("mulaw_ln", xi=-1)
    with pytest.raises(ValueError):
        GainPolicy("mulaw_log2", k=0)


def test_hand_evaluated_gains():
    g = compute_gains([0.3, 0.1], GainPolicy("prop_abs", rho=0.01))
    np.testing.assert_allclose(g, [0.31 / 0.42, 0.11 / 0.42])
    assert np.round(g, 4).tolist() == [0.7381, 0.2619]


def test_zero_weights_give_uniform_gains():
    for kind in ("prop_abs", "mulaw_ln", "mulaw_log2", "identity"):
        g = compute_gains(np.zeros(16), GainPolicy(kind, rho=0.37))
        np.testing.assert_allclose(g, 1 / 16)


def test_mulaw_log2_values():
    p = GainPolicy("mulaw_log2", k=6)
    np.testing.assert_allclose(eval_F([0.0, 1 / 64, -3 / 64], p), [0.0, 1.0, 2.0])


def test_legacy_gains_sum_to_L_and_floor():
    p = GainPolicy("prop_abs", rho=0.01, legacy=True, delta=0.01)
    w = np.array([0.5, 0.0, 0.0, -0.25])
    g = compute_gains(w, p)
    assert g.sum() == pytest.approx(4.0)
    # inactive taps sit at rho * max|w|
    gamma = np.array([0.5, 0.005, 0.005, 0.25])
    np.testing.assert_allclose(g, gamma / gamma.mean())


@settings(max_examples=200, deadline=None)
@given(weights, st.sampled_from(["prop_abs", "mulaw_ln", "mulaw_log2"]))
def test_simplified_gain_properties(w, kind):
    p = GainPolicy(kind)
    g = compute_gains(w, p)
    assert abs(g.sum() - 1) < 1e-12
    assert np.all(g > 0)
    order = np.argsort(np.abs(w), kind="stable")
    assert np.all(np.diff(g[order]) >= -1e-15)


def test_gains_batched_match_rows():
    rng = np.random.default_rng(0)
    W = rng.standard_normal((5, 32))
    p = GainPolicy("mulaw_log2")
    G = compute_gains(W, p)
    for i in range(5):
        np.testing.assert_array_equal(G[i], compute_gains(W[i], p))


def test_filter_state_checks():
    with pytest.raises(ValueError):
        FilterState(12, 0.1)
    with pytest.raises(ValueError):
        FilterState(16, 0.1, delay=-1)
    s = FilterState(4, 0.1)
    with pytest.raises(ValueError):
        s.push(np.nan)
    for x in (1.0, 2.0, 3.0):
        s.push(x)
    np.testing.assert_array_equal(s.regressor, [3.0, 2.0, 1.0, 0.0])
    s.weights[:] = [1, 1, 1, 1]
    assert filter_output(s) == 6.0


def _drive(step, policy, delay, n=400, L=16, seed=3, mu=0.3):
    rng = np.random.default_rng(seed)
    h = rng.standard_normal(L) * np.exp(-np.arange(L) / 3)
    x = rng.standard_normal(n + L)
    d = np.convolve(x, h)[: n + L]
    s = FilterState(L, mu, delay=delay)
    for i in range(n + L):
        s.push(x[i])
        if policy is None:
            step(s, d[i])
        else:
            step(s, policy, d[i])
    return s, h


def test_plms_identifies_noise_free_system():
    s, h = _drive(step_plms, GainPolicy("prop_abs"), 0, n=3000)
    assert np.sum((s.weights - h) ** 2) / np.sum(h * h) < 1e-6


def test_delayed_update_applies_old_gradient():
    # after one step with M=2 nothing has been applied yet
    s = FilterState(4, 0.5, delay=2)
    s.push(1.0)
    step_delayed(s, GainPolicy("identity"), 1.0)
    assert np.all(s.weights == 0)
    s.push(0.0)
    step_delayed(s, GainPolicy("identity"), 0.0)
    assert np.all(s.weights == 0)
    s.push(0.0)
    step_delayed(s, GainPolicy("identity"), 0.0)
    # the first snapshot: mu * (1/L) * u * e = 0.5 * 0.25 * [1,0,0,0] * 1
    np.testing.assert_allclose(s.weights, [0.125, 0, 0, 0])


def test_delay_zero_matches_plms_bitwise():
    for kind in ("prop_abs", "mulaw_log2"):
        a, _ = _drive(step_plms, GainPolicy(kind), 0)
        b, _ = _drive(step_delayed, GainPolicy(kind), 0)
        np.testing.assert_array_equal(a.weights, b.weights)


def test_nlms_and_pnlms_converge():
    s, h = _drive(step_nlms, None, 0, n=2000, mu=0.5)
    assert np.sum((s.weights - h) ** 2) / np.sum(h * h) < 1e-6
    s, h = _drive(step_pnlms, GainPolicy("prop_abs", legacy=True), 0, n=2000, mu=0.5)
    assert np.sum((s.weights - h) ** 2) / np.sum(h * h) < 1e-6


def test_mu_zero_freezes_weights():
    s, _ = _drive(step_delayed, GainPolicy("mulaw_log2"), 3, mu=0.0)
    assert np.all(s.weights == 0)


@pytest.mark.parametrize("L", [16, 512])
def test_pnlms_complexity_cells(L):
    lg = int(np.log2(L))
    r = complexity_report("pnlms", L)
    cells = {s.name: (s.mult, s.div, s.add, s.cmp) for s in r.steps}
    assert cells == {
        "filter_output": (L, 0, L, 0),
        "weighted_normalization": (2 * L, 0, L, 0),
        "weight_update": (2 * L, 1, L, 0),
        "gain_calculation": (2, 1, L, 2 * L),
    }
    assert r.step("filter_output").path == {"T_mult": 1, "T_add": lg}
    assert r.step("weighted_normalization").path == {"T_mult": 2, "T_add": 1 + lg}
    assert r.step("weight_update").path == {"T_mult": 1, "T_add": 1}
    assert r.step("gain_calculation").table_path == {"T_cmp": 2 * lg, "T_mult": 1, "T_div": 1, "T_F_eval": 1}
    assert r.total_path == {"T_mult": 5, "T_add": 2 + 3 * lg, "T_cmp": 2 * lg, "T_div": 1, "T_F_eval": 1}


def test_complexity_other_algorithms():
    for algo in COMPLEXITY_ALGORITHMS:
        r = complexity_report(algo, 64)
        assert r.totals["mult"] >= 0
        if algo.startswith("d"):
            assert r.total_path == {"T_mult": 1}
    assert complexity_report("dplms", 64).totals["div"] == 0
    with pytest.raises(ValueError):
        complexity_report("rls", 64)
    with pytest.raises(ValueError):
        complexity_report("pnlms", 100)


def test_complexity_table_text():
    text = format_complexity_tables(complexity_report("pnlms", 512))
    assert "weighted_normalization        1024" in text
    assert "5*T_mult + 29*T_add + 18*T_cmp + T_div + T_F_eval" in text
