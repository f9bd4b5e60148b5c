"""Acceptance checks, one test per criterion.

Each test records a pass/fail line that is printed in the terminal summary.
Run alone with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import time

import numpy as np
import pytest
from numpy.lib.stride_tricks import sliding_window_view

from ptlms.afcore import FilterState, GainPolicy, complexity_report, compute_gains, step_delayed, step_plms
from ptlms.harness import first_crossing, fixed_vs_float, m_sweep, run
from ptlms.harness.presets import (
    COLOUR_MU,
    M_SWEEP_DELAYS,
    fig1,
    fig5_specs,
    fig6_base,
    sparsity_table,
    speedup_scenario,
)
from ptlms.lns import LNS_FRAC, mitchell_antilog2_raw, mitchell_log2_raw
from ptlms.signals import block_system, sparseness
from ptlms.wavelet import SlidingHaarState, build_dwt_matrix, scaled_output, scaling_diag

pytestmark = pytest.mark.slow


def test_c01_sliding_haar_bit_exact(record):
    t0 = time.perf_counter()
    ok = True
    for L in (16, 64):
        rng = np.random.default_rng(L)
        x = rng.integers(-(2**15), 2**15, size=100_000, dtype=np.int64)
        T = build_dwt_matrix("haar_unnormalized", L, 3).T.astype(np.int64)
        padded = np.concatenate([np.zeros(L - 1, np.int64), x])
        windows = sliding_window_view(padded, L)[:, ::-1]   # newest sample first
        oracle = windows @ T.T
        st = SlidingHaarState(L, dtype=np.int64)
        got = np.empty_like(oracle)
        for n, v in enumerate(x):
            got[n] = st.push(v)
        ok &= bool(np.array_equal(got, oracle))
    dt = time.perf_counter() - t0
    ok &= dt < 10
    assert record(1, "sliding Haar bit-exact", ok, f"{dt:.1f} s")


def test_c02_scaling_correction(record):
    rng = np.random.default_rng(2)
    T = build_dwt_matrix("haar_unnormalized", 64, 3).T
    s = scaling_diag(64, 3)[0]
    W, U = rng.standard_normal((2, 10_000, 64))
    got = np.array([scaled_output(T @ w, T @ u, s) for w, u in zip(W, U)])
    err = np.max(np.abs(got - np.einsum("ij,ij->i", W, U)))
    diag_ok = np.array_equal(scaling_diag(8, 3)[0], [8, 8, 4, 4, 2, 2, 2, 2])
    assert record(2, "scaling correction", err < 1e-10 and diag_ok, f"max err {err:.1e}")


def test_c03_gain_invariants(record):
    rng = np.random.default_rng(3)
    W = rng.standard_normal((100_000, 32)) * rng.uniform(0.01, 2, (100_000, 1))
    W[rng.random(W.shape) < 0.5] = 0.0
    worst_sum, ok = 0.0, True
    for kind in ("prop_abs", "mulaw_ln", "mulaw_log2"):
        G = compute_gains(W, GainPolicy(kind))
        worst_sum = max(worst_sum, np.max(np.abs(G.sum(axis=1) - 1)))
        ok &= bool(np.all(G > 0))
        order = np.argsort(np.abs(W), axis=1, kind="stable")
        ok &= bool(np.all(np.diff(np.take_along_axis(G, order, 1), axis=1) >= -1e-15))
    legacy = compute_gains(W, GainPolicy("prop_abs", legacy=True))
    leg_err = np.max(np.abs(legacy.sum(axis=1) - 32))
    ok &= worst_sum <= 1e-12 and leg_err <= 1e-9
    assert record(3, "gain invariants", ok, f"sum err {worst_sum:.1e}, legacy {leg_err:.1e}")


def test_c04_mitchell_bounds(record):
    raw = np.arange(1, 1 << 15)
    _, lm, _ = mitchell_log2_raw(raw, 14)
    err = (np.log2(raw) - 14) - lm / (1 << LNS_FRAC)
    ok = err.min() >= 0 and err.max() <= 0.0861 + 2.0**-LNS_FRAC
    pw = 1 << np.arange(15)
    ok &= np.array_equal(mitchell_log2_raw(pw, 14)[1], (np.arange(15) - 14) << LNS_FRAC)
    back = mitchell_antilog2_raw(lm, LNS_FRAC, 14)
    # representable points: magnitudes whose bits below the leading one fit in the LNS fraction
    p = np.floor(np.log2(raw)).astype(int)
    fits = (raw % (1 << np.maximum(p - LNS_FRAC, 0))) == 0
    ok &= np.array_equal(back[fits], raw[fits])
    assert record(4, "Mitchell bounds", ok, f"err in [{err.min():.4f}, {err.max():.4f}]")


def test_c05_delay_degeneracy(record):
    ok = True
    for kind in ("prop_abs", "mulaw_log2"):
        rng = np.random.default_rng(5)
        h = np.zeros(64)
        h[[3, 20, 41]] = [0.8, -0.3, 0.1]
        x = rng.standard_normal(10_000)
        d = np.convolve(x, h)[:10_000] + 0.01 * rng.standard_normal(10_000)
        a, b = FilterState(64, 0.2), FilterState(64, 0.2, delay=0)
        p = GainPolicy(kind)
        for xn, dn in zip(x, d):
            a.push(xn)
            b.push(xn)
            ea = step_plms(a, p, dn)
            eb = step_delayed(b, p, dn)
            if ea != eb:
                ok = False
                break
        ok &= np.array_equal(a.weights, b.weights)
    assert record(5, "delay degeneracy", ok, "10^4 steps, both gain laws")


def test_c06_fig1(record):
    res = fig1(trials=50)
    c = res.panels["fig1"]
    dev = np.max(np.abs(c["PLMS"].msd_db[500:] - c["PNLMS"].msd_db[500:]))
    n_plms, n_pnlms, n_nlms = (first_crossing(c[k], -20) for k in ("PLMS", "PNLMS", "NLMS"))
    ok = dev <= 1.0 and None not in (n_plms, n_pnlms) and (
        n_nlms is None or (n_plms < n_nlms and n_pnlms < n_nlms))
    assert record(6, "Fig 1 PLMS vs PNLMS", ok,
                  f"max dev {dev:.2f} dB; -20 dB at PLMS {n_plms}, PNLMS {n_pnlms}, NLMS {n_nlms}")


def test_c07_speedup_white(record):
    ratio, a, b = speedup_scenario("white", trials=50)
    assert record(7, "speed-up white", ratio >= 2.5,
                  f"{ratio:.2f}x ({first_crossing(a, -20)} vs {first_crossing(b, -20)})")


def test_c08_speedup_colour(record):
    ratio, a, b = speedup_scenario("colour", trials=50)
    assert record(8, "speed-up coloured", ratio >= 10,
                  f"{ratio:.2f}x ({first_crossing(a, -20)} vs {first_crossing(b, -20)})")


def test_c09_fixed_vs_float(record):
    ok, parts = True, []
    for name, spec in fig5_specs().items():
        cmp = fixed_vs_float(spec)
        dev = cmp.steady_state_deviation_db()
        ok &= dev <= 1.0 and cmp.saturation_events == 0
        parts.append(f"{name} {dev:.2f} dB / {cmp.saturation_events} sat")
    assert record(9, "fixed vs float", ok, ", ".join(parts))


def test_c10_m_sweep(record):
    base = fig6_base(50)
    sweep = m_sweep(base, M_SWEEP_DELAYS)
    ss = [sweep[M].steady_state_db() for M in M_SWEEP_DELAYS]
    ref = run(base.replace(algorithm="dnlms", mu=COLOUR_MU["dnlms"], delay=5)).steady_state_db()
    ok = all(b >= a for a, b in zip(ss, ss[1:])) and ss[-1] > ref
    assert record(10, "M-sweep ordering", ok,
                  " ".join(f"M={M}:{v:.1f}" for M, v in zip(M_SWEEP_DELAYS, ss)) + f" DNLMS:{ref:.1f} dB")


def test_c11_sparsity_ordering(record):
    time_s, dct_s, haar_s, ortho_s = sparsity_table()["sparse"]
    ok = haar_s > dct_s and ortho_s > dct_s
    assert record(11, "sparsity ordering", ok, f"Haar {haar_s:.3f} > DCT {dct_s:.3f}")


def test_c12_complexity(record):
    ok = True
    for L in (16, 512):
        lg = int(np.log2(L))
        r = complexity_report("pnlms", L)
        cells = {s.name: (s.mult, s.div, s.add, s.cmp) for s in r.steps}
        ok &= cells == {
            "filter_output": (L, 0, L, 0),
            "weighted_normalization": (2 * L, 0, L, 0),
            "weight_update": (2 * L, 1, L, 0),
            "gain_calculation": (2, 1, L, 2 * L),
        }
        ok &= r.step("filter_output").path == {"T_mult": 1, "T_add": lg}
        ok &= r.step("weighted_normalization").path == {"T_mult": 2, "T_add": 1 + lg}
        ok &= r.step("weight_update").path == {"T_mult": 1, "T_add": 1}
        ok &= r.step("gain_calculation").table_path == {
            "T_cmp": 2 * lg, "T_mult": 1, "T_div": 1, "T_F_eval": 1}
    assert record(12, "complexity tables", ok, "L in {16, 512}")


def test_c13_sparseness(record):
    one = np.zeros(512)
    one[100] = 1.0
    s1, s0 = sparseness(one), sparseness(np.ones(512))
    s_block = block_system(512, 64).sparseness
    ok = s1 == 1.0 and s0 == 0.0 and abs(s_block - 0.8637) <= 1e-3
    assert record(13, "sparseness measure", ok,
                  f"single {s1}, uniform {s0}, 64 equal taps {s_block:.4f} (target 0.8637)")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
