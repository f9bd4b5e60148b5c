import numpy as np
import pytest

from ptlms.afcore import complexity_report, format_complexity_tables
from ptlms.harness import (
    ExperimentSpec,
    LearningCurve,
    ThresholdNotReached,
    first_crossing,
    fixed_vs_float,
    m_sweep,
    run,
    speedup,
)
from ptlms.harness import emit
from ptlms.harness.presets import PRESETS, fig5_specs, fig8_specs, fig11_specs, sparsity_table

SMALL = dict(taps=32, iterations=600, trials=3, system="sparse", source="white")


def test_spec_text_roundtrip(tmp_path):
    s = ExperimentSpec(algorithm="dwmplms", mu=0.3, source="ar1", shift_at=100, iterations=400, taps=64, label="x")
    assert ExperimentSpec.from_text(s.to_text()) == s
    p = tmp_path / "a.spec"
    p.write_text("# comment\nalgorithm = dplms\nmu = 0.22   # inline\n\ntrials = 2\nprefill = no\n")
    t = ExperimentSpec.from_file(p)
    assert (t.algorithm, t.mu, t.trials, t.prefill) == ("dplms", 0.22, 2, False)
    assert t.digest() != s.digest()


@pytest.mark.parametrize("bad", [
    "algorithm = rls",
    "trials = 0",
    "iterations = 10",
    "arithmetic = fixed8",
    "system = file:/nonexistent/h.txt",
    "frobnicate = 1",
    "no equals sign",
])
def test_spec_validation(bad):
    with pytest.raises((ValueError, FileNotFoundError)):
        ExperimentSpec.from_text(bad)


def test_mu_zero_is_flat_zero_db():
    c = run(ExperimentSpec(algorithm="dmplms", mu=0.0, **SMALL))
    assert np.all(c.msd_db == 0.0)
    assert len(c) == SMALL["iterations"]


@pytest.mark.parametrize("algo", ["lms", "dlms", "nlms", "dnlms", "pnlms", "plms", "dplms",
                                  "mplms", "dmplms", "wmplms", "dwmplms"])
def test_every_algorithm_converges(algo):
    mu = {"lms": 0.5, "dlms": 0.5}.get(algo, 0.25)
    c = run(ExperimentSpec(algorithm=algo, mu=mu, **SMALL))
    assert c.msd_db[0] == 0.0
    assert not c.diverged
    assert c.steady_state_db() < -8


def test_determinism_and_chunking():
    s = ExperimentSpec(algorithm="dmplms", mu=0.25, **SMALL)
    a = run(s)
    b = run(s)
    assert a.msd_db.tobytes() == b.msd_db.tobytes()
    c = run(s, chunk=1)
    d = run(s, chunk=2, workers=2)
    np.testing.assert_allclose(c.msd_db, a.msd_db, rtol=0, atol=1e-12)
    assert c.msd_db.tobytes() == d.msd_db.tobytes()


def test_divergence_is_flagged():
    c = run(ExperimentSpec(algorithm="dlms", mu=40.0, **SMALL))
    assert c.diverged
    assert np.all(np.isnan(c.msd_db[c.diverged_at:]))
    assert np.all(np.isfinite(c.msd_db[: c.diverged_at]))
    assert c.steady_state_db() == np.inf


def test_tracking_shift_raises_msd():
    s = ExperimentSpec(algorithm="dmplms", mu=0.25, shift_at=500, **{**SMALL, "iterations": 1000})
    c = run(s)
    assert c.msd_db[500] > c.msd_db[499] + 10


def test_m_sweep_zero_entry_equals_mplms():
    base = ExperimentSpec(algorithm="dmplms", mu=0.25, **SMALL)
    sw = m_sweep(base, [0, 3])
    plain = run(base.replace(algorithm="mplms", delay=0, label="M=0"))
    assert sw[0].msd_db.tobytes() == plain.msd_db.tobytes()
    assert set(sw) == {0, 3}


def test_fixed_vs_float_zero_input():
    s = ExperimentSpec(algorithm="dplms", mu=1.0, enr_db=float("inf"), variance=1e-30, **SMALL)
    cmp = fixed_vs_float(s)
    assert cmp.max_deviation_db == 0.0
    assert cmp.saturation_events == 0


def test_fixed_vs_float_small():
    s = ExperimentSpec(algorithm="dmplms", mu=4.0, rho=0.05, variance=1 / 16,
                       **{**SMALL, "iterations": 1500, "trials": 2})
    cmp = fixed_vs_float(s)
    assert cmp.saturation_events == 0
    assert cmp.steady_state_deviation_db() < 3


def test_fixed_path_rejects_nlms():
    with pytest.raises(ValueError):
        run(ExperimentSpec(algorithm="dnlms", arithmetic="fixed16", **SMALL))


def test_speedup_examples():
    a = np.linspace(0, -40, 100)
    assert speedup(a, a) == 1.0
    fast = np.full(40000, 0.0)
    fast[10000:] = -25
    slow = np.full(40000, 0.0)
    slow[30000:] = -25
    assert speedup(fast, slow, -20) == 3.0
    with pytest.raises(ThresholdNotReached):
        speedup(fast, np.zeros(10), -20)
    assert first_crossing(np.zeros(5), -1) is None


def test_emit_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    curves = {"a": rng.standard_normal(50) * 10, "b b": LearningCurve(rng.standard_normal(50))}
    curves["a"][7] = np.nan
    p = emit.write_csv(curves, tmp_path / "c.csv")
    back = emit.read_csv(p)
    assert list(back) == ["a", "b b"]
    assert back["a"].tobytes() == curves["a"].tobytes()
    assert back["b b"].tobytes() == curves["b b"].msd_db.tobytes()


def test_emit_empty_and_svg(tmp_path):
    p = emit.write_csv({}, tmp_path / "e.csv")
    assert p.read_text() == "iteration\n"
    assert emit.read_csv(p) == {}
    c1, s1 = emit.emit({"x": np.arange(10.0)}, tmp_path / "one")
    c2, s2 = emit.emit({"x": np.arange(10.0)}, tmp_path / "two")
    assert s1.read_bytes() == s2.read_bytes()
    assert s1.read_text().lstrip().startswith("<?xml")


def test_complexity_text_matches_report(tmp_path):
    r = complexity_report("pnlms", 512)
    text = emit.write_complexity(r, tmp_path / "t.txt")
    assert text == format_complexity_tables(r)
    for s in r.steps:
        assert f"{s.mult:>8}{s.div:>6}{s.add:>8}{s.cmp:>8}" in text


def test_presets_are_registered():
    assert set(PRESETS) == {"fig1", "fig2", "fig3", "fig5", "fig6", "fig7", "fig8", "fig11"}
    grid = fig8_specs(2)
    assert len(grid) == 6
    tr = fig11_specs(2)
    for s in tr.values():
        assert s.shift_at == s.iterations // 2 and s.shift_by == 12
    mus = {k: s.mu for k, s in tr.items()}
    assert sorted(mus.values()) == [0.2, 1.1, 2.5, 50.0, 50.0]
    f5 = fig5_specs()
    assert all(s.trials == 10 for s in f5.values())


def test_sparsity_table_ordering():
    rows = sparsity_table(L=128)
    for time_s, dct_s, uhaar_s, ohaar_s in rows.values():
        assert uhaar_s > dct_s
