"""Named experiment presets, one per reproduced figure.

Every preset returns a :class:`PresetResult` holding one or more panels
of learning curves (or, for the sparsity comparison, a table). Trials
default to the desk-scale count; ``paper_scale=True`` restores 500.

Step sizes for the white-input and speech experiments are the published
ones. The correlated-input values were picked by a stability sweep (see
the README) because the published ones are not legible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..signals import SYSTEM_TARGETS, gen_system, sparseness
from ..wavelet import build_dwt_matrix, dct_matrix
from .experiment import ExperimentSpec, LearningCurve, fixed_vs_float, m_sweep, run, speedup

DESK_TRIALS = 50
PAPER_TRIALS = 500

WHITE_MU = {"dnlms": 0.25, "dplms": 0.22, "dmplms": 0.25, "dwmplms": 0.15, "dwmplms_sym4": 0.25}
COLOUR_MU = {"dnlms": 0.2, "dplms": 0.03, "dmplms": 0.03, "dwmplms": 0.5, "dwmplms_sym4": 0.25}
SPEECH_MU = {"dnlms": 0.2, "dplms": 50.0, "dmplms": 50.0, "dwmplms": 1.1, "dwmplms_sym4": 2.5}
SPEECH_VARIANCE = 0.002

# 64 active taps decaying by r per tap give S_m = 0.8637 in 512 taps
FIG1_SYSTEM = "block64@0.8794"

# fixed-point comparison: signals scaled down so the desired signal stays
# inside Q1.14, step sizes scaled up by the same power ratio
FIXED_VARIANCE = 1.0 / 16
FIXED_TAPS = 64
FIXED_TRIALS = 10

M_SWEEP_MU = 0.08
M_SWEEP_DELAYS = (0, 5, 10, 15)

LABELS = {
    "dnlms": "DNLMS",
    "dplms": "DPLMS",
    "dmplms": "DMPLMS",
    "dwmplms": "DWMPLMS (U-Haar)",
    "dwmplms_sym4": "DWMPLMS (Sym4)",
}


@dataclass
class PresetResult:
    name: str
    panels: dict = field(default_factory=dict)  # panel -> {label: LearningCurve}
    table: dict | None = None                   # row -> values, for bar-chart presets
    columns: tuple = ()
    markers: dict = field(default_factory=dict)  # panel -> iterations to mark
    notes: list = field(default_factory=list)

    def diverged(self):
        """Labels (``panel/curve``) of curves that hit the divergence limit."""
        out = []
        for p, curves in self.panels.items():
            for k, c in curves.items():
                if isinstance(c, LearningCurve) and c.diverged:
                    out.append(f"{p}/{k}")
        return out


def _spec(key, mu, **kw):
    """Spec for one of the compared algorithms; ``dwmplms_sym4`` selects the Sym4 transform."""
    if key == "dwmplms_sym4":
        kw.setdefault("transform", "sym4")
        key = "dwmplms"
    return ExperimentSpec(algorithm=key, mu=mu, **kw)


def _trials(trials, paper_scale):
    if trials is not None:
        return trials
    return PAPER_TRIALS if paper_scale else DESK_TRIALS


def fig1(trials=None, paper_scale=False, workers=1):
    """PNLMS against the reformulated PLMS (no normalisation), NLMS as reference."""
    t = _trials(trials, paper_scale)
    base = dict(system=FIG1_SYSTEM, source="white", iterations=8000, trials=t, delay=0)
    specs = {
        "PNLMS": ExperimentSpec(algorithm="pnlms", mu=0.22, legacy=False, **base),
        "PLMS": ExperimentSpec(algorithm="plms", mu=0.22, **base),
        "NLMS": ExperimentSpec(algorithm="nlms", mu=0.25, **base),
        "PNLMS (max-based gains)": ExperimentSpec(algorithm="pnlms", mu=0.22, legacy=True, **base),
    }
    curves = {k: run(s.replace(label=k), workers=workers) for k, s in specs.items()}
    return PresetResult("fig1", {"fig1": curves})


def _pair(name, plain, delayed, mu, trials, paper_scale, workers):
    t = _trials(trials, paper_scale)
    base = dict(system="sparse", source="white", iterations=8000, trials=t, mu=mu)
    curves = {
        plain.upper(): run(ExperimentSpec(algorithm=plain, label=plain.upper(), **base), workers=workers),
        f"{delayed.upper()} (M=5)": run(
            ExperimentSpec(algorithm=delayed, delay=5, label=delayed.upper(), **base), workers=workers
        ),
    }
    return PresetResult(name, {name: curves})


def fig2(trials=None, paper_scale=False, workers=1):
    """PLMS against its delayed form."""
    return _pair("fig2", "plms", "dplms", WHITE_MU["dplms"], trials, paper_scale, workers)


def fig3(trials=None, paper_scale=False, workers=1):
    """MPLMS against its delayed form."""
    return _pair("fig3", "mplms", "dmplms", WHITE_MU["dmplms"], trials, paper_scale, workers)


def fig5_specs(trials=None):
    t = trials if trials is not None else FIXED_TRIALS
    base = dict(system="sparse", source="white", variance=FIXED_VARIANCE, taps=FIXED_TAPS,
                iterations=5000, trials=t)
    scale = 1.0 / FIXED_VARIANCE
    return {
        "DPLMS": ExperimentSpec(algorithm="dplms", mu=WHITE_MU["dplms"] * scale, rho=0.01, **base),
        # rho scaled to the larger range of the mu-law gain (max F ~ 6 against max |w| < 1)
        "DMPLMS": ExperimentSpec(algorithm="dmplms", mu=WHITE_MU["dmplms"] * scale, rho=0.05, **base),
    }


def fig5(trials=None, paper_scale=False, workers=1):
    """16-bit datapath against floating point for DPLMS and DMPLMS.

    Runs with 10 trials at both scales, as in the original comparison.
    """
    res = PresetResult("fig5")
    for name, spec in fig5_specs(trials).items():
        cmp = fixed_vs_float(spec, workers=workers)
        res.panels[f"fig5_{name.lower()}"] = {
            f"{name} float": cmp.float_curve,
            f"{name} fixed16": cmp.fixed_curve,
        }
        res.notes.append(
            f"{name}: steady-state deviation {cmp.steady_state_deviation_db():.2f} dB, "
            f"saturation events {cmp.saturation_events}"
        )
    return res


def fig6_base(trials):
    return ExperimentSpec(algorithm="dmplms", mu=M_SWEEP_MU, source="ar1", system="sparse",
                          iterations=60000, trials=trials)


def fig6(trials=None, paper_scale=False, workers=1):
    """DMPLMS on correlated input for growing adaptation delay, with DNLMS for reference."""
    base = fig6_base(_trials(trials, paper_scale))
    sweep = m_sweep(base, M_SWEEP_DELAYS, workers=workers)
    curves = {f"DMPLMS M={M}": c for M, c in sweep.items()}
    curves["DNLMS M=5"] = run(base.replace(algorithm="dnlms", mu=COLOUR_MU["dnlms"], delay=5,
                                           label="DNLMS"), workers=workers)
    res = PresetResult("fig6", {"fig6": curves})
    for k, c in curves.items():
        res.notes.append(f"{k}: steady state {c.steady_state_db():.1f} dB")
    return res


def sparsity_table(L=512, seed=0):
    """Sparseness of each profile in the time, DCT and wavelet domains."""
    T_u = build_dwt_matrix("haar_unnormalized", L, 3).T
    T_o = build_dwt_matrix("haar_orthonormal", L, 3).T
    C = dct_matrix(L)
    rows = {}
    for profile in SYSTEM_TARGETS:
        h = gen_system(L, profile, seed).h
        rows[profile] = (sparseness(h), sparseness(C @ h), sparseness(T_u @ h), sparseness(T_o @ h))
    return rows


SPARSITY_COLUMNS = ("time", "DCT", "U-Haar 3-level", "Haar 3-level (orthonormal)")


def fig7(trials=None, paper_scale=False, workers=1):
    """Bar data: how sparse each echo path stays after the DCT and the wavelet transform."""
    return PresetResult("fig7", table=sparsity_table(), columns=SPARSITY_COLUMNS)


GRID_ALGOS = ("dnlms", "dplms", "dmplms", "dwmplms")


def fig8_specs(trials):
    out = {}
    for source, mus, n in (("white", WHITE_MU, 10000), ("ar1", COLOUR_MU, 50000)):
        for profile in SYSTEM_TARGETS:
            panel = f"fig8_{source}_{profile}"
            out[panel] = {
                LABELS[a]: _spec(a, mus[a], source=source, system=profile, iterations=n, trials=trials,
                                 label=LABELS[a])
                for a in GRID_ALGOS
            }
    return out


def fig8(trials=None, paper_scale=False, workers=1):
    """White/correlated input against sparse, semi-sparse and dispersive echo paths."""
    res = PresetResult("fig8")
    for panel, specs in fig8_specs(_trials(trials, paper_scale)).items():
        res.panels[panel] = {k: run(s, workers=workers) for k, s in specs.items()}
    return res


TRACK_ALGOS = ("dnlms", "dplms", "dmplms", "dwmplms_sym4", "dwmplms")


def fig11_specs(trials, iterations=40000):
    half = iterations // 2
    return {
        LABELS[a]: _spec(a, SPEECH_MU[a], source="speech", variance=SPEECH_VARIANCE, system="sparse",
                         iterations=iterations, trials=trials, shift_at=half, shift_by=12,
                         label=LABELS[a])
        for a in TRACK_ALGOS
    }


def fig11(trials=None, paper_scale=False, workers=1):
    """Tracking: the echo path moves 12 taps to the right halfway through a speech-like input."""
    specs = fig11_specs(_trials(trials, paper_scale))
    curves = {k: run(s, workers=workers) for k, s in specs.items()}
    shift = next(iter(specs.values())).shift_at
    return PresetResult("fig11", {"fig11": curves}, markers={"fig11": [shift]})


PRESETS = {
    "fig1": fig1,
    "fig2": fig2,
    "fig3": fig3,
    "fig5": fig5,
    "fig6": fig6,
    "fig7": fig7,
    "fig8": fig8,
    "fig11": fig11,
}


def run_preset(name, trials=None, paper_scale=False, workers=1) -> PresetResult:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return PRESETS[name](trials=trials, paper_scale=paper_scale, workers=workers)


# -- speed-up scenarios --------------------------------------------------------------

def speedup_white_specs(trials=DESK_TRIALS):
    base = dict(source="white", system="sparse", iterations=12000, trials=trials, mu=0.25)
    return ExperimentSpec(algorithm="dmplms", label="DMPLMS", **base), \
        ExperimentSpec(algorithm="dlms", label="DLMS", **base)


def speedup_colour_specs(trials=DESK_TRIALS):
    base = dict(source="ar1", system="sparse", trials=trials)
    fast = ExperimentSpec(algorithm="dwmplms", mu=COLOUR_MU["dwmplms"], iterations=30000,
                          label="DWMPLMS", **base)
    slow = ExperimentSpec(algorithm="dnlms", mu=COLOUR_MU["dnlms"], iterations=160000,
                          label="DNLMS", **base)
    return fast, slow


SCENARIOS = {"white": speedup_white_specs, "colour": speedup_colour_specs}


def speedup_scenario(name, trials=DESK_TRIALS, threshold_db=-20.0, workers=1):
    """Returns ``(ratio, fast_curve, slow_curve)``."""
    fast, slow = SCENARIOS[name](trials)
    a = run(fast, workers=workers)
    b = run(slow, workers=workers)
    return speedup(a, b, threshold_db), a, b
