"""Monte-Carlo learning-curve experiments.

Trials run as one numpy batch (or several equal chunks); each trial owns
its input and noise streams, seeded with ``seed + trial``. Trial results
are summed in trial order, so the averaged curve does not depend on the
chunking or on how many worker processes were used.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import afcore
from ..afcore import FilterState, GainPolicy
from ..fixedpoint import SIGNAL_FMT, FixedPointFilter
from ..lns import quantize
from ..signals import (
    SignalSource,
    SystemModel,
    echo,
    gen_input,
    gen_system,
    load_impulse_response,
    shift_system,
)
from ..wavelet import PowerEstimator, make_transform

DIVERGENCE_DB = 60.0

SYSTEM_ALIASES = {"semi": "semi_sparse"}

# id -> (update rule, default gain kind, delayed)
ALGORITHMS = {
    "lms": ("plms", "identity", False),
    "dlms": ("delayed", "identity", True),
    "nlms": ("nlms", None, False),
    "dnlms": ("nlms", None, True),
    "pnlms": ("pnlms", "prop_abs", False),
    "plms": ("plms", "prop_abs", False),
    "dplms": ("delayed", "prop_abs", True),
    "mplms": ("plms", "mulaw_log2", False),
    "dmplms": ("delayed", "mulaw_log2", True),
    "wmplms": ("dwmplms", "mulaw_log2", False),
    "dwmplms": ("dwmplms", "mulaw_log2", True),
}


@dataclass
class ExperimentSpec:
    """Declarative description of one learning-curve experiment.

    ``system`` is a profile name (``sparse``, ``semi_sparse``,
    ``dispersive``), ``block<K>`` for K equal consecutive taps,
    ``block<K>@<r>`` for K taps decaying geometrically by r, or
    ``file:<path>``. ``source`` is ``white``, ``ar1``, ``speech`` or
    ``file:<path>``. ``shift_at`` (iteration) moves the echo path right by
    ``shift_by`` taps mid-run. With ``prefill`` the input runs for L - 1
    samples before adaptation starts, so the regressor is full at
    iteration 0.
    """

    algorithm: str = "dmplms"
    mu: float = 0.25
    gain: str | None = None
    legacy: bool | None = None
    arithmetic: str = "float"
    taps: int = 512
    delay: int = 5
    reg: float = 1e-4
    rho: float = 0.01
    xi: float = 0.001
    k: int = 6
    delta: float = 0.01
    transform: str = "haar_unnormalized"
    levels: int = 3
    power: str = "abs"
    beta: float = 0.125
    source: str = "white"
    variance: float = 1.0
    pole: float = 0.95
    system: str = "sparse"
    system_seed: int = 0
    enr_db: float = 30.0
    iterations: int = 5000
    trials: int = 50
    seed: int = 1
    shift_at: int | None = None
    shift_by: int = 12
    prefill: bool = True
    label: str = ""

    def __post_init__(self):
        self.validate()

    # -- validation and text form -------------------------------------------------
    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.arithmetic not in ("float", "fixed16"):
            raise ValueError("arithmetic must be 'float' or 'fixed16'")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.iterations < self.taps:
            raise ValueError("iterations must be at least the filter length")
        if self.delay < 0:
            raise ValueError("delay must be non-negative")
        for ref in (self.system, self.source):
            if ref.startswith("file:") and not Path(ref[5:]).exists():
                raise FileNotFoundError(ref[5:])
        if self.shift_at is not None and not 0 < self.shift_at < self.iterations:
            raise ValueError("shift_at must fall inside the run")
        self.policy()

    @property
    def effective_delay(self):
        return self.delay if ALGORITHMS[self.algorithm][2] else 0

    def policy(self) -> GainPolicy:
        rule, kind, _ = ALGORITHMS[self.algorithm]
        kind = self.gain or kind or "identity"
        legacy = self.legacy if self.legacy is not None else rule == "pnlms"
        return GainPolicy(kind, rho=self.rho, xi=self.xi, k=self.k, legacy=legacy, delta=self.delta)

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentSpec":
        """Parse ``key = value`` lines; blank lines and ``#`` comments are ignored."""
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        kwargs = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected 'key = value'")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in types:
                raise ValueError(f"line {lineno}: unknown key {key!r}")
            kwargs[key] = _parse_value(types[key], val)
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "ExperimentSpec":
        return cls.from_text(Path(path).read_text())

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]

    def replace(self, **changes) -> "ExperimentSpec":
        return dataclasses.replace(self, **changes)


def _parse_value(type_name, val):
    t = str(type_name)
    if val.lower() in ("none", "") and "None" in t:
        return None
    if t.startswith("bool"):
        if val.lower() not in ("true", "false", "1", "0", "yes", "no"):
            raise ValueError(f"not a boolean: {val!r}")
        return val.lower() in ("true", "1", "yes")
    if t.startswith("int"):
        return int(val)
    if t.startswith("float"):
        return float(val)
    return val


@dataclass
class LearningCurve:
    """Trial-averaged normalised MSD in dB, one value per iteration.

    Entries after ``diverged_at`` are NaN.
    """

    msd_db: np.ndarray
    label: str = ""
    spec_hash: str = ""
    wall_time: float = 0.0
    diverged_at: int | None = None
    saturation_events: int = 0
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.msd_db)

    @property
    def diverged(self):
        return self.diverged_at is not None

    def steady_state_db(self, fraction=0.1):
        """Mean of the last ``fraction`` of the curve, averaged in the linear domain."""
        if self.diverged:
            return math.inf
        n = max(1, int(len(self.msd_db) * fraction))
        return float(10 * np.log10(np.mean(10 ** (self.msd_db[-n:] / 10))))


# -- system / stimulus construction --------------------------------------------------


def build_system(spec: ExperimentSpec) -> SystemModel:
    s = spec.system
    if s.startswith("file:"):
        m = load_impulse_response(s[5:])
        if m.num_taps != spec.taps:
            raise ValueError(f"impulse response has {m.num_taps} taps, spec wants {spec.taps}")
        return m
    if s.startswith("block"):
        from ..signals import block_system

        count, _, decay = s[5:].partition("@")
        return block_system(spec.taps, int(count), float(decay) if decay else None)
    return gen_system(spec.taps, SYSTEM_ALIASES.get(s, s), spec.system_seed)


def _source(spec: ExperimentSpec) -> SignalSource:
    if spec.source.startswith("file:"):
        return SignalSource("file", path=spec.source[5:])
    return SignalSource(spec.source, variance=spec.variance, pole=spec.pole, seed=spec.seed)


def stimulus(spec: ExperimentSpec, trial: int, h1, h2=None):
    """Input and desired signal of one trial (``lead() + iterations`` samples)."""
    pre = lead(spec)
    n = spec.iterations + pre
    x = gen_input(_source(spec), n, trial)
    y = echo(h1, x)
    if h2 is not None:
        y2 = echo(h2, x)
        y[pre + spec.shift_at :] = y2[pre + spec.shift_at :]
    if spec.enr_db is None or math.isinf(spec.enr_db):
        return x, y
    # noise stream is independent of the input stream of every trial
    rng = np.random.default_rng([spec.seed, trial, 1])
    p = np.mean(echo(h1, x) ** 2)
    if p == 0:
        return x, y
    v = rng.standard_normal(n) * math.sqrt(p / 10.0 ** (spec.enr_db / 10.0))
    return x, y + v


def lead(spec: ExperimentSpec):
    return spec.taps - 1 if spec.prefill else 0


# -- core loop -------------------------------------------------------------------------


def _run_chunk(spec: ExperimentSpec, trials):
    """Run the listed trials in one batch; returns (per-trial linear MSD, diverged_at, sat)."""
    B = len(trials)
    L = spec.taps
    system = build_system(spec)
    h1 = system.h
    h2 = shift_system(h1, spec.shift_by).h if spec.shift_at is not None else None
    pre = lead(spec)
    X = np.empty((B, spec.iterations + pre))
    D = np.empty((B, spec.iterations + pre))
    for i, t in enumerate(trials):
        X[i], D[i] = stimulus(spec, t, h1, h2)

    rule, _, _ = ALGORITHMS[spec.algorithm]
    policy = spec.policy()
    M = spec.effective_delay
    transformed = rule == "dwmplms"
    fixed = spec.arithmetic == "fixed16"

    if transformed:
        tr_batch = (B,)
        if fixed:
            if spec.transform != "haar_unnormalized" or spec.levels != 3:
                raise ValueError("fixed-point transform path supports only the 3-level Haar")
            scaling = make_transform("haar_unnormalized", L, 3).scaling
        else:
            tr = make_transform(spec.transform, L, spec.levels, batch=tr_batch)
            scaling = tr.scaling
            power = PowerEstimator(L, spec.beta, spec.power, batch=tr_batch)
        Tmat = _transform_matrix(spec)
        targets = [Tmat @ h1] + ([Tmat @ h2] if h2 is not None else [])
    else:
        scaling = None
        targets = [h1] + ([h2] if h2 is not None else [])
    # normalise in the same domain as the error so MSD(0) is exactly 0 dB
    if transformed:
        norms = [float((t * t / scaling).sum()) for t in targets]
    else:
        norms = [float(h @ h) for h in targets]

    if fixed:
        if rule not in ("delayed", "plms", "dwmplms"):
            raise ValueError(f"no fixed-point datapath for {spec.algorithm}")
        flt = FixedPointFilter(L, spec.mu, policy, delay=M,
                               transform="haar" if transformed else None, batch=(B,))
        Xq = quantize(X, SIGNAL_FMT, flt.counter).raw
        Dq = quantize(D, SIGNAL_FMT, flt.counter).raw
    else:
        state = FilterState(L, spec.mu, delay=M, reg=spec.reg, batch=(B,))

    for n in range(pre):
        if fixed:
            flt.prime(Xq[:, n])
        elif transformed:
            power.update(tr.push(X[:, n]))
        else:
            state.push(X[:, n])
    X, D = X[:, pre:], D[:, pre:]
    if fixed:
        Xq, Dq = Xq[:, pre:], Dq[:, pre:]

    msd = np.full((B, spec.iterations), np.nan)
    diverged_at = None
    limit = 10 ** (DIVERGENCE_DB / 10)
    for n in range(spec.iterations):
        phase = 1 if (h2 is not None and n >= spec.shift_at) else 0
        target, norm = targets[phase], norms[phase]
        w = flt.weights if fixed else state.weights
        diff = w - target
        if transformed:
            err = (diff * diff / scaling).sum(axis=-1)
        else:
            err = (diff * diff).sum(axis=-1)
        msd[:, n] = err / norm
        if np.any(~np.isfinite(msd[:, n])) or np.any(msd[:, n] > limit):
            diverged_at = n
            msd[:, n:] = np.nan
            break
        if fixed:
            flt.step(Xq[:, n], Dq[:, n])
            continue
        if transformed:
            tr.push(X[:, n])
            afcore.step_dwmplms(state, policy, tr, power, D[:, n])
            continue
        state.push(X[:, n])
        d = D[:, n]
        if rule == "plms":
            afcore.step_plms(state, policy, d)
        elif rule == "delayed":
            afcore.step_delayed(state, policy, d)
        elif rule == "nlms":
            afcore.step_nlms(state, d)
        else:
            afcore.step_pnlms(state, policy, d)
    sat = flt.counter.events if fixed else 0
    return msd, diverged_at, sat


def _transform_matrix(spec):
    from ..wavelet import build_dwt_matrix, dct_matrix

    if spec.transform == "dct":
        return dct_matrix(spec.taps)
    return build_dwt_matrix(spec.transform, spec.taps, spec.levels).T


def run(spec: ExperimentSpec, chunk: int | None = None, workers: int = 1) -> LearningCurve:
    """Average the normalised MSD over ``spec.trials`` Monte-Carlo trials."""
    spec.validate()
    t0 = time.perf_counter()
    chunk = chunk or spec.trials
    groups = [list(range(i, min(i + chunk, spec.trials))) for i in range(0, spec.trials, chunk)]
    if workers > 1 and len(groups) > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_run_chunk, [spec] * len(groups), groups))
    else:
        results = [_run_chunk(spec, g) for g in groups]
    total = np.zeros(spec.iterations)
    diverged = [r[1] for r in results if r[1] is not None]
    sat = 0
    for msd, _, s in results:
        # fixed summation order: trial 0, 1, 2, ...
        for row in msd:
            total += row
        sat += s
    mean = total / spec.trials
    with np.errstate(divide="ignore", invalid="ignore"):
        curve = 10 * np.log10(mean)
    diverged_at = min(diverged) if diverged else None
    if diverged_at is not None:
        curve[diverged_at:] = np.nan
    return LearningCurve(
        curve,
        label=spec.label or spec.algorithm,
        spec_hash=spec.digest(),
        wall_time=time.perf_counter() - t0,
        diverged_at=diverged_at,
        saturation_events=sat,
    )


# -- derived analyses ---------------------------------------------------------------


class ThresholdNotReached(ValueError):
    def __init__(self, label, threshold_db):
        super().__init__(f"curve {label!r} never reaches {threshold_db} dB")
        self.label = label
        self.threshold_db = threshold_db


def first_crossing(curve, threshold_db):
    """Index of the first iteration at or below ``threshold_db``, or None."""
    c = curve.msd_db if isinstance(curve, LearningCurve) else np.asarray(curve)
    hit = np.nonzero(c <= threshold_db)[0]
    return int(hit[0]) if hit.size else None


def speedup(curve_a, curve_b, threshold_db=-20.0):
    """How many times faster ``curve_a`` reaches the threshold than ``curve_b``."""
    ia = first_crossing(curve_a, threshold_db)
    ib = first_crossing(curve_b, threshold_db)
    for i, c in ((ia, curve_a), (ib, curve_b)):
        if i is None:
            raise ThresholdNotReached(getattr(c, "label", ""), threshold_db)
    if ia == ib:
        return 1.0
    return ib / max(ia, 1)


def m_sweep(base: ExperimentSpec, delays, **kw):
    """DMPLMS curves for each adaptation delay; M=0 runs the non-delayed MPLMS."""
    out = {}
    for M in delays:
        algo = "mplms" if M == 0 else "dmplms"
        spec = base.replace(algorithm=algo, delay=M, label=f"M={M}")
        out[M] = run(spec, **kw)
    return out


@dataclass
class FixedFloatComparison:
    float_curve: LearningCurve
    fixed_curve: LearningCurve
    deviation_db: np.ndarray
    saturation_events: int

    @property
    def max_deviation_db(self):
        return float(np.nanmax(np.abs(self.deviation_db))) if self.deviation_db.size else 0.0

    def steady_state_deviation_db(self, fraction=0.1):
        return abs(self.fixed_curve.steady_state_db(fraction) - self.float_curve.steady_state_db(fraction))


def fixed_vs_float(spec: ExperimentSpec, **kw) -> FixedFloatComparison:
    """Run the same stimulus through the floating and the 16-bit datapaths."""
    a = run(spec.replace(arithmetic="float", label=f"{spec.algorithm} float"), **kw)
    b = run(spec.replace(arithmetic="fixed16", label=f"{spec.algorithm} fixed16"), **kw)
    with np.errstate(invalid="ignore"):
        dev = b.msd_db - a.msd_db
    # an all-zero run gives 0/0 in both curves; treat identical NaNs as no deviation
    dev = np.where(np.isnan(a.msd_db) & np.isnan(b.msd_db), 0.0, dev)
    return FixedFloatComparison(a, b, dev, b.saturation_events)
