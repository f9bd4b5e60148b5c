"""Floating-point proportionate-type LMS filters.

All state arrays carry the tap axis last, so a single ``FilterState`` can
hold one filter (shape ``(L,)``) or a batch of independent filters
(shape ``(B, L)``) that are stepped in lock-step. Every operation below is
written so that batch rows never interact.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

GAIN_KINDS = ("identity", "prop_abs", "mulaw_ln", "mulaw_log2")


@dataclass(frozen=True)
class GainPolicy:
    """Gain rule for proportionate adaptation.

    ``kind`` selects F[.]: ``identity`` (plain LMS, every tap gets 1/L),
    ``prop_abs`` (|w|), ``mulaw_ln`` (ln(1 + |w|/xi)) or ``mulaw_log2``
    (log2(1 + |w| 2**k)). ``legacy=True`` switches to the original PNLMS
    max-based gain with the 1/L averaging denominator.
    """

    kind: str = "prop_abs"
    rho: float = 0.01
    xi: float = 0.001
    k: int = 6
    legacy: bool = False
    delta: float = 0.01

    def __post_init__(self):
        if self.kind not in GAIN_KINDS:
            raise ValueError(f"unknown gain kind {self.kind!r}")
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if not self.xi > 0:
            raise ValueError("xi must be positive")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError("k must be a positive integer")
        if self.legacy and not self.delta > 0:
            raise ValueError("delta must be positive on the legacy path")


def eval_F(w, policy: GainPolicy):
    """Per-tap gain function F[|w|] (elementwise, non-negative)."""
    a = np.abs(np.asarray(w, dtype=float))
    if policy.kind == "identity":
        return np.ones_like(a)
    if policy.kind == "prop_abs":
        return a
    if policy.kind == "mulaw_ln":
        return np.log1p(a / policy.xi)
    return np.log2(1.0 + a * 2.0**policy.k)


def compute_gains(weights, policy: GainPolicy):
    """Diagonal of the gain matrix G for the given weights.

    Simplified path: gamma_i = F[|w_i|] + rho, g_i = gamma_i / sum(gamma),
    so the gains sum to one. Legacy PNLMS path: gamma_i = max(rho *
    gamma_min, F_i) with gamma_min = max(delta, max_j F_j), normalised by
    the mean so the gains sum to L.
    """
    w = np.asarray(weights, dtype=float)
    if w.shape[-1] < 1:
        raise ValueError("need at least one tap")
    L = w.shape[-1]
    if policy.kind == "identity":
        return np.full(w.shape, 1.0 / L) if not policy.legacy else np.ones(w.shape)
    F = eval_F(w, policy)
    if policy.legacy:
        gmin = np.maximum(policy.delta, F.max(axis=-1, keepdims=True))
        gamma = np.maximum(policy.rho * gmin, F)
        return gamma / gamma.mean(axis=-1, keepdims=True)
    gamma = F + policy.rho
    return gamma / gamma.sum(axis=-1, keepdims=True)


def _check_power_of_two(L):
    if L < 1 or L & (L - 1):
        raise ValueError(f"filter length must be a power of two, got {L}")


class FilterState:
    """Weights, regressor and delayed-gradient pipeline of an adaptive filter.

    Parameters
    ----------
    num_taps : int
        Filter length L (power of two).
    mu : float
        Step size.
    delay : int
        Adaptation delay M. ``0`` gives the non-delayed algorithms.
    reg : float
        Regularisation delta_p of the normalised updates.
    batch : tuple of int
        Leading batch shape; ``()`` for a single filter.
    """

    def __init__(self, num_taps, mu, delay=0, reg=1e-4, batch=()):
        _check_power_of_two(num_taps)
        if delay < 0:
            raise ValueError("delay must be non-negative")
        if reg < 0:
            raise ValueError("regularisation must be non-negative")
        self.num_taps = int(num_taps)
        self.mu = float(mu)
        self.delay = int(delay)
        self.reg = float(reg)
        self.batch = tuple(batch)
        shape = self.batch + (self.num_taps,)
        self.weights = np.zeros(shape)
        self.regressor = np.zeros(shape)
        self.pipeline = deque()
        self.error = np.zeros(self.batch)
        self.output = np.zeros(self.batch)

    def push(self, x):
        """Shift a new input sample into the regressor (newest first)."""
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise ValueError("non-finite input sample")
        self.regressor[..., 1:] = self.regressor[..., :-1]
        self.regressor[..., 0] = x

    def reset(self):
        self.weights[...] = 0.0
        self.regressor[...] = 0.0
        self.pipeline.clear()


def filter_output(state: FilterState):
    """Inner product of the current weights and regressor."""
    return (state.weights * state.regressor).sum(axis=-1)


def _error(state, d_n):
    d_n = np.asarray(d_n, dtype=float)
    if not np.all(np.isfinite(d_n)):
        raise ValueError("non-finite desired sample")
    y = filter_output(state)
    e = d_n - y
    state.output = y
    state.error = e
    return e


def _apply(state, gain, u, e):
    # shared by the delayed and non-delayed updates so M=0 is bit-identical
    state.weights += state.mu * (gain * u) * e[..., None]


def _delayed_apply(state, gain, u, e):
    state.pipeline.append((gain, u.copy(), np.array(e, copy=True)))
    if len(state.pipeline) > state.delay:
        g_old, u_old, e_old = state.pipeline.popleft()
        _apply(state, g_old, u_old, e_old)


def step_plms(state: FilterState, policy: GainPolicy, d_n):
    """One PLMS iteration, w += mu G(n) u(n) e(n). Returns the error."""
    if state.delay != 0:
        raise ValueError("step_plms requires delay 0; use step_delayed")
    e = _error(state, d_n)
    g = compute_gains(state.weights, policy)
    _apply(state, g, state.regressor, e)
    return e


def step_delayed(state: FilterState, policy: GainPolicy, d_n):
    """Delayed proportionate update using the (g, u, e) snapshot from M steps ago.

    With ``identity`` this is DLMS, ``prop_abs`` gives DPLMS and
    ``mulaw_log2`` gives DMPLMS.
    """
    e = _error(state, d_n)
    g = compute_gains(state.weights, policy)
    _delayed_apply(state, g, state.regressor, e)
    return e


def step_pnlms(state: FilterState, policy: GainPolicy, d_n):
    """Proportionate NLMS step with the weighted-norm denominator u^T G u + delta_p."""
    e = _error(state, d_n)
    g = compute_gains(state.weights, policy)
    u = state.regressor
    gu = g * u
    denom = (gu * u).sum(axis=-1) + state.reg
    state.weights += state.mu * gu * (e / denom)[..., None]
    return e


def step_nlms(state: FilterState, d_n):
    """NLMS step, delayed by ``state.delay`` (DNLMS when M > 0)."""
    e = _error(state, d_n)
    u = state.regressor
    scale = 1.0 / ((u * u).sum(axis=-1) + state.reg)
    _delayed_apply(state, scale[..., None], u, e)
    return e


def step_dwmplms(state: FilterState, policy: GainPolicy, haar, power, d_n):
    """Delayed wavelet-domain MPLMS step.

    ``haar`` is a transform object whose ``u_T`` attribute holds the current
    transformed regressor and whose ``scaling`` gives the per-tap output
    correction; the caller pushes the input sample into it beforehand.
    ``power`` is a :class:`ptlms.wavelet.PowerEstimator`. The filter's own
    regressor is overwritten with ``u_T``.
    """
    from .wavelet import scaled_output

    u_T = haar.u_T
    state.regressor[...] = u_T
    power.update(u_T)
    d_n = np.asarray(d_n, dtype=float)
    y = scaled_output(state.weights, u_T, haar.scaling)
    e = d_n - y
    state.output = y
    state.error = e
    g = compute_gains(state.weights, policy)
    _delayed_apply(state, g, u_T / power.psi, e)
    return e


# ---------------------------------------------------------------------------
# Complexity report


@dataclass
class ComplexityStep:
    name: str
    mult: int
    div: int
    add: int
    cmp: int
    path: dict = field(default_factory=dict)
    # path as printed in the time-complexity table when it differs from `path`
    table_path: dict | None = None


@dataclass
class ComplexityReport:
    algorithm: str
    num_taps: int
    steps: list
    total_path: dict

    def step(self, name):
        for s in self.steps:
            if s.name == name:
                return s
        raise KeyError(name)

    @property
    def totals(self):
        return {
            unit: sum(getattr(s, unit) for s in self.steps)
            for unit in ("mult", "div", "add", "cmp")
        }


def _path(**terms):
    return {k: v for k, v in terms.items() if v}


def _sum_paths(*paths):
    out = {}
    for p in paths:
        for k, v in p.items():
            out[k] = out.get(k, 0) + v
    return out


def format_path(path):
    order = ("T_mult", "T_add", "T_cmp", "T_div", "T_F_eval")
    parts = []
    for unit in order:
        c = path.get(unit, 0)
        if c:
            parts.append(unit if c == 1 else f"{c}*{unit}")
    return " + ".join(parts) or "0"


COMPLEXITY_ALGORITHMS = ("pnlms", "plms", "dlms", "dplms", "dmplms", "dwmplms")


def complexity_report(algorithm, num_taps) -> ComplexityReport:
    """Per-iteration operator counts and critical path.

    ``pnlms`` reproduces the textbook count of the unmodified algorithm
    (every step chained on the critical path). The other entries describe
    the reformulated datapaths: gains without max-search, no weighted
    normalisation, and for the delayed variants a retimed loop whose
    critical path is a single multiplier.
    """
    algorithm = algorithm.lower()
    L = int(num_taps)
    _check_power_of_two(L)
    lg = int(math.log2(L))

    if algorithm == "pnlms":
        steps = [
            ComplexityStep("filter_output", L, 0, L, 0, _path(T_mult=1, T_add=lg)),
            ComplexityStep("weighted_normalization", 2 * L, 0, L, 0, _path(T_mult=2, T_add=1 + lg)),
            ComplexityStep("weight_update", 2 * L, 1, L, 0, _path(T_mult=1, T_add=1)),
            ComplexityStep(
                "gain_calculation", 2, 1, L, 2 * L,
                # the denominator sum of L terms adds an adder tree the table omits
                _path(T_cmp=2 * lg, T_mult=1, T_div=1, T_F_eval=1, T_add=lg),
                table_path=_path(T_cmp=2 * lg, T_mult=1, T_div=1, T_F_eval=1),
            ),
        ]
        total = _sum_paths(*(s.path for s in steps))
        return ComplexityReport(algorithm, L, steps, total)

    if algorithm not in COMPLEXITY_ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")

    proportionate = algorithm != "dlms"
    steps = [ComplexityStep("filter_output", L, 0, L, 0, _path(T_mult=1, T_add=lg))]
    if proportionate:
        # LNS gradient: E is one log subtraction, per-tap exponent sum + antilog
        steps.append(ComplexityStep("weight_update", 0, 0, 3 * L, 0, _path(T_add=2)))
        steps.append(
            ComplexityStep("gain_calculation", 0, 0, L, 0, _path(T_F_eval=1, T_add=lg))
        )
    else:
        steps.append(ComplexityStep("weight_update", L, 0, L, 0, _path(T_mult=1, T_add=1)))
    if algorithm == "dwmplms":
        # three-level sliding un-normalised Haar: six add/sub per sample
        steps.append(ComplexityStep("sliding_haar", 0, 0, 6, 0, _path(T_add=3)))
        steps.append(ComplexityStep("power_normalization", 0, 0, 2 * L, 0, _path(T_add=2)))
    if algorithm.startswith("d"):
        total = _path(T_mult=1)
    else:
        total = _sum_paths(*(s.path for s in steps))
    return ComplexityReport(algorithm, L, steps, total)


def format_complexity_tables(report: ComplexityReport) -> str:
    """Render area and time complexity as two plain-text tables."""
    lines = [f"Area complexity of {report.algorithm.upper()} (L = {report.num_taps})"]
    lines.append(f"{'Step':<26}{'Mult':>8}{'Div':>6}{'Add':>8}{'Cmp':>8}")
    for s in report.steps:
        lines.append(f"{s.name:<26}{s.mult:>8}{s.div:>6}{s.add:>8}{s.cmp:>8}")
    lines.append("")
    lines.append(f"Time complexity of {report.algorithm.upper()} (L = {report.num_taps})")
    lines.append(f"{'Step':<26}Critical path")
    for s in report.steps:
        p = s.table_path if s.table_path is not None else s.path
        lines.append(f"{s.name:<26}{format_path(p)}")
    lines.append(f"{'total':<26}{format_path(report.total_path)}")
    return "\n".join(lines) + "\n"
