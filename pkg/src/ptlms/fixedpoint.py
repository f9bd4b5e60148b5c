"""Bit-accurate 16-bit model of the delayed proportionate datapath.

Word formats:

* input samples, desired signal and weights: Q1.14
* error and per-tap gains gamma = F + rho: Q3.12
* log-domain values: Q5.10 (``LNS_FRAC`` fraction bits)

Adder-tree outputs (filter output, sum of gains, transformed input, power
estimates) are kept at full width as in a hardware accumulator and only
rounded where they re-enter a 16-bit register.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .afcore import GainPolicy
from .lns import (
    LNS_FRAC,
    Q1_14,
    Q3_12,
    QFormat,
    QNum,
    SaturationCounter,
    compute_E,
    mitchell_antilog2_raw,
    mitchell_log2_raw,
    quantize,
    requantize,
    saturate,
)
from .wavelet import PSI_FLOOR, SlidingHaarState

SIGNAL_FMT = Q1_14
ERROR_FMT = Q3_12
GAIN_FMT = Q3_12


def mu_format(mu):
    """Format with the most fraction bits that still holds ``mu``."""
    for m in range(0, 16):
        if mu < 2**m - 2.0 ** -(15 - m):
            return QFormat(m, 15 - m)
    raise ValueError(f"step size {mu} does not fit a 16-bit word")


class FixedPointFilter:
    """Delayed PLMS / MPLMS (optionally wavelet-domain) on 16-bit words.

    Parameters
    ----------
    num_taps : int
    mu : float
        Step size, quantized to :func:`mu_format`.
    policy : GainPolicy
        ``identity``, ``prop_abs`` or ``mulaw_log2``.
    delay : int
        Adaptation delay M.
    transform : None or "haar"
        ``"haar"`` inserts the 3-level sliding un-normalised Haar transform
        and the shift-only power normalisation with beta = 1/8.
    batch : tuple
        Leading batch shape.
    """

    def __init__(self, num_taps, mu, policy: GainPolicy, delay=0, transform=None, batch=()):
        if policy.kind not in ("identity", "prop_abs", "mulaw_log2"):
            raise ValueError(f"no fixed-point datapath for gain kind {policy.kind!r}")
        if transform not in (None, "haar"):
            raise ValueError(f"unsupported transform {transform!r}")
        self.L = int(num_taps)
        self.policy = policy
        self.delay = int(delay)
        self.transform = transform
        self.batch = tuple(batch)
        self.counter = SaturationCounter()
        self.mu = quantize(mu, mu_format(mu), self.counter)
        self.rho_raw = quantize(policy.rho, GAIN_FMT, self.counter).raw
        shape = self.batch + (self.L,)
        self.w = np.zeros(shape, dtype=np.int64)
        self.u = np.zeros(shape, dtype=np.int64)
        self.pipeline = deque()
        self.e = np.zeros(self.batch, dtype=np.int64)
        if transform == "haar":
            self.haar = SlidingHaarState(self.L, batch=self.batch, dtype=np.int64)
            self.shifts = self.haar.shifts
            self.psi_floor = int(round(PSI_FLOOR * 2**SIGNAL_FMT.frac_bits))
            self.psi = np.full(shape, self.psi_floor, dtype=np.int64)

    @property
    def weights(self):
        return self.w * SIGNAL_FMT.lsb

    def _gamma(self):
        a = np.abs(self.w)
        kind = self.policy.kind
        if kind == "identity":
            F = np.full(a.shape, 1 << GAIN_FMT.frac_bits, dtype=np.int64)
        elif kind == "prop_abs":
            F = a >> (SIGNAL_FMT.frac_bits - GAIN_FMT.frac_bits)
        else:
            # log2(1 + |w| 2^k): shift, prepend the one, leading-one detect
            arg = (1 << SIGNAL_FMT.frac_bits) + (a << self.policy.k)
            _, F, _ = mitchell_log2_raw(arg, SIGNAL_FMT.frac_bits, GAIN_FMT.frac_bits)
        return saturate(F + self.rho_raw, GAIN_FMT, self.counter)

    def _output(self, x):
        if self.transform is None:
            self.u[..., 1:] = self.u[..., :-1]
            self.u[..., 0] = x
            return (self.w * self.u).sum(axis=-1)
        u_T = self.haar.push(x)
        self.u = u_T.copy()
        a = np.abs(u_T)
        self.psi = np.maximum((self.psi >> 3) + a - (a >> 3), self.psi_floor)
        prod = self.w * u_T
        acc = 0
        for s in np.unique(self.shifts):
            acc = acc + (prod[..., self.shifts == s].sum(axis=-1) >> int(s))
        return acc

    def prime(self, x_raw):
        """Shift a sample into the regressor (and transform) without adapting."""
        self._output(np.asarray(x_raw, dtype=np.int64))

    def step(self, x_raw, d_raw):
        """Advance one sample. ``x_raw`` and ``d_raw`` are Q1.14 raw words."""
        fs = SIGNAL_FMT.frac_bits
        acc = self._output(np.asarray(x_raw, dtype=np.int64))
        e_wide = (np.asarray(d_raw, dtype=np.int64) << fs) - acc
        e = requantize(e_wide, 2 * fs, ERROR_FMT, self.counter)
        e = np.asarray(e, dtype=np.int64)
        self.e = e

        gamma = self._gamma()
        sum_gamma = gamma.sum(axis=-1)
        _, log_g, _ = mitchell_log2_raw(gamma, GAIN_FMT.frac_bits)
        sign_u, log_u, zero_u = mitchell_log2_raw(self.u, fs)
        tap = log_g + log_u
        if self.transform == "haar":
            _, log_psi, _ = mitchell_log2_raw(self.psi, fs)
            tap = tap - log_psi
        self.pipeline.append((tap, sign_u, zero_u, e, sum_gamma))
        if len(self.pipeline) > self.delay:
            self._update(*self.pipeline.popleft())
        return e

    def _update(self, tap, sign_u, zero_u, e, sum_gamma):
        E = compute_E(self.mu, QNum(e, ERROR_FMT), QNum(sum_gamma, GAIN_FMT)).E
        expo = np.asarray(E.logmag)[..., None] + tap
        mag = mitchell_antilog2_raw(expo, LNS_FRAC, SIGNAL_FMT.frac_bits)
        mag = saturate(mag, SIGNAL_FMT, self.counter)
        neg = (np.asarray(E.sign) < 0)[..., None] ^ (sign_u < 0)
        zero = np.asarray(E.zero)[..., None] | zero_u
        delta = np.where(zero, 0, np.where(neg, -mag, mag))
        self.w = np.asarray(saturate(self.w + delta, SIGNAL_FMT, self.counter), dtype=np.int64)
