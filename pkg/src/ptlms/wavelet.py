"""Wavelet transforms for the transform-domain filter.

Matrix oracles (un-normalised Haar, orthonormal Haar, Sym4, db4, DCT) are
built explicitly; the un-normalised Haar also has a streaming form that
uses only additions, subtractions and register moves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import pywt
import scipy.fft

WAVELET_FAMILIES = ("haar_unnormalized", "haar_orthonormal", "sym4", "db4")


def _filters(family):
    if family == "haar_unnormalized":
        return np.array([1.0, 1.0]), np.array([1.0, -1.0])
    name = {"haar_orthonormal": "haar", "sym4": "sym4", "db4": "db4"}.get(family)
    if name is None:
        raise ValueError(f"unknown wavelet family {family!r}")
    w = pywt.Wavelet(name)
    return np.array(w.rec_lo), np.array(w.rec_hi)


def _single_level(lo, hi, n):
    """One analysis stage on n points: n/2 lowpass rows then n/2 highpass rows.

    Row k carries the filter starting at column 2k and wraps circularly past
    the last column.
    """
    if len(lo) > n:
        raise ValueError(f"filter of length {len(lo)} does not fit {n} points")
    T = np.zeros((n, n))
    half = n // 2
    for k in range(half):
        for j, (a, b) in enumerate(zip(lo, hi)):
            col = (2 * k + j) % n
            T[k, col] += a
            T[half + k, col] += b
    return T


@dataclass(frozen=True)
class DwtMatrix:
    T: np.ndarray
    family: str
    levels: int

    @property
    def size(self):
        return self.T.shape[0]


def build_dwt_matrix(family, L, levels) -> DwtMatrix:
    """Multi-level DWT matrix with rows ordered [approx, coarsest detail, ..., finest detail].

    Each extra level left-multiplies by ``blockdiag(T_{L/2^j}, I)``.
    """
    if L < 2 or L & (L - 1):
        raise ValueError("L must be a power of two")
    max_levels = int(math.log2(L))
    if not 0 <= levels <= max_levels:
        raise ValueError(f"levels must be in [0, {max_levels}] for L={L}")
    lo, hi = _filters(family)
    T = np.eye(L)
    n = L
    for _ in range(levels):
        stage = np.eye(L)
        stage[:n, :n] = _single_level(lo, hi, n)
        T = stage @ T
        n //= 2
    return DwtMatrix(T, family, levels)


def dct_matrix(L):
    """Orthonormal DCT-II matrix."""
    return scipy.fft.dct(np.eye(L), type=2, norm="ortho", axis=0)


def scaling_diag(L, levels):
    """Row energies of the un-normalised Haar matrix and the matching right shifts.

    Returns ``(diag, shifts)`` where ``diag[i] = 2**shifts[i]``; the top
    approximation and top detail bands get ``2**levels``, a level-j detail
    band gets ``2**j``.
    """
    if levels < 0 or L % (1 << levels):
        raise ValueError(f"{levels} levels need L divisible by {1 << levels}")
    shifts = np.empty(L, dtype=int)
    if levels == 0:
        shifts[:] = 0
        return np.ones(L), shifts
    top = L >> levels
    shifts[: 2 * top] = levels
    start = 2 * top
    for j in range(levels - 1, 0, -1):
        width = L >> j
        shifts[start : start + width] = j
        start += width
    return np.ldexp(1.0, shifts), shifts


def scaled_output(w_T, u_T, scaling):
    """Transform-domain output sum_i w_T,i u_T,i / s_i.

    Taps are grouped by their scale factor and each group's partial sum is
    divided once, mirroring right-shifted adder-tree branches.
    """
    s = np.asarray(scaling)
    prod = np.asarray(w_T) * np.asarray(u_T)
    levels = np.unique(s)
    if levels.size == 1:
        return prod.sum(axis=-1) / levels[0]
    y = 0.0
    for lv in levels:
        y = y + prod[..., s == lv].sum(axis=-1) / lv
    return y


def weight_error_energy(w_T, target_T, scaling):
    """Time-domain ||w - h||^2 computed from transform-domain quantities.

    Valid for row-orthogonal transforms with T T^T = diag(scaling).
    """
    diff = np.asarray(w_T) - np.asarray(target_T)
    return (diff * diff / scaling).sum(axis=-1)


class SlidingHaarState:
    """Streaming 3-level un-normalised Haar transform.

    Each pushed sample updates one level-1 pair sum/difference, one level-2
    and one level-3 sum/difference (six additions in total). Even and odd
    samples feed two independent register banks, so every band is read out
    of the bank belonging to the current phase. Works on float or integer
    samples, and on a leading batch shape.
    """

    levels = 3

    def __init__(self, L, batch=(), dtype=float):
        if L < 8 or L % 8:
            raise ValueError("L must be a positive multiple of 8")
        self.L = L
        self.batch = tuple(batch)
        self.dtype = dtype
        self.phase = 0
        self.scaling, self.shifts = scaling_diag(L, 3)
        b = self.batch
        # previous raw sample, per-phase histories (index 0 = newest)
        self._prev = np.zeros(b, dtype)
        self._a = np.zeros((2,) + b + (2,), dtype)       # a(m), a(m-2) via phase bank
        self._a2 = np.zeros((2,) + b + (3,), dtype)      # a2(m), a2(m-4)
        self._d1 = np.zeros((2,) + b + (L // 2,), dtype)
        self._d2 = np.zeros((2,) + b + (L // 2,), dtype)
        self._d3 = np.zeros((2,) + b + (L // 2,), dtype)
        self._a3 = np.zeros((2,) + b + (L // 2,), dtype)
        self.u_T = np.zeros(b + (L,), dtype)

    @staticmethod
    def _shift_in(line, value):
        line[..., 1:] = line[..., :-1]
        line[..., 0] = value

    def push(self, u_n):
        u_n = np.asarray(u_n, dtype=self.dtype)
        p = self.phase
        a = u_n + self._prev
        d1 = u_n - self._prev
        self._prev = u_n.copy()
        a_prev = self._a[p][..., 0]          # a(m-2): same phase, one slot back
        a2 = a + a_prev
        d2 = a - a_prev
        self._shift_in(self._a[p], a)
        a2_prev = self._a2[p][..., 1]        # a2(m-4): same phase, two slots back
        a3 = a2 + a2_prev
        d3 = a2 - a2_prev
        self._shift_in(self._a2[p], a2)
        self._shift_in(self._d1[p], d1)
        self._shift_in(self._d2[p], d2)
        self._shift_in(self._d3[p], d3)
        self._shift_in(self._a3[p], a3)

        L = self.L
        t = L // 8
        out = self.u_T
        out[..., :t] = self._a3[p][..., ::4][..., :t]
        out[..., t : 2 * t] = self._d3[p][..., ::4][..., :t]
        out[..., 2 * t : 4 * t] = self._d2[p][..., ::2][..., : 2 * t]
        out[..., 4 * t :] = self._d1[p]
        self.phase ^= 1
        return out


class MatrixTransform:
    """Sliding-window transform computed by a full matrix product each sample.

    Same interface as :class:`SlidingHaarState`; used for the Sym4/db4 and
    DCT comparisons where no cheap streaming form exists.
    """

    def __init__(self, T, scaling=None, batch=()):
        self.T = np.asarray(T, dtype=float)
        self.L = self.T.shape[0]
        self.batch = tuple(batch)
        self.window = np.zeros(self.batch + (self.L,))
        self.scaling = np.ones(self.L) if scaling is None else np.asarray(scaling, dtype=float)
        self.u_T = np.zeros(self.batch + (self.L,))

    def push(self, u_n):
        self.window[..., 1:] = self.window[..., :-1]
        self.window[..., 0] = u_n
        self.u_T = self.window @ self.T.T
        return self.u_T


def make_transform(family, L, levels=3, batch=()):
    """Streaming transform for a filter: sliding form for 3-level Haar, matrix otherwise."""
    if family == "haar_unnormalized" and levels == 3:
        return SlidingHaarState(L, batch=batch)
    if family == "dct":
        return MatrixTransform(dct_matrix(L), batch=batch)
    m = build_dwt_matrix(family, L, levels)
    scaling = scaling_diag(L, levels)[0] if family == "haar_unnormalized" else None
    return MatrixTransform(m.T, scaling, batch=batch)


PSI_FLOOR = 2.0**-8


class PowerEstimator:
    """Per-tap power estimate of the transformed input.

    ``mode='abs'`` tracks beta*psi + (1-beta)|u_T| (the multiplier-free
    form); ``mode='square'`` uses u_T**2. The estimate is clamped at
    ``floor`` so the per-tap division is always defined.
    """

    def __init__(self, L, beta=0.125, mode="abs", floor=PSI_FLOOR, batch=()):
        if not 0 < beta < 1:
            raise ValueError("beta must lie in (0, 1)")
        if mode not in ("abs", "square"):
            raise ValueError("mode must be 'abs' or 'square'")
        self.beta = beta
        self.mode = mode
        self.floor = floor
        self.psi = np.full(tuple(batch) + (L,), floor)

    def update(self, u_T):
        u_T = np.asarray(u_T)
        x = np.abs(u_T) if self.mode == "abs" else u_T * u_T
        self.psi = np.maximum(self.beta * self.psi + (1.0 - self.beta) * x, self.floor)
        return self.psi


def power_update(est: PowerEstimator, u_T):
    est.update(u_T)
    return est
