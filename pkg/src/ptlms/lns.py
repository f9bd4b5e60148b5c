"""16-bit fixed-point numbers and Mitchell logarithmic arithmetic.

Raw values are Python ints or numpy int64 arrays; every function here is
vectorised over raw arrays so a whole tap vector (or a batch of them) can
be converted in one call. Log-domain magnitudes are fixed-point numbers
with ``LNS_FRAC`` fraction bits.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

WORD_BITS = 16
LNS_FRAC = 10


@dataclass(frozen=True)
class QFormat:
    """Signed Q(m.f) format, m + f = 15 for a 16-bit word."""

    int_bits: int
    frac_bits: int

    def __post_init__(self):
        if self.int_bits < 0 or self.frac_bits < 0:
            raise ValueError("bit counts must be non-negative")
        if self.int_bits + self.frac_bits != WORD_BITS - 1:
            raise ValueError("format must fill a 16-bit signed word")

    @property
    def lsb(self):
        return 2.0**-self.frac_bits

    @property
    def max_raw(self):
        return (1 << (WORD_BITS - 1)) - 1

    @property
    def min_raw(self):
        return -(1 << (WORD_BITS - 1))

    def __str__(self):
        return f"Q{self.int_bits}.{self.frac_bits}"


Q0_15 = QFormat(0, 15)
Q1_14 = QFormat(1, 14)
Q3_12 = QFormat(3, 12)
Q4_11 = QFormat(4, 11)
Q5_10 = QFormat(5, 10)


class SaturationCounter:
    """Counts values clamped at a format bound."""

    def __init__(self):
        self.events = 0

    def __int__(self):
        return self.events

    def __repr__(self):
        return f"SaturationCounter({self.events})"


def saturate(raw, fmt: QFormat, counter: SaturationCounter | None = None):
    raw = np.asarray(raw, dtype=np.int64)
    if counter is not None:
        counter.events += int(np.count_nonzero((raw > fmt.max_raw) | (raw < fmt.min_raw)))
    out = np.clip(raw, fmt.min_raw, fmt.max_raw)
    return out if out.ndim else int(out)


@dataclass
class QNum:
    raw: object
    fmt: QFormat

    @property
    def value(self):
        v = np.asarray(self.raw, dtype=float) * self.fmt.lsb
        return v if v.ndim else float(v)


def quantize(x, fmt: QFormat, counter: SaturationCounter | None = None) -> QNum:
    """Round to nearest (ties to even) and saturate."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("cannot quantize non-finite values")
    raw = np.rint(np.ldexp(x, fmt.frac_bits)).astype(np.int64)
    return QNum(saturate(raw, fmt, counter), fmt)


def requantize(raw, from_frac, fmt: QFormat, counter=None, rounding="nearest"):
    """Move a raw value with ``from_frac`` fraction bits into ``fmt``."""
    raw = np.asarray(raw, dtype=np.int64)
    shift = from_frac - fmt.frac_bits
    if shift > 0:
        if rounding == "nearest":
            raw = (raw + (1 << (shift - 1))) >> shift
        else:
            raw = raw >> shift
    elif shift < 0:
        raw = raw << -shift
    return saturate(raw, fmt, counter)


def _msb(mag):
    """Index of the leading one of each positive integer (float path is exact below 2**53)."""
    _, e = np.frexp(np.asarray(mag, dtype=np.float64))
    return e.astype(np.int64) - 1


@dataclass
class LnsValue:
    """Sign and Mitchell log2-magnitude.

    ``logmag`` is a raw fixed-point value with ``frac_bits`` fraction bits;
    its content is meaningless where ``zero`` is set.
    """

    sign: object
    logmag: object
    zero: object
    frac_bits: int = LNS_FRAC

    @property
    def log2(self):
        return np.asarray(self.logmag, dtype=float) / (1 << self.frac_bits)


def mitchell_log2_raw(raw, frac_bits, lns_frac=LNS_FRAC):
    """Mitchell log of raw fixed-point integers of any width.

    Leading-one detection gives the characteristic, and the ``lns_frac`` bits
    just below the leading one (truncated) are taken as log2(1 + x) ~ x.
    Returns ``(sign, logmag_raw, zero)``.
    """
    raw = np.asarray(raw, dtype=np.int64)
    sign = np.where(raw < 0, -1, 1)
    mag = np.abs(raw)
    zero = mag == 0
    safe = np.where(zero, 1, mag)
    p = _msb(safe)
    mask = (1 << lns_frac) - 1
    down = np.maximum(p - lns_frac, 0)
    up = np.maximum(lns_frac - p, 0)
    frac = ((safe >> down) << up) & mask
    logmag = ((p - frac_bits) << lns_frac) + frac
    logmag = np.where(zero, 0, logmag)
    if raw.ndim == 0:
        return int(sign), int(logmag), bool(zero)
    return sign, logmag, zero


def log2_mitchell(q: QNum, lns_frac=LNS_FRAC) -> LnsValue:
    sign, logmag, zero = mitchell_log2_raw(q.raw, q.fmt.frac_bits, lns_frac)
    return LnsValue(sign, logmag, zero, lns_frac)


def mitchell_antilog2_raw(logmag, lns_frac, out_frac):
    """Magnitude (1 + x) 2**k as a raw integer with ``out_frac`` fraction bits.

    Bits shifted out on the right are truncated, so exponents below
    ``-out_frac`` flush to zero. No saturation is applied here.
    """
    logmag = np.asarray(logmag, dtype=np.int64)
    k = logmag >> lns_frac
    frac = logmag & ((1 << lns_frac) - 1)
    mant = (1 << lns_frac) + frac
    shift = k + out_frac - lns_frac
    # clamp shift range; anything beyond int64 is handled by saturation upstream
    left = np.clip(shift, 0, 62 - lns_frac)
    right = np.clip(-shift, 0, 63)
    mag = (mant << left) >> right
    return mag if mag.ndim else int(mag)


def antilog2_mitchell(l: LnsValue, fmt: QFormat, counter=None) -> QNum:
    """Back to fixed point: barrel-shift 1.x by the characteristic, then saturate."""
    mag = mitchell_antilog2_raw(l.logmag, l.frac_bits, fmt.frac_bits)
    mag = saturate(mag, fmt, counter)
    raw = np.where(np.asarray(l.zero), 0, np.asarray(l.sign) * mag)
    return QNum(raw if raw.ndim else int(raw), fmt)


@dataclass
class EQuantity:
    """Shared log-domain factor log2(mu |e| / sum gamma) with the sign of e."""

    E: LnsValue


def compute_E(mu: QNum, e_delayed: QNum, sumF: QNum, lns_frac=LNS_FRAC) -> EQuantity:
    """E = log2m(mu |e|) - log2m(sumF).

    The product mu |e| is kept at full multiplier width, and ``sumF`` may be
    a wide adder-tree result, so neither is rounded before the leading-one
    detector.
    """
    e_raw = np.asarray(e_delayed.raw, dtype=np.int64)
    prod = np.asarray(mu.raw, dtype=np.int64) * np.abs(e_raw)
    _, lp, zp = mitchell_log2_raw(prod, mu.fmt.frac_bits + e_delayed.fmt.frac_bits, lns_frac)
    _, ls, zs = mitchell_log2_raw(sumF.raw, sumF.fmt.frac_bits, lns_frac)
    if np.any(zs):
        raise ValueError("sum of gains must be positive")
    sign = np.where(e_raw < 0, -1, 1)
    logmag = np.asarray(lp) - np.asarray(ls)
    zero = np.asarray(zp)
    if e_raw.ndim == 0:
        return EQuantity(LnsValue(int(sign), int(logmag), bool(zero), lns_frac))
    return EQuantity(LnsValue(sign, logmag, zero, lns_frac))


def lns_gradient(E: EQuantity, logF_w: LnsValue, log_u: LnsValue, sign_u=None,
                 logPsi: LnsValue | None = None, fmt: QFormat = Q1_14, counter=None) -> QNum:
    """Per-tap update 2**(E + log2 F + log2|u| - log2 psi) with sign(e) XOR sign(u)."""
    Ev = E.E
    f = Ev.frac_bits
    if sign_u is None:
        sign_u = log_u.sign
    expo = np.asarray(Ev.logmag) + np.asarray(logF_w.logmag) + np.asarray(log_u.logmag)
    zero = np.asarray(Ev.zero) | np.asarray(logF_w.zero) | np.asarray(log_u.zero)
    if logPsi is not None:
        expo = expo - np.asarray(logPsi.logmag)
        zero = zero | np.asarray(logPsi.zero)
    mag = mitchell_antilog2_raw(expo, f, fmt.frac_bits)
    mag = saturate(mag, fmt, counter)
    neg = (np.asarray(Ev.sign) < 0) ^ (np.asarray(sign_u) < 0)
    raw = np.where(zero, 0, np.where(neg, -np.asarray(mag), mag))
    return QNum(raw if raw.ndim else int(raw), fmt)


def dump_words(path, columns: dict):
    """Write raw 16-bit words per sample as CSV, one column per named signal."""
    names = list(columns)
    arrays = [np.asarray(columns[n]).reshape(len(columns[n]), -1) for n in names]
    header = []
    for n, a in zip(names, arrays):
        header += [n] if a.shape[1] == 1 else [f"{n}[{i}]" for i in range(a.shape[1])]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for rows in zip(*arrays):
            w.writerow([int(v) for r in rows for v in r])
