"""Test signals, unknown echo paths and the sparseness measure.

Random streams come from numpy's PCG64 generator (``np.random.default_rng``)
so that a seed reproduces the same samples on every platform.
"""

from __future__ import annotations

import math
import wave
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SAMPLE_RATE = 8000

SYSTEM_TARGETS = {"sparse": 0.8960, "semi_sparse": 0.5560, "dispersive": 0.3486}
SYSTEM_BAND = 0.03


def sparseness(h):
    """Norm-ratio sparseness, 1 for a single tap and 0 for a flat response.

    The two extremes are detected directly so they come out exact; in
    between, rounding can push the formula a few ulps outside [0, 1], so
    the result is clipped.
    """
    h = np.asarray(h, dtype=float)
    L = h.shape[-1]
    if L < 2:
        raise ValueError("sparseness needs at least two taps")
    a = np.abs(h)
    n2 = np.linalg.norm(h, axis=-1)
    if np.any(n2 == 0):
        raise ValueError("sparseness of a zero vector is undefined")
    sq = math.sqrt(L)
    s = (sq - a.sum(axis=-1) / n2) / (sq - 1.0)
    s = np.where(np.count_nonzero(a, axis=-1) == 1, 1.0, s)
    s = np.where((a == a[..., :1]).all(axis=-1), 0.0, s)
    s = np.clip(s, 0.0, 1.0)
    return float(s) if s.ndim == 0 else s


@dataclass
class SystemModel:
    h: np.ndarray
    label: str = "custom"
    sparseness: float = field(init=False)

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=float)
        self.sparseness = float(sparseness(self.h))

    @property
    def num_taps(self):
        return self.h.size


def _decaying_response(L, tau, delay, noise):
    n = np.arange(L - delay)
    h = np.zeros(L)
    h[delay:] = noise[: L - delay] * np.exp(-n / tau)
    return h


def gen_system(L=512, profile="sparse", seed=0, band=SYSTEM_BAND, norm=1.0) -> SystemModel:
    """Random echo path with an exponentially decaying envelope.

    A bulk delay is drawn, then the decay constant is bisected (on a log
    scale) until the sparseness lands within ``band`` of the profile target.
    The response is scaled to unit l2 norm times ``norm``.
    """
    if profile not in SYSTEM_TARGETS:
        raise ValueError(f"unknown system profile {profile!r}")
    target = SYSTEM_TARGETS[profile]
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(L)
    delay = int(rng.integers(0, L // 8)) if profile == "sparse" else int(rng.integers(0, L // 32))
    lo, hi = math.log(0.5), math.log(50.0 * L)
    h = None
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        h = _decaying_response(L, math.exp(mid), delay, noise)
        s = sparseness(h)
        if abs(s - target) <= band / 4:
            break
        if s > target:
            lo = mid
        else:
            hi = mid
    if abs(sparseness(h) - target) > band:
        raise ValueError(f"could not reach sparseness {target} +/- {band} for profile {profile!r}")
    h *= norm / np.linalg.norm(h)
    return SystemModel(h, profile)


def block_system(L=512, active=64, decay=None, start=0):
    """``active`` consecutive nonzero taps starting at ``start``.

    Equal magnitudes when ``decay`` is None, otherwise geometrically decaying
    by ``decay`` per tap.
    """
    h = np.zeros(L)
    r = 1.0 if decay is None else decay
    h[start : start + active] = r ** np.arange(active)
    return SystemModel(h / np.linalg.norm(h), f"block{active}")


def load_impulse_response(path) -> SystemModel:
    """Plain text impulse response, one coefficient per line ('#' comments allowed)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    h = np.loadtxt(path, comments="#", ndmin=1)
    return SystemModel(h, path.stem)


def shift_system(h, k) -> SystemModel:
    """Delay the impulse response by ``k`` taps, dropping the tail."""
    if isinstance(h, SystemModel):
        label, h = h.label, h.h
    else:
        label = "shifted"
    h = np.asarray(h, dtype=float)
    L = h.size
    if not 0 <= k < L:
        raise ValueError(f"shift must satisfy 0 <= k < {L}")
    out = np.zeros(L)
    out[k:] = h[: L - k]
    return SystemModel(out, label)


@dataclass
class SignalSource:
    """Input signal description.

    ``kind`` is ``white``, ``ar1``, ``speech`` (synthetic speech-like test
    signal) or ``file`` (8 kHz mono 16-bit WAV or a text file of samples).
    """

    kind: str = "white"
    variance: float = 1.0
    pole: float = 0.95
    seed: int = 0
    path: str | None = None
    samples: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("white", "ar1", "speech", "file"):
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.kind == "ar1" and not abs(self.pole) < 1:
            raise ValueError("AR(1) pole must lie inside the unit circle")
        if self.variance <= 0:
            raise ValueError("variance must be positive")


def read_wav(path):
    with wave.open(str(path), "rb") as fh:
        if fh.getnchannels() != 1 or fh.getsampwidth() != 2:
            raise ValueError("expected mono 16-bit PCM")
        if fh.getframerate() != SAMPLE_RATE:
            raise ValueError(f"expected {SAMPLE_RATE} Hz, got {fh.getframerate()}")
        data = np.frombuffer(fh.readframes(fh.getnframes()), dtype="<i2")
    return data.astype(float) / 32768.0


def write_wav(path, x):
    pcm = np.clip(np.round(np.asarray(x) * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(SAMPLE_RATE)
        fh.writeframes(pcm.tobytes())


def _ar1(white, pole):
    from scipy.signal import lfilter

    # scale the driving noise so the stationary variance matches the white input
    return lfilter([math.sqrt(1.0 - pole * pole)], [1.0, -pole], white, axis=-1)


def speech_like(n, rng, variance=1.0):
    """Amplitude-modulated AR(2) signal with syllable-rate bursts.

    The envelope dips to a quarter of its peak between bursts rather than to
    silence, which keeps the input power bounded away from zero.
    """
    from scipy.signal import lfilter

    t = np.arange(n) / SAMPLE_RATE
    # formant-ish resonance around 500 Hz
    r, f0 = 0.9, 500.0
    a = [1.0, -2 * r * math.cos(2 * math.pi * f0 / SAMPLE_RATE), r * r]
    voiced = lfilter([1.0], a, rng.standard_normal(n))
    rate = 4.0 + rng.uniform(-0.5, 0.5)
    env = 0.25 + np.sin(2 * math.pi * rate * t + rng.uniform(0, 2 * math.pi)) ** 2
    env *= 0.6 + 0.4 * np.abs(np.sin(2 * math.pi * 0.7 * t))
    x = voiced * env
    return x * math.sqrt(variance / np.mean(x * x))


def gen_input(source: SignalSource, n, trial=0):
    """``n`` samples from the source; random kinds use seed ``source.seed + trial``."""
    if source.kind == "file":
        if source.samples is None:
            if source.path is None:
                raise ValueError("file source needs a path")
            p = Path(source.path)
            if not p.exists():
                raise FileNotFoundError(p)
            source.samples = read_wav(p) if p.suffix.lower() == ".wav" else np.loadtxt(p, ndmin=1)
        if source.samples.size < n:
            raise ValueError(f"file holds {source.samples.size} samples, {n} requested")
        return np.array(source.samples[:n], dtype=float)
    rng = np.random.default_rng(source.seed + trial)
    if source.kind == "speech":
        return speech_like(n, rng, source.variance)
    white = rng.standard_normal(n) * math.sqrt(source.variance)
    if source.kind == "white":
        return white
    return _ar1(white, source.pole)


def echo(h, x):
    """Noise-free echo h^T u(n) with a zero history before the first sample."""
    return np.convolve(np.asarray(x), np.asarray(h))[: len(x)]


def observe(h, x, enr_db, rng=None, seed=None):
    """Desired signal d = h^T u + v with white noise at the requested echo-to-noise ratio.

    ``enr_db=None`` or ``inf`` disables the noise. Returns ``(d, v)``.
    """
    h = h.h if isinstance(h, SystemModel) else h
    y = echo(h, x)
    if enr_db is None or math.isinf(enr_db):
        return y, np.zeros_like(y)
    p = np.mean(y * y)
    if p == 0:
        raise ValueError("echo power is zero; ENR is undefined")
    if rng is None:
        rng = np.random.default_rng(seed)
    v = rng.standard_normal(len(y)) * math.sqrt(p / 10.0 ** (enr_db / 10.0))
    return y + v, v
