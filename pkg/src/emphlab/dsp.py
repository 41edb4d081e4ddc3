"""Windowing, lag-0/lag-1 autocorrelation and stateful first-order emphasis filters.

The filters process one frame at a time and carry a one-sample memory
(:class:`FilterState`) across calls, so a stream can be cut into frames with a
different coefficient in each frame and still be inverted exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

# r0 below this (squared-amplitude units) is treated as silence
SILENCE_FLOOR = 1e-30


class UnstableFilterError(ValueError):
    """Raised when a de-emphasis tap would make the IIR filter unstable."""


@dataclass(frozen=True)
class FrameConfig:
    """Frame and analysis-window geometry, all lengths in samples."""

    sample_rate_hz: int = 16000
    frame_len: int = 160
    window_len: int = 480
    lookahead_len: int = 160

    def __post_init__(self):
        if self.sample_rate_hz <= 0 or self.frame_len <= 0 or self.window_len <= 0:
            raise ValueError("sample rate, frame and window lengths must be positive")
        if self.lookahead_len < 0:
            raise ValueError("lookahead_len must be non-negative")
        if self.window_len < self.frame_len:
            raise ValueError("window_len must be >= frame_len")
        if self.lookahead_len > self.window_len - self.frame_len:
            raise ValueError("lookahead_len must be <= window_len - frame_len")

    @classmethod
    def from_ms(cls, sample_rate_hz: int = 16000, frame_ms: float = 10.0,
                window_ms: float = 30.0, lookahead_ms: float = 10.0) -> "FrameConfig":
        def n(ms):
            return int(round(ms * sample_rate_hz / 1000.0))

        return cls(sample_rate_hz, n(frame_ms), n(window_ms), n(lookahead_ms))

    def n_frames(self, n_samples: int) -> int:
        """Number of whole frames in a signal of ``n_samples``."""
        return n_samples // self.frame_len

    def analysis_bounds(self, frame_index: int) -> tuple[int, int]:
        """Sample range ``[start, stop)`` of the analysis window for a frame.

        The window ends ``lookahead_len`` samples after the frame ends, so with
        the default geometry it covers previous frame, current frame and one
        frame of look-ahead. Bounds may fall outside the signal.
        """
        stop = (frame_index + 1) * self.frame_len + self.lookahead_len
        return stop - self.window_len, stop


@dataclass(frozen=True)
class AutocorrPair:
    """Lag-0 and lag-1 autocorrelation sums; ``ratio`` is None on silence."""

    r0: float
    r1: float
    ratio: float | None

    @property
    def silent(self) -> bool:
        return self.ratio is None


@dataclass(frozen=True)
class EmphasisCoeff:
    """Filter weight ``gamma`` times AR coefficient ``alpha`` gives the filter tap."""

    gamma: float
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")
        if not -1.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (-1, 1), got {self.alpha}")

    @property
    def tap(self) -> float:
        return self.gamma * self.alpha


@dataclass(frozen=True)
class FilterState:
    prev_input: float = 0.0
    prev_output: float = 0.0


def make_window(kind: str, length: int) -> np.ndarray:
    """Symmetric Hanning or rectangular analysis window."""
    if length < 2:
        raise ValueError(f"window length must be >= 2, got {length}")
    if kind == "rectangular":
        return np.ones(length)
    if kind == "hanning":
        n = np.arange(length)
        w = 0.5 * (1.0 - np.cos(2.0 * np.pi * n / (length - 1)))
        # exact symmetry; cos() rounding differs slightly between n and N-1-n
        return 0.5 * (w + w[::-1])
    raise ValueError(f"unknown window kind {kind!r}")


def autocorr_01(samples, window) -> AutocorrPair:
    x = np.asarray(samples, dtype=float)
    w = np.asarray(window, dtype=float)
    if x.shape != w.shape or x.ndim != 1:
        raise ValueError(f"samples and window must be 1-D of equal length, "
                         f"got {x.shape} and {w.shape}")
    if x.size < 2:
        raise ValueError("need at least 2 samples")
    y = x * w
    r0 = float(np.dot(y, y))
    r1 = float(np.dot(y[1:], y[:-1]))
    if r0 <= SILENCE_FLOOR:
        return AutocorrPair(r0, r1, None)
    return AutocorrPair(r0, r1, r1 / r0)


def pre_emphasize(frame, tap: float, state: FilterState = FilterState()):
    """FIR pre-emphasis ``d(n) = x(n) - tap * x(n-1)``.

    Returns the filtered frame and the state to pass to the next call.
    """
    if abs(tap) > 1.0:
        raise ValueError(f"pre-emphasis tap must satisfy |tap| <= 1, got {tap}")
    x = np.asarray(frame, dtype=float)
    if x.size == 0:
        return x.copy(), state
    delayed = np.empty_like(x)
    delayed[0] = state.prev_input
    delayed[1:] = x[:-1]
    out = x - tap * delayed
    return out, FilterState(float(x[-1]), float(out[-1]))


def de_emphasize(frame, tap: float, state: FilterState = FilterState()):
    """IIR de-emphasis ``y(n) = d(n) + tap * y(n-1)``, the inverse of :func:`pre_emphasize`."""
    if not abs(tap) < 1.0:
        raise UnstableFilterError(f"de-emphasis tap must satisfy |tap| < 1, got {tap}")
    d = np.asarray(frame, dtype=float)
    if d.size == 0:
        return d.copy(), state
    out, _ = lfilter([1.0], [1.0, -tap], d, zi=[tap * state.prev_output])
    return out, FilterState(float(d[-1]), float(out[-1]))


def analysis_segment(signal: np.ndarray, frame_index: int, config: FrameConfig) -> np.ndarray:
    """Analysis buffer for ``frame_index``, zero-padded where it leaves the signal."""
    start, stop = config.analysis_bounds(frame_index)
    out = np.zeros(config.window_len)
    lo, hi = max(start, 0), min(stop, len(signal))
    if hi > lo:
        out[lo - start:hi - start] = signal[lo:hi]
    return out


def framewise_autocorr(signal, config: FrameConfig, window, n_frames: int | None = None):
    """Lag-0/lag-1 sums of every frame's analysis segment at once.

    Vectorised equivalent of calling :func:`autocorr_01` on
    :func:`analysis_segment` for frames ``0 .. n_frames-1``. Returns ``(r0, r1)``.
    """
    x = np.asarray(signal, dtype=float)
    if n_frames is None:
        n_frames = config.n_frames(len(x))
    W = config.window_len
    first, _ = config.analysis_bounds(0)
    _, last = config.analysis_bounds(n_frames - 1)
    pad_lo = max(-first, 0)
    padded = np.concatenate([np.zeros(pad_lo), x, np.zeros(max(last - len(x), 0))])
    starts = np.arange(n_frames) * config.frame_len + first + pad_lo
    y = padded[starts[:, np.newaxis] + np.arange(W)] * np.asarray(window, dtype=float)
    r0 = np.einsum("ij,ij->i", y, y)
    r1 = np.einsum("ij,ij->i", y[:, 1:], y[:, :-1])
    return r0, r1


def ratios_or_zero(r0, r1):
    """``r1 / r0`` with silent frames (r0 under the floor) mapped to 0."""
    silent = r0 <= SILENCE_FLOOR
    return np.where(silent, 0.0, r1 / np.where(silent, 1.0, r0)), silent
