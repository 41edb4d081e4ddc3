"""PCM codec simulation with fixed, forward, backward or self-adaptive emphasis.

The encoder works offline on the whole input (it has the look-ahead it
needs). Decoders are streaming objects fed one block of decoded
pre-emphasized samples at a time. The self-adaptive decoder is constructed
from shared constants only and its ``push`` accepts nothing but those samples,
so it cannot see any side information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .dsp import (FilterState, FrameConfig, autocorr_01, de_emphasize,
                  framewise_autocorr, make_window, pre_emphasize, ratios_or_zero)
from .estimator import (DeemphasisTable, clamp_alpha, estimate_alpha_encoder,
                        solve_alpha)
from .metrics import snr_db

MODES = ("none", "fixed", "forward", "backward", "self")


@dataclass(frozen=True)
class CodecMode:
    kind: str = "none"
    beta: float = 0.7
    gamma: float = 0.7

    def __post_init__(self):
        if self.kind not in MODES:
            raise ValueError(f"unknown mode {self.kind!r}; expected one of {MODES}")
        if self.kind == "fixed" and not 0.0 <= self.beta < 1.0:
            raise ValueError(f"beta must be in [0, 1), got {self.beta}")
        if self.kind in ("forward", "backward", "self") and not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must be in (0, 1), got {self.gamma}")

    @classmethod
    def none(cls):
        return cls("none")

    @classmethod
    def fixed(cls, beta=0.7):
        return cls("fixed", beta=beta)

    @classmethod
    def forward(cls, gamma=0.7):
        return cls("forward", gamma=gamma)

    @classmethod
    def backward(cls, gamma=0.7):
        return cls("backward", gamma=gamma)

    @classmethod
    def self_adaptive(cls, gamma=0.7):
        return cls("self", gamma=gamma)

    def __str__(self):
        if self.kind == "fixed":
            return f"fixed(beta={self.beta:g})"
        if self.kind == "none":
            return "none"
        return f"{self.kind}(gamma={self.gamma:g})"


@dataclass(frozen=True)
class QuantizerSpec:
    """Uniform mid-tread quantizer with ``2**bits - 1`` levels, saturating."""

    step: float
    bits: int

    def __post_init__(self):
        if not self.step > 0.0:
            raise ValueError(f"step must be > 0, got {self.step}")
        if self.bits < 1:
            raise ValueError("bits must be >= 1")

    @property
    def kind(self) -> str:
        return "mid-tread"

    @property
    def clip_range(self) -> float:
        return (2 ** (self.bits - 1) - 1) * self.step


def quantize(samples, spec: QuantizerSpec) -> np.ndarray:
    x = np.asarray(samples, dtype=float)
    # round half away from zero
    q = np.copysign(np.floor(np.abs(x) / spec.step + 0.5), x) * spec.step
    return np.clip(q, -spec.clip_range, spec.clip_range) + 0.0


def tune_step(signal, bits_per_sample: int) -> QuantizerSpec:
    """Step size maximising the SNR of the quantized ``signal``.

    A 48-point log grid brackets the optimum, then a bounded Brent search
    refines it inside the neighbouring grid cells.
    """
    x = np.asarray(signal, dtype=float)
    if bits_per_sample < 2:
        raise ValueError("bits_per_sample must be >= 2")
    peak = float(np.max(np.abs(x))) if x.size else 0.0
    if peak == 0.0:
        raise ValueError("cannot tune a quantizer on a silent signal")

    n_half = 2 ** (bits_per_sample - 1) - 1
    rms = math.sqrt(float(np.mean(x * x)))

    def cost(log_step):
        q = quantize(x, QuantizerSpec(math.exp(log_step), bits_per_sample))
        s = snr_db(x, q)
        return -s if math.isfinite(s) else -1e3

    # from a step far below the noise-optimal one up to no clipping at all
    hi = math.log(peak / n_half * 1.01)
    lo = min(math.log(rms / n_half / 16.0), hi - 1.0)
    grid = np.linspace(lo, hi, 48)
    costs = [cost(g) for g in grid]
    k = int(np.argmin(costs))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    best_log, best_cost = grid[k], costs[k]
    if b > a:
        res = minimize_scalar(cost, bounds=(a, b), method="bounded",
                              options={"xatol": 1e-6})
        if res.fun < best_cost:
            best_log = res.x
    return QuantizerSpec(math.exp(best_log), bits_per_sample)


def _tap_from(segment: np.ndarray, window: np.ndarray, gamma: float) -> float:
    return gamma * estimate_alpha_encoder(autocorr_01(segment, window)).alpha


def encoder_taps(x, gamma: float, config: FrameConfig) -> np.ndarray:
    """gamma times the clamped least-squares AR(1) estimate of every whole frame."""
    window = make_window("hanning", config.window_len)
    ratio, _ = ratios_or_zero(*framewise_autocorr(x, config, window))
    return gamma * clamp_alpha(ratio)


def _frame_bounds(n_samples: int, frame_len: int):
    """``(start, stop)`` for every whole frame plus a trailing partial one if any."""
    bounds = [(s, s + frame_len) for s in range(0, n_samples - frame_len + 1, frame_len)]
    tail = len(bounds) * frame_len
    if tail < n_samples:
        bounds.append((tail, n_samples))
    return bounds


class SelfAdaptiveDecoder:
    """Re-estimates the de-emphasis tap from decoded pre-emphasized samples only.

    The analysis window of frame ``f`` reaches ``lookahead_len`` samples past
    the frame, so output for a frame is released once that look-ahead has
    arrived. Call :meth:`flush` at end of stream.
    """

    def __init__(self, gamma: float, config: FrameConfig = FrameConfig(),
                 table: DeemphasisTable | None = None):
        if table is not None and table.gamma != gamma:
            raise ValueError("table gamma does not match decoder gamma")
        self.gamma = gamma
        self.config = config
        self.table = table
        self.window = make_window("hanning", config.window_len)
        self.taps: list[float] = []
        self._state = FilterState()
        self._buf = np.zeros(0)
        self._offset = 0  # absolute index of _buf[0]
        self._next = 0  # next frame to decode

    @property
    def delay(self) -> int:
        return self.config.lookahead_len

    def _alpha(self, rho: float) -> float:
        if self.table is not None:
            return self.table.lookup(rho)
        return solve_alpha(self.gamma, rho)

    def _decode_next(self, end_of_stream: bool) -> np.ndarray:
        cfg = self.config
        f = self._next
        start, stop = cfg.analysis_bounds(f)
        seg = np.zeros(cfg.window_len)
        lo = max(start, self._offset)
        hi = min(stop, self._offset + len(self._buf))
        seg[lo - start:hi - start] = self._buf[lo - self._offset:hi - self._offset]
        pair = autocorr_01(seg, self.window)
        tap = 0.0 if pair.silent else self.gamma * self._alpha(pair.ratio)
        self.taps.append(tap)

        fstart = f * cfg.frame_len
        fstop = min(fstart + cfg.frame_len, self._offset + len(self._buf))
        frame = self._buf[fstart - self._offset:fstop - self._offset]
        out, self._state = de_emphasize(frame, tap, self._state)
        self._next += 1

        # keep only what later analysis windows can still reach
        keep_from = self.config.analysis_bounds(self._next)[0]
        drop = min(max(keep_from - self._offset, 0), len(self._buf))
        if drop and not end_of_stream:
            self._buf = self._buf[drop:]
            self._offset += drop
        return out

    def push(self, dhat) -> np.ndarray:
        """Feed decoded pre-emphasized samples; returns whatever output is ready."""
        self._buf = np.concatenate([self._buf, np.asarray(dhat, dtype=float)])
        cfg = self.config
        outs = []
        while self._offset + len(self._buf) >= (self._next + 1) * cfg.frame_len + cfg.lookahead_len:
            outs.append(self._decode_next(False))
        return np.concatenate(outs) if outs else np.zeros(0)

    def flush(self) -> np.ndarray:
        """Decode the remaining whole frames (zero look-ahead past the end) and the
        trailing partial frame, which reuses the last tap."""
        cfg = self.config
        end = self._offset + len(self._buf)
        outs = []
        while (self._next + 1) * cfg.frame_len <= end:
            outs.append(self._decode_next(True))
        tail_start = self._next * cfg.frame_len
        if tail_start < end:
            tap = self.taps[-1] if self.taps else 0.0
            tail = self._buf[tail_start - self._offset:]
            out, self._state = de_emphasize(tail, tap, self._state)
            outs.append(out)
        return np.concatenate(outs) if outs else np.zeros(0)

    def frame_taps(self, dhat) -> np.ndarray:
        """Taps for every whole frame of a complete decoded signal, vectorised."""
        r0, r1 = framewise_autocorr(dhat, self.config, self.window)
        ratio, silent = ratios_or_zero(r0, r1)
        if self.table is not None:
            alpha = self.table.lookup(ratio)
        else:
            alpha = solve_alpha(self.gamma, ratio)
        return np.where(silent, 0.0, self.gamma * alpha)

    def decode(self, dhat) -> np.ndarray:
        """Decode a complete signal in one go (a fresh decoder is required).

        Gives the same result as :meth:`push` followed by :meth:`flush` but
        estimates all taps in one vectorised pass.
        """
        if self._next or len(self._buf):
            raise RuntimeError("decode() needs a fresh decoder")
        d = np.asarray(dhat, dtype=float)
        L = self.config.frame_len
        self.taps = list(self.frame_taps(d)) if len(d) >= L else []
        outs = []
        for f, (a, b) in enumerate(_frame_bounds(len(d), L)):
            tap = self.taps[min(f, len(self.taps) - 1)] if self.taps else 0.0
            out, self._state = de_emphasize(d[a:b], tap, self._state)
            outs.append(out)
        self._next = len(self.taps)
        return np.concatenate(outs) if outs else np.zeros(0)


class BackwardDecoder:
    """Tap for each frame estimated from the most recent ``window_len`` decoded samples.

    Runs identically inside the encoder (as its local decoder) and at the
    receiver. The first frame sees only zeros and uses tap 0.
    """

    def __init__(self, gamma: float, config: FrameConfig = FrameConfig()):
        self.gamma = gamma
        self.config = config
        self.window = make_window("hanning", config.window_len)
        self.taps: list[float] = []
        self._state = FilterState()
        self._hist = np.zeros(config.window_len)

    def next_tap(self) -> float:
        return _tap_from(self._hist, self.window, self.gamma)

    def decode_frame(self, dhat_frame, tap: float | None = None) -> np.ndarray:
        """De-emphasize one frame; ``tap=None`` estimates it from the decoded history."""
        if tap is None:
            tap = self.next_tap()
            self.taps.append(tap)
        out, self._state = de_emphasize(dhat_frame, tap, self._state)
        self._hist = np.concatenate([self._hist, out])[-self.config.window_len:]
        return out

    def decode(self, dhat) -> np.ndarray:
        d = np.asarray(dhat, dtype=float)
        L = self.config.frame_len
        outs = []
        for a, b in _frame_bounds(len(d), L):
            partial = b - a < L and self.taps
            outs.append(self.decode_frame(d[a:b], self.taps[-1] if partial else None))
        return np.concatenate(outs) if outs else np.zeros(0)


@dataclass
class PipelineResult:
    decoded: np.ndarray = field(repr=False)
    pre_emphasized: np.ndarray = field(repr=False)
    per_frame_coeffs_enc: np.ndarray = field(repr=False)
    per_frame_coeffs_dec: np.ndarray = field(repr=False)
    snr_db: float
    bits_per_sample: int | None
    quantizer: QuantizerSpec | None
    delay_samples: int = 0


def _encode(x: np.ndarray, mode: CodecMode, config: FrameConfig,
            quantizer: QuantizerSpec | None):
    """Returns decoded-side pre-emphasized signal, encoder taps, and, for backward
    mode, the taps produced by the local decoder."""
    L = config.frame_len
    bounds = _frame_bounds(len(x), L)
    n_full = len(x) // L

    def q(d):
        return d if quantizer is None else quantize(d, quantizer)

    dhat = np.empty_like(x)
    taps = []
    if mode.kind in ("forward", "self"):
        precomputed = encoder_taps(x, mode.gamma, config)
    state = FilterState()
    local = BackwardDecoder(mode.gamma, config) if mode.kind == "backward" else None
    tap = 0.0
    for f, (a, b) in enumerate(bounds):
        if f < n_full:
            if mode.kind == "fixed":
                tap = mode.beta
            elif mode.kind in ("forward", "self"):
                tap = precomputed[f]
            elif mode.kind == "backward":
                tap = local.next_tap()  # decode_frame below recomputes the same value
            taps.append(tap)
        d, state = pre_emphasize(x[a:b], tap, state)
        dhat[a:b] = q(d)
        if local is not None:
            local.decode_frame(dhat[a:b], tap if f >= n_full else None)
    return dhat, np.array(taps)


def run_pipeline(signal, mode: CodecMode, config: FrameConfig = FrameConfig(),
                 bits_per_sample: int | None = None,
                 quantizer: QuantizerSpec | None = None,
                 table: DeemphasisTable | None = None) -> PipelineResult:
    """Pre-emphasize, PCM-quantize and de-emphasize ``signal`` frame by frame.

    ``bits_per_sample=None`` disables quantization. Otherwise the step is
    tuned for maximum SNR on the pre-emphasized signal of an unquantized
    run, unless an explicit ``quantizer`` is given. The returned ``decoded``
    signal is aligned with the input; ``delay_samples`` reports the
    algorithmic delay a streaming decoder adds.
    """
    x = np.asarray(signal, dtype=float)
    if x.ndim != 1:
        raise ValueError("signal must be 1-D")
    if len(x) < config.window_len:
        raise ValueError(f"signal shorter than one analysis window ({config.window_len} samples)")

    if quantizer is None and bits_per_sample is not None:
        clean, _ = _encode(x, mode, config, None)
        quantizer = tune_step(clean, bits_per_sample)
    if quantizer is not None:
        bits_per_sample = quantizer.bits

    dhat, enc_taps = _encode(x, mode, config, quantizer)
    delay = 0
    if mode.kind == "self":
        dec = SelfAdaptiveDecoder(mode.gamma, config, table)
        decoded = dec.decode(dhat)
        dec_taps = np.array(dec.taps)
        delay = dec.delay
    elif mode.kind == "backward":
        dec = BackwardDecoder(mode.gamma, config)
        decoded = dec.decode(dhat)
        dec_taps = np.array(dec.taps)
    else:
        # fixed/forward taps are known to (or transmitted to) the decoder
        decoded = np.empty_like(dhat)
        state = FilterState()
        tap = 0.0
        for f, (a, b) in enumerate(_frame_bounds(len(x), config.frame_len)):
            if f < len(enc_taps):
                tap = enc_taps[f]
            decoded[a:b], state = de_emphasize(dhat[a:b], tap, state)
        dec_taps = enc_taps.copy()

    return PipelineResult(
        decoded=decoded,
        pre_emphasized=dhat,
        per_frame_coeffs_enc=enc_taps,
        per_frame_coeffs_dec=dec_taps,
        snr_db=snr_db(x, decoded) if np.any(x) else float("nan"),
        bits_per_sample=bits_per_sample,
        quantizer=quantizer,
        delay_samples=delay,
    )
