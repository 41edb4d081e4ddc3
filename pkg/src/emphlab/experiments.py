"""Experiment drivers shared by the CLI and the scripts in ``scripts/``."""

from __future__ import annotations

import itertools
import logging
import os
from dataclasses import dataclass

import numpy as np

from .armodel import synthesize_varying_ar1
from .codec import CodecMode, encoder_taps, run_pipeline
from .dsp import FilterState, FrameConfig, framewise_autocorr, make_window, pre_emphasize, ratios_or_zero
from .estimator import solve_alpha
from .metrics import lsd_db

log = logging.getLogger(__name__)

HIST_BIN_WIDTH = 0.02


def max_workers() -> int:
    """Worker cap from ``EMPHLAB_THREADS`` (default: CPU count)."""
    env = os.environ.get("EMPHLAB_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("EMPHLAB_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


@dataclass
class FrameAnalysis:
    alpha_tilde: np.ndarray
    rho_d: np.ndarray
    alpha_hat: np.ndarray
    silent: np.ndarray


def analyze_frames(x, config: FrameConfig = FrameConfig(), gamma: float = 0.7) -> FrameAnalysis:
    """Per-frame encoder estimate, pre-emphasized ratio and decoder re-estimate.

    The pre-emphasized signal is left unquantized.
    """
    x = np.asarray(x, dtype=float)
    n = config.n_frames(len(x))
    if n < 1:
        raise ValueError(f"need at least one frame ({config.frame_len} samples)")
    window = make_window("hanning", config.window_len)
    ratio_x, silent = ratios_or_zero(*framewise_autocorr(x, config, window, n))
    taps = encoder_taps(x, gamma, config)

    d = np.empty(n * config.frame_len)
    state = FilterState()
    for f in range(n):
        sl = slice(f * config.frame_len, (f + 1) * config.frame_len)
        d[sl], state = pre_emphasize(x[sl], taps[f], state)
    rho_d, silent_d = ratios_or_zero(*framewise_autocorr(d, config, window, n))
    alpha_hat = np.where(silent_d, 0.0, solve_alpha(gamma, rho_d))
    return FrameAnalysis(np.clip(ratio_x, -0.999, 0.999), rho_d, alpha_hat, silent)


def histogram(values, width: float = HIST_BIN_WIDTH):
    """Counts over [-1, 1] in bins of ``width``; returns ``(edges, counts)``."""
    n_bins = int(round(2.0 / width))
    edges = np.linspace(-1.0, 1.0, n_bins + 1)
    counts, _ = np.histogram(np.clip(values, -1.0, 1.0), bins=edges)
    return edges, counts


def synthetic_material(duration_s: float = 60.0, sample_rate_hz: int = 16000,
                  segment_s: float = 0.25, alpha_range=(0.3, 0.98), seed: int = 0) -> np.ndarray:
    """Piecewise-stationary AR(1) signal with alpha redrawn every ``segment_s`` seconds."""
    seg = int(round(segment_s * sample_rate_hz))
    n_seg = max(int(round(duration_s / segment_s)), 1)
    rng = np.random.default_rng(seed)
    alphas = rng.uniform(*alpha_range, n_seg)
    return synthesize_varying_ar1(alphas, seg, seed + 1)


@dataclass
class SweepRow:
    mode: str
    gamma: float
    bits: int
    mean_lsd: float
    snr_db: float
    status: str = "ok"


def _sweep_one(args):
    x, kind, gamma, bits, config = args
    try:
        if kind == "fixed":
            mode = CodecMode.fixed(gamma)
        else:
            mode = CodecMode(kind, gamma=gamma)
        res = run_pipeline(x, mode, config, bits_per_sample=bits)
        return SweepRow(kind, gamma, bits, lsd_db(x, res.decoded, config).mean_lsd_db, res.snr_db)
    except Exception as exc:  # one bad row must not sink the sweep
        log.warning("sweep row %s/%s/%s failed: %s", kind, gamma, bits, exc)
        return SweepRow(kind, gamma, bits, float("nan"), float("nan"), f"error: {exc}")


def lsd_sweep(x, modes, gammas, bits_list, config: FrameConfig = FrameConfig(),
              workers: int = 1) -> list[SweepRow]:
    """Mean LSD over the product of modes, gammas (beta for ``fixed``) and bit depths.

    ``none`` ignores gamma and is run once per bit depth.
    """
    if not modes or not gammas or not bits_list:
        raise ValueError("modes, gammas and bits must all be non-empty")
    x = np.asarray(x, dtype=float)
    jobs = []
    for kind, gamma, bits in itertools.product(modes, gammas, bits_list):
        if kind == "none":
            gamma = 0.0
            if any(j[1] == "none" and j[3] == bits for j in jobs):
                continue
        jobs.append((x, kind, float(gamma), int(bits), config))
    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_one, jobs))
    return [_sweep_one(j) for j in jobs]
