"""Objective quality measures: SNR and log spectral distortion."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dsp import FrameConfig, make_window

SPECTRAL_FLOOR = 1e-10


def _pair(reference, test):
    ref = np.asarray(reference, dtype=float)
    tst = np.asarray(test, dtype=float)
    if ref.shape != tst.shape or ref.ndim != 1:
        raise ValueError(f"reference and test must be 1-D of equal length, "
                         f"got {ref.shape} and {tst.shape}")
    return ref, tst


def snr_db(reference, test) -> float:
    """``10 log10(sum ref^2 / sum (ref - test)^2)``; ``inf`` when the error is zero."""
    ref, tst = _pair(reference, test)
    signal = float(np.dot(ref, ref))
    if signal == 0.0:
        raise ValueError("reference signal is silent")
    err = ref - tst
    noise = float(np.dot(err, err))
    if noise == 0.0:
        return float("inf")
    return 10.0 * np.log10(signal / noise)


@dataclass
class LsdReport:
    mean_lsd_db: float
    per_frame_lsd_db: np.ndarray = field(repr=False)

    @property
    def n_frames(self) -> int:
        return len(self.per_frame_lsd_db)


def _frames(x: np.ndarray, size: int, hop: int) -> np.ndarray:
    n = 1 + (len(x) - size) // hop
    idx = np.arange(size)[np.newaxis, :] + hop * np.arange(n)[:, np.newaxis]
    return x[idx]


def lsd_db(reference, test, config: FrameConfig = FrameConfig()) -> LsdReport:
    """Frame-averaged RMS of per-bin dB power ratios.

    Frames are ``config.window_len`` long with 50% overlap and a Hanning
    window; the FFT size is the next power of two. Both spectra in a frame are
    floored at ``SPECTRAL_FLOOR`` times the larger of the two frame peaks.
    """
    ref, tst = _pair(reference, test)
    size = config.window_len
    if len(ref) < size:
        raise ValueError(f"signals must be at least {size} samples long")
    hop = max(size // 2, 1)
    nfft = 1 << (size - 1).bit_length()
    win = make_window("hanning", size)

    p_ref = np.abs(np.fft.rfft(_frames(ref, size, hop) * win, nfft)) ** 2
    p_tst = np.abs(np.fft.rfft(_frames(tst, size, hop) * win, nfft)) ** 2
    peak = np.maximum(p_ref.max(axis=1), p_tst.max(axis=1))
    floor = np.maximum(SPECTRAL_FLOOR * peak, np.finfo(float).tiny)[:, np.newaxis]
    log_ratio = 10.0 * np.log10(np.maximum(p_ref, floor) / np.maximum(p_tst, floor))
    per_frame = np.sqrt(np.mean(log_ratio ** 2, axis=1))
    return LsdReport(float(per_frame.mean()), per_frame)
