"""16-bit mono PCM WAV reading/writing and atomic file output."""

from __future__ import annotations

import contextlib
import os
import tempfile
import wave
from dataclasses import dataclass

import numpy as np


class WavFormatError(ValueError):
    pass


@dataclass
class WavAudio:
    sample_rate_hz: int
    samples: np.ndarray  # float64 in [-1, 1)


@contextlib.contextmanager
def atomic_open(path, mode="w", **kwargs):
    """Open a temp file next to ``path`` and rename it into place on success."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode, **kwargs) as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def to_pcm16(samples) -> np.ndarray:
    x = np.asarray(samples, dtype=float)
    return np.clip(np.round(x * 32768.0), -32768, 32767).astype("<i2")


def read_wav(path) -> WavAudio:
    try:
        with wave.open(os.fspath(path), "rb") as w:
            channels, width, rate = w.getnchannels(), w.getsampwidth(), w.getframerate()
            if w.getcomptype() != "NONE":
                raise WavFormatError(f"{path}: compressed WAV not supported")
            raw = w.readframes(w.getnframes())
    except (wave.Error, EOFError) as exc:
        raise WavFormatError(f"{path}: not a readable WAV file ({exc})") from exc
    if channels != 1:
        raise WavFormatError(f"{path}: expected mono, got {channels} channels")
    if width != 2:
        raise WavFormatError(f"{path}: expected 16-bit samples, got {8 * width}-bit")
    pcm = np.frombuffer(raw, dtype="<i2")
    return WavAudio(rate, pcm.astype(float) / 32768.0)


def write_wav(path, audio: WavAudio) -> None:
    with atomic_open(path, "wb") as fh:
        with wave.open(fh, "wb") as w:
            w.setnchannels(1)
            w.setsampwidth(2)
            w.setframerate(int(audio.sample_rate_hz))
            w.writeframes(to_pcm16(audio.samples).tobytes())
