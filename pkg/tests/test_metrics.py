import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emphlab.dsp import FrameConfig
from emphlab.metrics import lsd_db, snr_db

SMALL = FrameConfig(sample_rate_hz=8000, frame_len=16, window_len=48, lookahead_len=16)


def lsd_bruteforce(ref, tst, size, floor=1e-10):
    """Direct-DFT LSD with explicit loops; same framing conventions."""
    hop = size // 2
    nfft = 1
    while nfft < size:
        nfft *= 2
    n = np.arange(size)
    win = 0.5 * (1 - np.cos(2 * np.pi * n / (size - 1)))
    k = np.arange(nfft // 2 + 1)[:, None]
    basis = np.exp(-2j * np.pi * k * n[None, :] / nfft)
    vals = []
    start = 0
    while start + size <= len(ref):
        pr = np.abs(basis @ (ref[start:start + size] * win)) ** 2
        pt = np.abs(basis @ (tst[start:start + size] * win)) ** 2
        f = floor * max(pr.max(), pt.max())
        terms = [(10 * math.log10(max(a, f) / max(b, f))) ** 2 for a, b in zip(pr, pt)]
        vals.append(math.sqrt(sum(terms) / len(terms)))
        start += hop
    return float(np.mean(vals))


class TestSnr:
    def test_identical_is_inf(self):
        assert snr_db([1.0, 2.0], [1.0, 2.0]) == math.inf

    def test_zero_test(self):
        assert snr_db([1.0, -3.0], [0.0, 0.0]) == 0.0

    def test_direct(self):
        assert snr_db([1.0, 0.0], [0.9, 0.0]) == pytest.approx(20.0)

    def test_errors(self):
        with pytest.raises(ValueError):
            snr_db([1.0, 2.0], [1.0])
        with pytest.raises(ValueError):
            snr_db([0.0, 0.0], [1.0, 1.0])


class TestLsd:
    def test_identical(self, rng):
        x = rng.standard_normal(4000)
        rep = lsd_db(x, x)
        assert rep.mean_lsd_db == 0.0 and rep.n_frames == 1 + (4000 - 480) // 240

    def test_double_amplitude(self, rng):
        x = rng.standard_normal(4000)
        assert lsd_db(x, 2 * x).mean_lsd_db == pytest.approx(20 * math.log10(2), abs=1e-9)

    def test_matches_bruteforce(self, rng):
        x = rng.standard_normal(300)
        y = x + 0.3 * rng.standard_normal(300)
        assert lsd_db(x, y, SMALL).mean_lsd_db == pytest.approx(lsd_bruteforce(x, y, 48), rel=1e-9)

    def test_silent_frames_are_zero(self):
        assert lsd_db(np.zeros(1000), np.zeros(1000)).mean_lsd_db == 0.0

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.01, 3.0))
    def test_symmetric_nonnegative(self, seed, noise):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(600)
        y = x + noise * rng.standard_normal(600)
        a, b = lsd_db(x, y, SMALL), lsd_db(y, x, SMALL)
        assert a.mean_lsd_db == pytest.approx(b.mean_lsd_db, rel=1e-12)
        assert np.all(a.per_frame_lsd_db >= 0)
        assert a.mean_lsd_db == pytest.approx(np.mean(a.per_frame_lsd_db))

    @pytest.mark.parametrize("c", [0.5, 3.0, 10.0])
    def test_scale_shift(self, rng, c):
        x = rng.standard_normal(3000)
        assert lsd_db(x, c * x).mean_lsd_db == pytest.approx(abs(20 * math.log10(c)), abs=1e-9)

    def test_errors(self):
        with pytest.raises(ValueError):
            lsd_db(np.zeros(1000), np.zeros(999))
        with pytest.raises(ValueError):
            lsd_db(np.zeros(100), np.zeros(100))
