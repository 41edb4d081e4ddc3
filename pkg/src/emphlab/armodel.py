"""AR(1) synthesis, the exact AR(1) -> pre-emphasized lag-1 ratio map, and the
Monte Carlo study of the encoder and decoder coefficient estimators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .dsp import SILENCE_FLOOR, make_window

# |alpha| at or beyond this is rejected by the closed-form map
ALPHA_LIMIT = 1.0 - 1e-9


@dataclass(frozen=True)
class ArModel:
    alpha: float
    sigma2: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.sigma2)):
            raise ValueError("AR parameters must be finite")
        if not abs(self.alpha) < 1.0:
            raise ValueError(f"|alpha| must be < 1, got {self.alpha}")
        if not self.sigma2 > 0.0:
            raise ValueError(f"sigma2 must be > 0, got {self.sigma2}")


def _ar1_rows(alpha: float, sigma2: float, innovations: np.ndarray) -> np.ndarray:
    """Run the AR(1) recursion along the last axis.

    Column 0 of ``innovations`` seeds x(-1) from the stationary distribution;
    the remaining columns drive the recursion.
    """
    scale = math.sqrt(sigma2)
    x_prev = innovations[..., 0] * scale / math.sqrt(1.0 - alpha * alpha)
    w = innovations[..., 1:] * scale
    zi = (alpha * x_prev)[..., np.newaxis]
    x, _ = lfilter([1.0], [1.0, -alpha], w, axis=-1, zi=zi)
    return x


def synthesize_ar1(model: ArModel, n_samples: int, seed: int) -> np.ndarray:
    """Stationary Gaussian AR(1) sequence ``x(n) = alpha x(n-1) + w(n)``."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    return _ar1_rows(model.alpha, model.sigma2, rng.standard_normal(n_samples + 1))


def synthesize_varying_ar1(alphas, segment_len: int, seed: int, sigma2: float = 1.0) -> np.ndarray:
    """Concatenated AR(1) segments, one per entry of ``alphas``.

    The recursion runs continuously across segment boundaries (only the
    coefficient switches) and every segment is rescaled to unit variance
    so that loudness does not track alpha.
    """
    rng = np.random.default_rng(seed)
    out = np.empty(len(alphas) * segment_len)
    x_prev = rng.standard_normal()
    for i, a in enumerate(alphas):
        ArModel(a, sigma2)  # validates
        g = math.sqrt(1.0 - a * a)
        w = rng.standard_normal(segment_len) * math.sqrt(sigma2) * g
        seg, _ = lfilter([1.0], [1.0, -a], w, zi=[a * x_prev])
        x_prev = seg[-1]
        out[i * segment_len:(i + 1) * segment_len] = seg
    return out


def _check_alpha_gamma(alpha, gamma):
    a = np.asarray(alpha, dtype=float)
    g = np.asarray(gamma, dtype=float)
    if np.any(~np.isfinite(a)) or np.any(np.abs(a) >= ALPHA_LIMIT):
        raise ValueError(f"|alpha| must be < {ALPHA_LIMIT}, got {alpha}")
    if np.any(~(g > 0.0)) or np.any(~(g < 1.0)):
        raise ValueError(f"gamma must be in (0, 1), got {gamma}")
    return a, g


def rho_of_alpha(alpha, gamma):
    """Lag-1 to lag-0 autocorrelation ratio of an AR(1) process after weighted pre-emphasis.

    The pre-emphasized signal ``d(n) = alpha d(n-1) + w(n) - alpha gamma w(n-1)``
    is ARMA(1,1); with unit innovation variance its autocorrelations are

        R1 = alpha (1 - gamma) (1 - alpha^2 gamma) / (1 - alpha^2)
        R0 = alpha R1 + 1 - alpha^2 gamma + alpha^2 gamma^2

    Accepts scalars or arrays (broadcast).
    """
    a, g = _check_alpha_gamma(alpha, gamma)
    a2 = a * a
    r1 = a * (1.0 - g) * (1.0 - a2 * g) / (1.0 - a2)
    r0 = a * r1 + 1.0 - a2 * g + a2 * g * g
    rho = r1 / r0
    return float(rho) if rho.ndim == 0 else rho


def default_alpha_grid() -> np.ndarray:
    """-0.98 to 0.98 in steps of 0.1, with the +0.98 end point appended."""
    grid = np.round(-0.98 + 0.1 * np.arange(20), 10)
    return np.append(grid, 0.98)


@dataclass
class MonteCarloReport:
    true_alpha: float
    estimates_encoder: np.ndarray = field(repr=False)
    estimates_decoder: np.ndarray = field(repr=False)
    ci95_encoder: tuple[float, float]
    ci95_decoder: tuple[float, float]

    @property
    def width_encoder(self) -> float:
        return self.ci95_encoder[1] - self.ci95_encoder[0]

    @property
    def width_decoder(self) -> float:
        return self.ci95_decoder[1] - self.ci95_decoder[0]


def _ci95(values: np.ndarray) -> tuple[float, float]:
    lo, hi = np.percentile(values, [2.5, 97.5])
    return float(lo), float(hi)


def _windowed_ratio(rows: np.ndarray, window: np.ndarray) -> np.ndarray:
    y = rows * window
    r0 = np.einsum("ij,ij->i", y, y)
    r1 = np.einsum("ij,ij->i", y[:, 1:], y[:, :-1])
    safe = r0 > SILENCE_FLOOR
    return np.where(safe, r1 / np.where(safe, r0, 1.0), 0.0)


def monte_carlo_point(alpha: float, gamma: float, n_trials: int, frame_len: int,
                      window: np.ndarray, seed: int, grid_index: int = 0,
                      emphasis: str = "estimated") -> MonteCarloReport:
    """Monte Carlo study at one true alpha.

    Each trial is an independent stationary AR(1) frame. ``emphasis`` selects the
    pre-emphasis tap: ``"estimated"`` uses gamma times the per-frame encoder
    estimate (what a codec would do), ``"true"`` uses gamma times the true alpha.
    """
    # local import: estimator depends on this module
    from .estimator import clamp_alpha, solve_alpha

    ArModel(alpha)
    window = np.asarray(window, dtype=float)
    if window.shape != (frame_len,):
        raise ValueError("window length must equal frame_len")
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")

    # trial i of grid point k always sees the same stream, whatever n_trials is
    rng = np.random.default_rng(np.random.SeedSequence([seed, grid_index]))
    # one extra sample per trial gives the pre-emphasis filter its x(-1)
    x = _ar1_rows(alpha, 1.0, rng.standard_normal((n_trials, frame_len + 2)))

    alpha_enc = clamp_alpha(_windowed_ratio(x[:, 1:], window))
    if emphasis == "estimated":
        taps = gamma * alpha_enc
    elif emphasis == "true":
        taps = np.full(n_trials, gamma * alpha)
    else:
        raise ValueError(f"unknown emphasis mode {emphasis!r}")
    d = x[:, 1:] - taps[:, np.newaxis] * x[:, :-1]
    alpha_dec = solve_alpha(gamma, _windowed_ratio(d, window))

    return MonteCarloReport(
        true_alpha=float(alpha),
        estimates_encoder=alpha_enc,
        estimates_decoder=np.asarray(alpha_dec, dtype=float).reshape(-1),
        ci95_encoder=_ci95(alpha_enc),
        ci95_decoder=_ci95(alpha_dec),
    )


def run_monte_carlo(alpha_grid=None, gamma: float = 0.7, n_trials: int = 30000,
                    frame_len: int = 1440, window=None, seed: int = 0,
                    emphasis: str = "estimated", max_workers: int | None = 1):
    """Encoder/decoder estimator spread over a grid of true alpha values."""
    grid = default_alpha_grid() if alpha_grid is None else np.asarray(alpha_grid, dtype=float)
    if window is None:
        window = make_window("hanning", frame_len)
    args = [(float(a), gamma, n_trials, frame_len, window, seed, k, emphasis)
            for k, a in enumerate(grid)]
    if max_workers is None or max_workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(_point_star, args))
    return [monte_carlo_point(*a) for a in args]


def _point_star(args):
    return monte_carlo_point(*args)
