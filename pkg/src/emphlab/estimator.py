"""Decoder-side re-estimation of the AR(1) coefficient from a pre-emphasized signal.

Given the filter weight ``gamma`` and the lag-1/lag-0 autocorrelation ratio
``rho`` of the pre-emphasized signal, the AR(1) coefficient ``alpha`` of the
original signal is the unique root in (-1, 1) of

    gamma (1 - gamma) a^3 + gamma rho (gamma - 2) a^2 + (gamma - 1) a + rho = 0.

Note the linear coefficient is ``gamma - 1``. Writing it as
``gamma (gamma - 1)`` breaks both the gamma -> 0 limit (which must give
``a = rho``) and consistency with :func:`emphlab.armodel.rho_of_alpha`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .armodel import rho_of_alpha
from .dsp import AutocorrPair

ALPHA_MAX = 0.999
F_TOL = 1e-12
X_TOL = 1e-10
DEFAULT_TABLE_SIZE = 1024


class ConsistencyError(RuntimeError):
    """Internal numerical invariant violated (indicates a bug, not bad input)."""


class CubicCoeffs(NamedTuple):
    c3: float
    c2: float
    c1: float
    c0: float

    def __call__(self, a):
        return ((self.c3 * a + self.c2) * a + self.c1) * a + self.c0


class EncoderEstimate(NamedTuple):
    alpha: float
    silent: bool


def clamp_alpha(alpha):
    return np.clip(alpha, -ALPHA_MAX, ALPHA_MAX)


def estimate_alpha_encoder(pair: AutocorrPair) -> EncoderEstimate:
    """Least-squares AR(1) coefficient ``r1 / r0``, clamped for stability."""
    if pair.silent:
        return EncoderEstimate(0.0, True)
    return EncoderEstimate(float(clamp_alpha(pair.ratio)), False)


def _check_gamma(gamma):
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must be in (0, 1), got {gamma}")


def build_cubic(gamma: float, rho: float) -> CubicCoeffs:
    _check_gamma(gamma)
    if not abs(rho) < 1.0:
        raise ValueError(f"|rho| must be < 1, got {rho}")
    return CubicCoeffs(gamma * (1.0 - gamma), gamma * rho * (gamma - 2.0), gamma - 1.0, rho)


def rho_max(gamma: float) -> float:
    """Largest ratio reachable with |alpha| <= ALPHA_MAX."""
    return rho_of_alpha(ALPHA_MAX, gamma)


def solve_alpha(gamma: float, rho):
    """Root of the cubic in [-ALPHA_MAX, ALPHA_MAX], by vectorised bisection.

    ``rho`` may be a scalar or an array; out-of-range values are clamped to
    the reachable range first. The cubic is strictly decreasing across the
    bracket (it is positive at -1 and negative at +1 for every |rho| < 1), so
    bisection always converges to the single admissible root.
    """
    _check_gamma(gamma)
    r = np.asarray(rho, dtype=float)
    scalar = r.ndim == 0
    rm = rho_max(gamma)
    r = np.clip(np.atleast_1d(r), -rm, rm)

    c3, c2, c1 = gamma * (1.0 - gamma), gamma * r * (gamma - 2.0), gamma - 1.0

    def f(a):
        return ((c3 * a + c2) * a + c1) * a + r

    lo = np.full(r.shape, -ALPHA_MAX)
    hi = np.full(r.shape, ALPHA_MAX)
    f_lo, f_hi = f(lo), f(hi)
    # clamping to rm lands exactly on an end point up to rounding
    f_lo = np.where(np.abs(f_lo) <= F_TOL, 0.0, f_lo)
    f_hi = np.where(np.abs(f_hi) <= F_TOL, 0.0, f_hi)
    if np.any(f_lo < 0.0) or np.any(f_hi > 0.0):
        raise ConsistencyError(f"no sign change on the bracket for gamma={gamma}")

    root = np.where(f_lo == 0.0, lo, np.where(f_hi == 0.0, hi, np.nan))
    todo = np.isnan(root)
    while np.any(todo):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        hit = todo & ((np.abs(fm) <= F_TOL) | (hi - lo <= X_TOL))
        root = np.where(hit, mid, root)
        todo &= ~hit
        pos = fm > 0.0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)

    return float(root[0]) if scalar else root


@dataclass(frozen=True)
class DeemphasisTable:
    gamma: float
    rho_grid: np.ndarray
    alpha_values: np.ndarray

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.rho_grid[0]), float(self.rho_grid[-1])

    def lookup(self, rho):
        return lookup_alpha(self, rho)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["rho", "alpha", "gamma_alpha"])
            for r, a in zip(self.rho_grid, self.alpha_values):
                w.writerow([repr(float(r)), repr(float(a)), repr(float(self.gamma * a))])

    @classmethod
    def from_csv(cls, path, gamma: float) -> "DeemphasisTable":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        rho = np.array([float(r["rho"]) for r in rows])
        alpha = np.array([float(r["alpha"]) for r in rows])
        _check_monotone(rho, alpha)
        return cls(gamma, rho, alpha)


def _check_monotone(rho, alpha):
    if np.any(np.diff(rho) <= 0.0) or np.any(np.diff(alpha) <= 0.0):
        raise ConsistencyError("table must be strictly increasing in rho and alpha")


def build_table(gamma: float, n_entries: int = DEFAULT_TABLE_SIZE) -> DeemphasisTable:
    """Tabulate rho over a uniform alpha grid on [-ALPHA_MAX, ALPHA_MAX]."""
    _check_gamma(gamma)
    if n_entries < 2:
        raise ValueError("n_entries must be >= 2")
    alpha = np.linspace(-ALPHA_MAX, ALPHA_MAX, n_entries)
    if n_entries % 2:
        alpha[n_entries // 2] = 0.0
    rho = np.asarray(rho_of_alpha(alpha, gamma), dtype=float)
    _check_monotone(rho, alpha)
    return DeemphasisTable(gamma, rho, alpha)


def lookup_alpha(table: DeemphasisTable, rho):
    """Linear interpolation in the table; inputs outside the domain clamp to its ends."""
    out = np.interp(rho, table.rho_grid, table.alpha_values)
    return float(out) if np.ndim(out) == 0 else out
