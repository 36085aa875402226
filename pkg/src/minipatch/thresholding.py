"""Turning final selection frequencies into a stable feature set."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class KdeConfig:
    grid_points: int = 512
    fallback_thr: float = 0.5

    def __post_init__(self):
        if self.grid_points < 16:
            raise ValueError("grid_points must be at least 16")


def gaussian_kde_curve(frequencies, grid, h: float) -> np.ndarray:
    """Unnormalised Gaussian kernel density of ``frequencies`` on ``grid``."""
    freq = np.asarray(frequencies, dtype=np.float64)
    z = (np.asarray(grid)[:, None] - freq[None, :]) / h
    return np.exp(-0.5 * z * z).mean(axis=1)


def kde_threshold(frequencies, config: KdeConfig | None = None) -> float:
    """Smallest local minimum of a Gaussian KDE fitted to the frequencies.

    The bandwidth is the sample standard deviation of the frequencies. The
    density is evaluated on a uniform grid over [0, 1] and a grid point
    counts as a minimum when both neighbours are strictly higher. Falls back
    to ``config.fallback_thr`` when there is no minimum or the frequencies
    are all equal.
    """
    config = config or KdeConfig()
    freq = np.asarray(frequencies, dtype=np.float64)
    if freq.size < 2:
        raise ValueError("need at least two frequencies")
    h = freq.std(ddof=1)
    if not h > 0:
        return config.fallback_thr
    grid = np.linspace(0.0, 1.0, config.grid_points)
    f = gaussian_kde_curve(freq, grid, h)
    interior = np.flatnonzero((f[1:-1] < f[:-2]) & (f[1:-1] < f[2:])) + 1
    if interior.size == 0:
        return config.fallback_thr
    return float(grid[interior[0]])


def fixed_select(frequencies, pi_thr: float) -> np.ndarray:
    """Indices with frequency at or above ``pi_thr``."""
    if not 0.0 < pi_thr < 1.0:
        raise ValueError("pi_thr must lie in (0, 1)")
    return np.flatnonzero(np.asarray(frequencies) >= pi_thr)


def rank_features(frequencies) -> np.ndarray:
    """All feature indices ordered by frequency, highest first, ties by index."""
    return np.argsort(-np.asarray(frequencies, dtype=np.float64), kind="stable")


def oracle_select(frequencies, s: int) -> np.ndarray:
    """The s most frequently selected features (sorted by index)."""
    M = np.size(frequencies)
    if not 1 <= s <= M:
        raise ValueError(f"cardinality {s} must lie in [1, {M}]")
    return np.sort(rank_features(frequencies)[:s])
