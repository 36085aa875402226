"""Core containers: the data pair, minipatch index sets and the selection tracker."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np


class DataError(ValueError):
    """Raised when input data is malformed (shape mismatch, non-finite cells)."""


class ConfigError(ValueError):
    """Raised when a configuration cannot be run against the data.

    ``option`` names the offending setting so front ends can point at it.
    """

    def __init__(self, message: str, option: str | None = None):
        super().__init__(message)
        self.option = option


class ContractError(RuntimeError):
    """A component returned something that violates its documented contract."""


@dataclass(frozen=True)
class DataMatrix:
    """Response vector ``y`` (length N) and design ``X`` (N x M).

    Arrays are copied, cast to float64 and made read-only so a single
    instance can be shared between workers.
    """

    y: np.ndarray
    X: np.ndarray
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64, order="C")
        y = np.array(self.y, dtype=np.float64).ravel()
        if X.ndim != 2:
            raise DataError(f"X must be two-dimensional, got shape {X.shape}")
        N, M = X.shape
        if N < 1 or M < 1:
            raise DataError(f"X must have at least one row and one column, got {X.shape}")
        if y.shape[0] != N:
            raise DataError(f"y has length {y.shape[0]} but X has {N} rows")
        if not np.all(np.isfinite(X)):
            bad = np.argwhere(~np.isfinite(X))[0]
            raise DataError(f"non-finite value in X at row {bad[0]}, column {bad[1]}")
        if not np.all(np.isfinite(y)):
            raise DataError(f"non-finite value in y at row {int(np.argmax(~np.isfinite(y)))}")
        names = self.feature_names
        if names is not None:
            names = tuple(str(s) for s in names)
            if len(names) != M:
                raise DataError(f"{len(names)} feature names given for {M} columns")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n_obs(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def names(self) -> list[str]:
        if self.feature_names is not None:
            return list(self.feature_names)
        return [f"x{j}" for j in range(self.n_features)]


def _as_index_set(idx, upper: int, what: str) -> np.ndarray:
    arr = np.unique(np.asarray(idx, dtype=np.int64))
    if arr.size != np.asarray(idx).size:
        raise ValueError(f"duplicate {what} indices")
    if arr.size == 0:
        raise ValueError(f"empty {what} index set")
    if arr[0] < 0 or arr[-1] >= upper:
        raise IndexError(f"{what} index out of range [0, {upper})")
    return arr


@dataclass(frozen=True)
class Minipatch:
    """Sorted observation and feature index sets used at iteration ``iteration``."""

    obs_idx: np.ndarray
    feat_idx: np.ndarray
    iteration: int = 1

    @classmethod
    def build(cls, obs_idx, feat_idx, N: int, M: int, iteration: int = 1) -> "Minipatch":
        """Validate indices against the data dimensions and sort them."""
        return cls(_as_index_set(obs_idx, N, "observation"),
                   _as_index_set(feat_idx, M, "feature"),
                   int(iteration))

    @property
    def n(self) -> int:
        return self.obs_idx.size

    @property
    def m(self) -> int:
        return self.feat_idx.size


def extract_minipatch(data: DataMatrix, patch: Minipatch) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(y[obs], X[obs][:, feat])`` for a minipatch."""
    N, M = data.X.shape
    obs, feat = patch.obs_idx, patch.feat_idx
    if obs.size and (obs.min() < 0 or obs.max() >= N):
        raise IndexError(f"observation index out of range [0, {N})")
    if feat.size and (feat.min() < 0 or feat.max() >= M):
        raise IndexError(f"feature index out of range [0, {M})")
    return data.y[obs], data.X[np.ix_(obs, feat)]


@dataclass
class SelectionTracker:
    """Per-feature counts of how often a feature was sampled and selected.

    Frequencies are derived on demand from the integer counters, so the
    incremental update reproduces the batch formula exactly.
    """

    sampled_count: np.ndarray
    selected_count: np.ndarray

    @classmethod
    def zeros(cls, M: int) -> "SelectionTracker":
        return cls(np.zeros(M, dtype=np.int64), np.zeros(M, dtype=np.int64))

    @property
    def n_features(self) -> int:
        return self.sampled_count.size

    def frequencies(self) -> np.ndarray:
        return self.selected_count / np.maximum(1, self.sampled_count)

    def update(self, feat_idx, support) -> "SelectionTracker":
        """In-place update with one minipatch; ``support`` must lie inside ``feat_idx``."""
        feat_idx = np.asarray(feat_idx, dtype=np.int64)
        support = np.asarray(support, dtype=np.int64)
        if support.size:
            if np.unique(support).size != support.size:
                raise ContractError("support contains duplicate feature indices")
            stray = np.setdiff1d(support, feat_idx)
            if stray.size:
                raise ContractError(f"support indices {stray.tolist()} are not in the minipatch")
        self.sampled_count[feat_idx] += 1
        self.selected_count[support] += 1
        return self

    def merge(self, other: "SelectionTracker") -> "SelectionTracker":
        """Pointwise counter addition, for combining independently accumulated trackers."""
        if other.n_features != self.n_features:
            raise ValueError("cannot merge trackers over different feature counts")
        return SelectionTracker(self.sampled_count + other.sampled_count,
                                self.selected_count + other.selected_count)

    def copy(self) -> "SelectionTracker":
        return SelectionTracker(self.sampled_count.copy(), self.selected_count.copy())


def update_tracker(tracker: SelectionTracker, patch: Minipatch, support) -> SelectionTracker:
    """Fold one minipatch's selected support (global feature indices) into ``tracker``."""
    return tracker.update(patch.feat_idx, support)


def batch_frequencies(M: int, feature_sets: Sequence, supports: Sequence) -> np.ndarray:
    """Selection frequencies recomputed from a full trace of minipatches.

    Straight transcription of the ensemble formula, used as a reference for
    the incremental tracker.
    """
    num = np.zeros(M, dtype=np.int64)
    den = np.zeros(M, dtype=np.int64)
    for F, S in zip(feature_sets, supports):
        F = set(int(j) for j in F)
        S = set(int(j) for j in S)
        for j in range(M):
            if j in F:
                den[j] += 1
                if j in S:
                    num[j] += 1
    return num / np.maximum(1, den)


@dataclass
class RunResult:
    """Outcome of one selection run."""

    stable_set: list[int]
    frequencies: np.ndarray
    iterations_run: int
    threshold_used: float
    threshold_mode: str
    wall_time: float
    config_echo: dict[str, Any] = field(default_factory=dict)
    sampled_count: np.ndarray | None = None
    selected_count: np.ndarray | None = None

    def same_outcome(self, other: "RunResult") -> bool:
        """Equality on everything except the wall-clock time."""
        return (self.stable_set == other.stable_set
                and np.array_equal(self.frequencies, other.frequencies)
                and self.iterations_run == other.iterations_run
                and self.threshold_used == other.threshold_used
                and self.threshold_mode == other.threshold_mode
                and self.config_echo == other.config_echo)
