"""The minipatch selection loop: sample, fit a base selector, accumulate, stop."""

from __future__ import annotations

import dataclasses
import logging
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .data import (ConfigError, ContractError, DataMatrix, Minipatch, RunResult,
                   SelectionTracker, extract_minipatch)
from .samplers import MinipatchSampler, SamplerConfig, n_groups
from .selectors import SelectorSpec, get_selector
from .thresholding import KdeConfig, fixed_select, kde_threshold, oracle_select, rank_features

logger = logging.getLogger(__name__)

THRESHOLD_MODES = ("fixed", "kde", "oracle")


@dataclass
class EngineConfig:
    """Everything needed for one run.

    ``max_iters`` defaults to ``20 * E * G`` for adaptive samplers and 10000
    for the uniform one. ``oracle_size`` is the target cardinality when
    ``threshold_mode == "oracle"``.
    """

    sampler: SamplerConfig
    selector: SelectorSpec = field(default_factory=SelectorSpec)
    pi_thr: float = 0.5
    threshold_mode: str = "fixed"
    oracle_size: int | None = None
    tau_l: int = 30
    tau_u: int = 90
    patience: int = 100
    max_iters: int | None = None
    threads: int = 1
    kde: KdeConfig = field(default_factory=KdeConfig)
    verbose: bool = False

    def resolved_max_iters(self, M: int) -> int:
        if self.max_iters is not None:
            return self.max_iters
        if self.sampler.scheme == "uniform":
            return 10000
        return 20 * self.sampler.epochs * n_groups(M, self.sampler.m)

    def validate(self, data: DataMatrix) -> None:
        N, M = data.X.shape
        self.sampler.validate(N, M)
        self.selector.validate(self.sampler.n, min(self.sampler.m, M))
        if not 0.0 < self.pi_thr < 1.0:
            raise ConfigError("pi_thr must lie in (0, 1)", "pi_thr")
        if self.threshold_mode not in THRESHOLD_MODES:
            raise ConfigError(f"unknown threshold mode {self.threshold_mode!r}", "threshold")
        if self.threshold_mode == "oracle":
            if self.oracle_size is None or not 1 <= self.oracle_size <= M:
                raise ConfigError(f"oracle cardinality must lie in [1, {M}]", "threshold")
        if self.tau_l < 1 or self.tau_u < self.tau_l:
            raise ConfigError("need 1 <= tau_l <= tau_u", "tau_l")
        if self.tau_u % self.tau_l:
            warnings.warn(f"tau_u={self.tau_u} is not a multiple of tau_l={self.tau_l}")
        if self.patience < 1:
            raise ConfigError("patience must be at least 1", "patience")
        if self.max_iters is not None and self.max_iters < 1:
            raise ConfigError("max_iters must be at least 1", "max_iters")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1", "threads")

    def echo(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class StopState:
    last_top_list: list[int] | None = None
    unchanged_streak: int = 0


def top_list(frequencies, tau_l: int, tau_u: int) -> list[int]:
    """Features ranked by frequency, truncated to ``min(max(|H|, tau_l), tau_u)``.

    H is the set of features with frequency at least 0.5.
    """
    freq = np.asarray(frequencies)
    h = int(np.count_nonzero(freq >= 0.5))
    t = min(max(h, tau_l), tau_u)
    return rank_features(freq)[:t].tolist()


def check_stop(tracker: SelectionTracker, stop_state: StopState, tau_l: int, tau_u: int,
               patience: int) -> tuple[bool, StopState]:
    """Advance the unchanged-ranking streak; stop once it reaches ``patience``."""
    current = top_list(tracker.frequencies(), tau_l, tau_u)
    if current == stop_state.last_top_list:
        streak = min(stop_state.unchanged_streak + 1, patience)
    else:
        streak = 0
    new_state = StopState(current, streak)
    return streak >= patience, new_state


def _local_support(local, m: int, k: int) -> np.ndarray:
    local = np.asarray(local)
    if local.size == 0:
        return np.empty(0, dtype=np.int64)
    if local.ndim != 1 or not np.issubdtype(local.dtype, np.integer):
        raise ContractError(f"iteration {k}: selector must return a 1-d integer index array")
    if local.min() < 0 or local.max() >= m:
        raise ContractError(f"iteration {k}: selector returned column index outside [0, {m})")
    if np.unique(local).size != local.size:
        raise ContractError(f"iteration {k}: selector returned duplicate columns")
    return local.astype(np.int64)


class _Runner:
    def __init__(self, data: DataMatrix, config: EngineConfig):
        self.data = data
        self.config = config
        N, M = data.X.shape
        self.sampler = MinipatchSampler(config.sampler, N, M)
        self.select = get_selector(config.selector.kind)

    def fit(self, patch: Minipatch) -> np.ndarray:
        """Global feature indices selected on one minipatch."""
        y_sub, X_sub = extract_minipatch(self.data, patch)
        k = patch.iteration
        try:
            local = self.select(y_sub, X_sub, self.config.selector, self.sampler.selector_rng(k))
        except ContractError:
            raise
        except Exception as exc:
            raise ContractError(f"iteration {k}: base selector failed: {exc}") from exc
        return patch.feat_idx[_local_support(local, patch.m, k)]

    def fit_uniform(self, k: int) -> tuple[Minipatch, np.ndarray]:
        patch = self.sampler.draw(k)
        return patch, self.fit(patch)


def run(data: DataMatrix, config: EngineConfig) -> RunResult:
    """Run minipatch selection on ``data`` and threshold the final frequencies."""
    config.validate(data)
    t0 = time.perf_counter()
    M = data.n_features
    runner = _Runner(data, config)
    sampler = runner.sampler
    max_iters = config.resolved_max_iters(M)
    burn_in = sampler.burn_in_iters
    tracker = SelectionTracker.zeros(M)
    stop = StopState()

    def step(k: int, patch: Minipatch, support: np.ndarray) -> bool:
        nonlocal stop
        tracker.update(patch.feat_idx, support)
        should_stop, stop = check_stop(tracker, stop, config.tau_l, config.tau_u, config.patience)
        if config.verbose:
            active = sampler.state.active
            logger.info("iter=%d active=%s head=%s streak=%d", k,
                        "-" if active is None else active.size,
                        stop.last_top_list[:5], stop.unchanged_streak)
        return should_stop and k > burn_in

    k = 0
    if config.sampler.scheme == "uniform" and config.threads > 1:
        batch = 4 * config.threads
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            done = False
            while not done and k < max_iters:
                ks = range(k + 1, min(k + batch, max_iters) + 1)
                # results come back in iteration order regardless of scheduling
                for patch, support in pool.map(runner.fit_uniform, ks):
                    k = patch.iteration
                    if step(k, patch, support):
                        done = True
                        break
    else:
        while k < max_iters:
            k += 1
            patch = sampler.draw(k, tracker)
            if step(k, patch, runner.fit(patch)):
                break

    freq = tracker.frequencies()
    mode = config.threshold_mode
    if mode == "fixed":
        thr = config.pi_thr
        stable = fixed_select(freq, thr)
    elif mode == "kde":
        thr = kde_threshold(freq, config.kde)
        stable = fixed_select(freq, thr)
    else:
        stable = oracle_select(freq, config.oracle_size)
        thr = float(freq[stable].min())
    return RunResult(
        stable_set=[int(j) for j in stable],
        frequencies=freq,
        iterations_run=k,
        threshold_used=float(thr),
        threshold_mode=mode,
        wall_time=time.perf_counter() - t0,
        config_echo=config.echo(),
        sampled_count=tracker.sampled_count.copy(),
        selected_count=tracker.selected_count.copy(),
    )
