"""Minipatch index samplers.

Three feature-sampling schemes are provided:

``uniform``
    m features uniformly without replacement every iteration (optionally
    preceded by burn-in epochs so that every feature is seen).
``ee``
    burn-in epochs over a shuffled block partition of the features, then an
    exploitation/exploration split between the active set (features whose
    selection frequency is at least ``pi_active``) and the rest.
``prob``
    same burn-in, then features drawn without replacement with probability
    proportional to their current selection frequency.

Every random draw is taken from a stream keyed on ``(seed, iteration, purpose)``
so any iteration's minipatch can be regenerated without replaying the run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import ConfigError, Minipatch, SelectionTracker

SCHEMES = ("uniform", "ee", "prob")

# stream tags, combined with (seed, iteration) in the seed sequence
_OBS, _FEAT, _SELECTOR, _PARTITION = 0, 1, 2, 3


def stream(seed: int, key: int, tag: int) -> np.random.Generator:
    """Independent generator for ``(seed, key, tag)``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(key), int(tag))))


@dataclass
class SamplerConfig:
    """Minipatch shape and feature-sampling scheme.

    ``epochs`` defaults to 10 for the adaptive schemes and 0 (no burn-in) for
    ``uniform``. ``gamma_ramp_iters`` defaults to ``5 * G`` with
    ``G = ceil(M / m)``.
    """

    n: int
    m: int
    scheme: str = "uniform"
    epochs: int | None = None
    pi_active: float = 0.1
    gamma_ramp_iters: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown sampler scheme {self.scheme!r}", "sampler")
        if self.epochs is None:
            self.epochs = 0 if self.scheme == "uniform" else 10

    def validate(self, N: int, M: int) -> None:
        if not 1 <= self.n <= N:
            raise ConfigError(f"n={self.n} must lie in [1, N={N}]", "n")
        if not 1 <= self.m <= M:
            raise ConfigError(f"m={self.m} must lie in [1, M={M}]", "m")
        if self.epochs < 0:
            raise ConfigError("epochs must be non-negative", "epochs")
        if self.scheme != "uniform" and self.epochs < 1:
            raise ConfigError("adaptive samplers need at least one burn-in epoch", "epochs")
        if not 0.0 < self.pi_active < 1.0:
            raise ConfigError("pi_active must lie in (0, 1)", "pi_active")
        if self.gamma_ramp_iters is not None and self.gamma_ramp_iters < 1:
            raise ConfigError("gamma_ramp_iters must be positive", "gamma_ramp_iters")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer", "seed")


def n_groups(M: int, m: int) -> int:
    return math.ceil(M / m)


def _check_size(total: int, size: int, what: str) -> None:
    if size < 1:
        raise ValueError(f"{what} size must be at least 1, got {size}")
    if size > total:
        raise ValueError(f"cannot draw {size} {what} indices out of {total}")


def sample_observations(N: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Sorted set of n distinct indices drawn uniformly from ``range(N)``."""
    _check_size(N, n, "observation")
    return np.sort(rng.choice(N, size=n, replace=False))


def sample_features_uniform(M: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """Sorted set of m distinct feature indices drawn uniformly from ``range(M)``."""
    _check_size(M, m, "feature")
    return np.sort(rng.choice(M, size=m, replace=False))


def burn_in_partition(M: int, m: int, seed: int, epoch: int) -> list[np.ndarray]:
    """Shuffle ``range(M)`` and cut it into consecutive blocks of size m.

    The last block holds the remainder when m does not divide M.
    """
    perm = stream(seed, epoch, _PARTITION).permutation(M)
    return [perm[g * m:(g + 1) * m] for g in range(n_groups(M, m))]


def gamma_schedule(k: int, E: int, G: int, gamma_ramp_iters: int) -> float:
    """Exploitation fraction at adaptive iteration k: geometric ramp from 0.5 to 1."""
    steps = k - E * G
    if steps >= gamma_ramp_iters:
        return 1.0
    return min(1.0, 0.5 * 2.0 ** (steps / gamma_ramp_iters))


def weighted_sample_without_replacement(weights, size: int, rng: np.random.Generator) -> np.ndarray:
    """Successive weighted draws, renormalising over the not-yet-chosen items.

    Needs at least ``size`` positive weights.
    """
    w = np.array(weights, dtype=np.float64)
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and non-negative")
    if np.count_nonzero(w) < size:
        raise ValueError(f"only {np.count_nonzero(w)} positive weights for {size} draws")
    out = np.empty(size, dtype=np.int64)
    for i in range(size):
        cdf = np.cumsum(w)
        u = rng.random() * cdf[-1]
        j = int(np.searchsorted(cdf, u, side="right"))
        # guard against u landing on the last edge through rounding
        j = min(j, w.size - 1)
        while w[j] == 0:
            j -= 1
        out[i] = j
        w[j] = 0.0
    return out


@dataclass
class SamplerState:
    """Mutable position of an adaptive sampler.

    ``iteration`` is the 1-based index of the minipatch about to be drawn.
    """

    M: int
    m: int
    iteration: int = 0
    epoch: int = -1
    partition: list[np.ndarray] | None = None
    active: np.ndarray | None = None
    gamma: float | None = None
    probs: np.ndarray | None = None
    exploited: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    @property
    def G(self) -> int:
        return n_groups(self.M, self.m)


def _burn_in_block(state: SamplerState, config: SamplerConfig) -> np.ndarray:
    k, G = state.iteration, state.G
    epoch = (k - 1) // G
    if state.partition is None or state.epoch != epoch:
        state.partition = burn_in_partition(state.M, state.m, config.seed, epoch)
        state.epoch = epoch
    return np.sort(state.partition[(k - 1) % G])


def in_burn_in(k: int, config: SamplerConfig, M: int) -> bool:
    return k <= config.epochs * n_groups(M, config.m)


def _ramp(config: SamplerConfig, G: int) -> int:
    return config.gamma_ramp_iters if config.gamma_ramp_iters is not None else 5 * G


def sample_features_ee(state: SamplerState, tracker: SelectionTracker, config: SamplerConfig,
                       rng: np.random.Generator) -> tuple[np.ndarray, SamplerState]:
    """Exploitation/exploration feature draw for iteration ``state.iteration``.

    Returns the sorted feature index set (size ``min(m, M)``) and the state,
    which is updated in place.
    """
    if state.iteration < 1:
        raise ValueError("state.iteration must be at least 1")
    if in_burn_in(state.iteration, config, state.M):
        state.exploited = np.empty(0, dtype=np.int64)
        return _burn_in_block(state, config), state

    M, G = state.M, state.G
    m = min(state.m, M)
    freq = tracker.frequencies()
    active = np.flatnonzero(freq >= config.pi_active)
    gamma = gamma_schedule(state.iteration, config.epochs, G, _ramp(config, G))
    n_exploit = min(m, math.floor(gamma * active.size))

    exploit = rng.choice(active, size=n_exploit, replace=False) if n_exploit else active[:0]
    rest = np.setdiff1d(np.arange(M), active, assume_unique=True)
    n_explore = m - n_exploit
    if rest.size >= n_explore:
        explore = rng.choice(rest, size=n_explore, replace=False)
    else:
        # too few inactive features: take them all and top up from the unused active ones
        spare = np.setdiff1d(active, exploit, assume_unique=True)
        explore = np.concatenate([rest, rng.choice(spare, size=n_explore - rest.size, replace=False)])

    state.active = active
    state.gamma = gamma
    state.exploited = np.sort(exploit)
    return np.sort(np.concatenate([exploit, explore]).astype(np.int64)), state


def sampling_probabilities(frequencies) -> np.ndarray | None:
    """Frequencies normalised to sum to one, or None when they are all zero."""
    freq = np.asarray(frequencies, dtype=np.float64)
    total = freq.sum()
    if total <= 0:
        return None
    return freq / total


def sample_features_prob(state: SamplerState, tracker: SelectionTracker, config: SamplerConfig,
                         rng: np.random.Generator) -> tuple[np.ndarray, SamplerState]:
    """Frequency-proportional feature draw for iteration ``state.iteration``."""
    if state.iteration < 1:
        raise ValueError("state.iteration must be at least 1")
    if in_burn_in(state.iteration, config, state.M):
        return _burn_in_block(state, config), state

    M = state.M
    m = min(state.m, M)
    probs = sampling_probabilities(tracker.frequencies())
    state.probs = probs
    if probs is None:
        return sample_features_uniform(M, m, rng), state

    n_pos = int(np.count_nonzero(probs))
    if n_pos >= m:
        feats = weighted_sample_without_replacement(probs, m, rng)
    else:
        positive = np.flatnonzero(probs)
        zero = np.flatnonzero(probs == 0)
        feats = np.concatenate([positive, rng.choice(zero, size=m - n_pos, replace=False)])
    return np.sort(feats), state


class MinipatchSampler:
    """Draws the minipatch for each iteration of a run.

    The uniform scheme is stateless: ``draw(k)`` depends only on the seed
    and k, so iterations can be generated out of order. The adaptive
    schemes read the tracker and must be called with k = 1, 2, 3, ...
    """

    def __init__(self, config: SamplerConfig, N: int, M: int):
        config.validate(N, M)
        self.config = config
        self.N, self.M = N, M
        self.state = SamplerState(M=M, m=config.m)

    @property
    def burn_in_iters(self) -> int:
        return self.config.epochs * n_groups(self.M, self.config.m)

    def draw(self, k: int, tracker: SelectionTracker | None = None) -> Minipatch:
        cfg = self.config
        obs = sample_observations(self.N, cfg.n, stream(cfg.seed, k, _OBS))
        frng = stream(cfg.seed, k, _FEAT)
        if cfg.scheme == "uniform":
            if in_burn_in(k, cfg, self.M):
                G = n_groups(self.M, cfg.m)
                block = burn_in_partition(self.M, cfg.m, cfg.seed, (k - 1) // G)[(k - 1) % G]
                feats = np.sort(block)
            else:
                feats = sample_features_uniform(self.M, cfg.m, frng)
        else:
            if tracker is None:
                raise ValueError("adaptive samplers need the selection tracker")
            self.state.iteration = k
            fn = sample_features_ee if cfg.scheme == "ee" else sample_features_prob
            feats, self.state = fn(self.state, tracker, cfg, frng)
        return Minipatch(obs, feats, k)

    def selector_rng(self, k: int) -> np.random.Generator:
        return stream(self.config.seed, k, _SELECTOR)
