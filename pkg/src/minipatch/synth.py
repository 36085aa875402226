"""Synthetic sparse-regression benchmark, accuracy metrics and the FWER check."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .data import DataMatrix
from .engine import EngineConfig, run
from .samplers import SamplerConfig
from .selectors import SelectorSpec


@dataclass
class ScenarioConfig:
    """Autoregressive Toeplitz design with a sparse coefficient vector."""

    N: int
    M: int
    support_size: int = 20
    rho: float = 0.95
    snr: float = 5.0
    seed: int = 0

    def __post_init__(self):
        if self.N < 2 or self.M < 1:
            raise ValueError("need N >= 2 and M >= 1")
        if not 1 <= self.support_size <= self.M:
            raise ValueError("support_size must lie in [1, M]")
        if not -1.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (-1, 1)")
        if not self.snr > 0:
            raise ValueError("snr must be positive")


@dataclass
class GroundTruth:
    support: np.ndarray
    beta: np.ndarray
    b_used: float


def ar1_design(N: int, M: int, rho: float, rng: np.random.Generator) -> np.ndarray:
    """Rows distributed N(0, Sigma) with Sigma_ij = rho**|i - j|, via the AR(1) recursion."""
    Z = rng.standard_normal((N, M))
    X = np.empty_like(Z)
    X[:, 0] = Z[:, 0]
    scale = math.sqrt(1.0 - rho * rho)
    for j in range(1, M):
        X[:, j] = rho * X[:, j - 1] + scale * Z[:, j]
    return X


def generate_s1(config: ScenarioConfig) -> tuple[DataMatrix, GroundTruth]:
    """Draw (y, X) and the true support.

    Coefficients on the support are uniform on [-3/b, -2/b] U [2/b, 3/b],
    with b set so that the sample variance of X @ beta equals ``snr`` times
    the unit noise variance.
    """
    rng = np.random.default_rng(config.seed)
    N, M = config.N, config.M
    X = ar1_design(N, M, config.rho, rng)
    support = np.sort(rng.choice(M, size=config.support_size, replace=False))
    mag = rng.uniform(2.0, 3.0, size=support.size)
    sign = rng.choice([-1.0, 1.0], size=support.size)
    raw = np.zeros(M)
    raw[support] = sign * mag
    # Var(X beta) scales as 1/b^2, so one rescaling hits the target exactly
    b = math.sqrt(np.var(X @ raw, ddof=1) / config.snr)
    beta = raw / b
    eps = rng.standard_normal(N)
    y = X @ beta + eps
    return DataMatrix(y, X), GroundTruth(support, beta, b)


def f1_score(estimated, truth) -> float:
    est = set(int(j) for j in estimated)
    tru = set(int(j) for j in truth)
    if not tru:
        raise ValueError("truth must be non-empty")
    hit = len(est & tru)
    precision = hit / len(est) if est else 0.0
    recall = hit / len(tru)
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def binomial_margin(alpha: float, reps: int) -> float:
    """Two binomial standard errors at rate ``alpha``."""
    return 2.0 * math.sqrt(alpha * (1.0 - alpha) / reps)


def fwer_selector_level(alpha: float, pi_thr: float, M: int) -> float:
    """Per-minipatch Bonferroni level that makes each noise feature's selection
    probability at most ``alpha * pi_thr / M``."""
    return alpha * pi_thr / M


@dataclass
class FwerReport:
    rate: float
    alpha: float
    margin: float
    replicates: int
    false_selections: int
    selector_level: float

    @property
    def bound(self) -> float:
        return self.alpha + self.margin


def fwer_experiment(M: int, N: int, n: int, m: int, alpha: float, replicates: int, seed: int = 0,
                    pi_thr: float = 0.5, patience: int = 100) -> FwerReport:
    """Empirical familywise error rate of uniform minipatch selection on pure noise.

    Each replicate draws X and y independently N(0, 1), so every feature is
    noise. One burn-in epoch guarantees every feature is sampled before the
    run may stop.
    """
    if replicates < 50:
        warnings.warn(f"{replicates} replicates give an unreliable FWER estimate (use >= 50)")
    level = fwer_selector_level(alpha, pi_thr, M)
    ss = np.random.SeedSequence(int(seed))
    hits = 0
    for child in ss.spawn(replicates):
        rng = np.random.default_rng(child)
        X = rng.standard_normal((N, M))
        y = rng.standard_normal(N)
        run_seed = int(child.generate_state(1, np.uint64)[0])
        cfg = EngineConfig(
            sampler=SamplerConfig(n=n, m=m, scheme="uniform", epochs=1, seed=run_seed),
            # the selector is capped at 1 - tiny so extreme alpha stays a valid level
            selector=SelectorSpec("thresholded_ols", alpha_sel=min(level, 1 - 1e-12)),
            pi_thr=pi_thr, patience=patience,
        )
        res = run(DataMatrix(y, X), cfg)
        hits += len(res.stable_set) >= 1
    return FwerReport(hits / replicates, alpha, binomial_margin(alpha, replicates), replicates,
                      hits, level)
