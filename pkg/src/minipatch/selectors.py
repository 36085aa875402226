"""Base feature selectors applied to a single minipatch.

A selector is any callable ``fn(y_sub, X_sub, spec, rng) -> local indices``
returning column positions into ``X_sub``. Custom selectors are added with
:func:`register_selector`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import linalg, stats

from .data import ConfigError

SelectorFn = Callable[..., np.ndarray]

_REGISTRY: dict[str, SelectorFn] = {}


@dataclass
class SelectorSpec:
    """Which base selector to run and its parameters.

    ``kind`` is a registered name; ``options`` is passed through to custom
    selectors untouched.
    """

    kind: str = "thresholded_ols"
    alpha_sel: float = 0.05
    top_k: int | None = None
    options: dict | None = None

    def validate(self, n: int, m: int) -> None:
        if self.kind not in _REGISTRY:
            raise ConfigError(f"unknown selector {self.kind!r}", "selector")
        if self.kind == "thresholded_ols":
            if not 0.0 < self.alpha_sel < 1.0:
                raise ConfigError("alpha_sel must lie in (0, 1)", "alpha")
            if n <= m + 1:
                raise ConfigError(
                    f"thresholded OLS needs n > m + 1 on every minipatch (n={n}, m={m})", "n")
        if self.kind == "univariate_topk" and (self.top_k is None or self.top_k < 1):
            raise ConfigError("univariate_topk needs top_k >= 1", "selector")


def register_selector(name: str, fn: SelectorFn) -> None:
    _REGISTRY[name] = fn


def get_selector(name: str) -> SelectorFn:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown selector {name!r}", "selector") from None


def ols_fit(y, X):
    """Least squares on centred data via QR, with an SVD fallback.

    Returns
    -------
    beta : ndarray (m,)
        Coefficients (minimum-norm solution if X is rank deficient).
    cov_diag : ndarray (m,)
        Diagonal of the pseudo-inverse of the Gram matrix X'X.
    identifiable : ndarray of bool (m,)
        False for coefficients not determined by the data (rank deficiency).
    rss : float
    rank : int
    """
    n, m = X.shape
    qty, R = linalg.qr_multiply(X, y, mode="right")
    d = np.abs(np.diag(R))
    tol = max(n, m) * np.finfo(float).eps * (d.max() if d.size else 0.0)
    if n >= m and d.size and d.min() > tol:
        beta = linalg.solve_triangular(R, qty)
        Rinv = linalg.solve_triangular(R, np.eye(m))
        cov_diag = np.einsum("ij,ij->i", Rinv, Rinv)
        identifiable = np.ones(m, dtype=bool)
        rank = m
    else:
        U, s, Vt = np.linalg.svd(X, full_matrices=False)
        stol = max(n, m) * np.finfo(float).eps * (s[0] if s.size else 0.0)
        keep = s > stol
        rank = int(keep.sum())
        Vk, sk = Vt[keep].T, s[keep]
        beta = Vk @ ((U[:, keep].T @ y) / sk)
        cov_diag = np.einsum("ij,j,ij->i", Vk, 1.0 / sk**2, Vk)
        # e_b lies in the row space iff its projection onto the kept right singular vectors is whole
        identifiable = np.abs(np.einsum("ij,ij->i", Vk, Vk) - 1.0) < 1e-8
    resid = y - X @ beta
    return beta, cov_diag, identifiable, float(resid @ resid), rank


def ols_pvalues(y_sub, X_sub) -> np.ndarray:
    """Two-sided t-test p-values for each coefficient of a centred OLS fit.

    Non-identifiable coefficients get p-value 1.
    """
    y = np.asarray(y_sub, dtype=np.float64)
    X = np.asarray(X_sub, dtype=np.float64)
    n, _ = X.shape
    yc = y - y.mean()
    Xc = X - X.mean(axis=0)
    beta, cov_diag, ident, rss, rank = ols_fit(yc, Xc)
    df = n - rank - 1
    if df < 1:
        raise ConfigError(f"no residual degrees of freedom (n={n}, rank={rank})", "n")
    # floor keeps exact fits (zero residual) from producing 0/0 t-statistics
    floor = (np.sqrt(np.finfo(float).eps) * np.linalg.norm(yc)) ** 2 / df
    sigma2 = max(rss / df, floor)
    se = np.sqrt(sigma2 * cov_diag)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, beta / se, 0.0)
    p = 2.0 * stats.t.sf(np.abs(t), df)
    p[~ident] = 1.0
    return p


def select_thresholded_ols(y_sub, X_sub, spec: SelectorSpec | None = None, rng=None,
                           alpha_sel: float | None = None) -> np.ndarray:
    """Columns whose OLS t-test p-value is below the Bonferroni level ``alpha_sel / m``."""
    if alpha_sel is None:
        alpha_sel = spec.alpha_sel if spec is not None else 0.05
    m = np.shape(X_sub)[1]
    p = ols_pvalues(y_sub, X_sub)
    return np.flatnonzero(p < alpha_sel / m)


def abs_correlations(y_sub, X_sub) -> np.ndarray:
    """|Pearson correlation| of each column with y; zero-variance columns give 0."""
    y = np.asarray(y_sub, dtype=np.float64)
    X = np.asarray(X_sub, dtype=np.float64)
    yc = y - y.mean()
    Xc = X - X.mean(axis=0)
    num = Xc.T @ yc
    den = np.linalg.norm(Xc, axis=0) * np.linalg.norm(yc)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(den > 0, num / den, 0.0)
    return np.abs(r)


def select_univariate_topk(y_sub, X_sub, spec: SelectorSpec | None = None, rng=None,
                           top_k: int | None = None) -> np.ndarray:
    """The ``top_k`` columns most correlated with y (ties to the lower index)."""
    if top_k is None:
        top_k = spec.top_k
    if top_k is None or top_k < 1:
        raise ValueError("top_k must be at least 1")
    r = abs_correlations(y_sub, X_sub)
    order = np.argsort(-r, kind="stable")
    return np.sort(order[:min(top_k, r.size)])


register_selector("thresholded_ols", select_thresholded_ols)
register_selector("univariate_topk", select_univariate_topk)
