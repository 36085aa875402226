"""
Choosing the cut-off from the frequency distribution
====================================================

Selection frequencies of a good run are bimodal: a large mass near zero
and a few features near one. A Gaussian kernel density estimate finds the
valley between the two groups.
"""

import numpy as np

from minipatch.thresholding import gaussian_kde_curve, kde_threshold

rng = np.random.default_rng(0)
noise = np.clip(rng.normal(0.05, 0.03, size=300), 0, 1)
signal = np.clip(rng.normal(0.85, 0.05, size=12), 0, 1)
freq = np.concatenate([noise, signal])

thr = kde_threshold(freq)
print(f"threshold {thr:.3f}: keeps {np.sum(freq >= thr)} of {freq.size} features")

# coarse text rendering of the density the threshold came from
grid = np.linspace(0, 1, 512)
dens = gaussian_kde_curve(freq, grid, freq.std(ddof=1))
for g, d in zip(grid[::32], dens[::32]):
    print(f"{g:4.2f} {'#' * int(60 * d / dens.max())}")

# no valley at all -> the fallback threshold is returned
print("unimodal input:", kde_threshold(rng.uniform(0.2, 0.3, size=50)))
