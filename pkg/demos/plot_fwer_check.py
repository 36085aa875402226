"""
Error control on pure noise
===========================

When no feature is related to the response, the stable set should be empty
in all but a small fraction of runs. The selector level is chosen so that
this fraction is at most ``alpha``.
"""

from minipatch.synth import fwer_experiment

rep = fwer_experiment(M=60, N=200, n=100, m=10, alpha=0.1, replicates=60, seed=5)
print(f"per-minipatch selector level {rep.selector_level:.2e}")
print(f"runs with a false selection: {rep.false_selections} / {rep.replicates}")
print(f"empirical FWER {rep.rate:.3f}, allowed {rep.alpha} + {rep.margin:.3f}")
