"""
Adaptive versus uniform feature sampling
========================================

With the same number of minipatches, the explore/exploit sampler spends
most of its budget on features that already look relevant, so their
frequencies settle much faster than under uniform sampling.
"""

import numpy as np

from minipatch import EngineConfig, SamplerConfig, SelectorSpec, run
from minipatch.samplers import n_groups
from minipatch.synth import ScenarioConfig, f1_score, generate_s1
from minipatch.thresholding import oracle_select

data, truth = generate_s1(ScenarioConfig(N=400, M=800, support_size=8, rho=0.9, snr=5, seed=3))
m, n = 40, 200
budget = 10 * n_groups(800, m) + 300

scores = {}
for scheme in ("ee", "prob", "uniform"):
    # patience above the budget turns the stopping rule off: every run does `budget` iterations
    cfg = EngineConfig(SamplerConfig(n=n, m=m, scheme=scheme, seed=0),
                       SelectorSpec(), max_iters=budget, patience=budget + 1)
    res = run(data, cfg)
    top = oracle_select(res.frequencies, truth.support.size)
    scores[scheme] = f1_score(top, truth.support)
    sampled_true = res.sampled_count[truth.support].mean()
    print(f"{scheme:8s} F1 of top-8 {scores[scheme]:.3f}   mean samples per true feature {sampled_true:.0f}")

print("budget:", budget, "minipatches;", "best:", max(scores, key=scores.get))
