"""Feature selection with ensembles of base selectors fit on minipatches.

A minipatch is a small random subset of both the observations and the
features. Selection frequencies accumulated over many minipatches give a
stable feature set.
"""

from .data import (ConfigError, ContractError, DataError, DataMatrix, Minipatch, RunResult,
                   SelectionTracker, extract_minipatch, update_tracker)
from .engine import EngineConfig, StopState, check_stop, run
from .samplers import (SamplerConfig, SamplerState, gamma_schedule, sample_features_ee,
                       sample_features_prob, sample_features_uniform, sample_observations)
from .selectors import (SelectorSpec, register_selector, select_thresholded_ols,
                        select_univariate_topk)
from .synth import GroundTruth, ScenarioConfig, f1_score, fwer_experiment, generate_s1
from .thresholding import KdeConfig, fixed_select, kde_threshold, oracle_select

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "ContractError", "DataError", "DataMatrix", "Minipatch", "RunResult",
    "SelectionTracker", "extract_minipatch", "update_tracker",
    "EngineConfig", "StopState", "check_stop", "run",
    "SamplerConfig", "SamplerState", "gamma_schedule", "sample_features_ee",
    "sample_features_prob", "sample_features_uniform", "sample_observations",
    "SelectorSpec", "register_selector", "select_thresholded_ols", "select_univariate_topk",
    "GroundTruth", "ScenarioConfig", "f1_score", "fwer_experiment", "generate_s1",
    "KdeConfig", "fixed_select", "kde_threshold", "oracle_select",
]
