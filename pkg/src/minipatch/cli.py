"""Command line front end: ``minipatch select | simulate | fwer``.

Exit codes: 0 success, 1 data error, 2 configuration error.
"""

from __future__ import annotations

import argparse
import logging
import statistics
import sys
import warnings

import numpy as np

from .data import ConfigError, DataError
from .engine import EngineConfig, run
from .io import dumps_report, read_binary, read_text, result_to_report
from .samplers import SCHEMES, SamplerConfig
from .selectors import SelectorSpec
from .synth import ScenarioConfig, f1_score, fwer_experiment, generate_s1
from .thresholding import oracle_select

# engine option name -> command line flag, for diagnostics
_FLAGS = {
    "n": "--n", "m": "--m", "sampler": "--sampler", "epochs": "--epochs",
    "pi_active": "--pi-active", "pi_thr": "--pi-thr", "threshold": "--threshold",
    "tau_l": "--tau-l", "tau_u": "--tau-u", "patience": "--patience",
    "max_iters": "--max-iters", "selector": "--selector", "alpha": "--alpha",
    "seed": "--seed", "threads": "--threads", "gamma_ramp_iters": "--gamma-ramp",
}


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sampler", choices=SCHEMES, default="ee")
    p.add_argument("--n", type=int, help="observations per minipatch")
    p.add_argument("--m", type=int, help="features per minipatch")
    p.add_argument("--pi-thr", type=float, default=0.5)
    p.add_argument("--threshold", default="fixed", help="fixed | kde | oracle:K")
    p.add_argument("--epochs", type=int, help="burn-in epochs (default 10 adaptive, 0 uniform)")
    p.add_argument("--pi-active", type=float, default=0.1)
    p.add_argument("--gamma-ramp", type=int, help="iterations for the exploitation ramp to reach 1")
    p.add_argument("--tau-l", type=int, default=30)
    p.add_argument("--tau-u", type=int, default=90)
    p.add_argument("--patience", type=int, default=100)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--selector", default="ols", help="ols | uni:K")
    p.add_argument("--alpha", type=float, default=0.05, help="selector level")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="minipatch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sel = sub.add_parser("select", help="select features on a data file")
    sel.add_argument("--data", required=True)
    src = sel.add_mutually_exclusive_group()
    src.add_argument("--response", help="response column name (text input)")
    src.add_argument("--binary", action="store_true", help="input is the binary matrix format")
    _add_run_flags(sel)

    sim = sub.add_parser("simulate", help="run on synthetic Toeplitz data and score F1")
    sim.add_argument("--N", type=int, default=1000)
    sim.add_argument("--M", type=int, default=2000)
    sim.add_argument("--support", type=int, default=20)
    sim.add_argument("--rho", type=float, default=0.95)
    sim.add_argument("--snr", type=float, default=5.0)
    sim.add_argument("--reps", type=int, default=5)
    sim.add_argument("--sweep-m", help="comma list of m/|S| multiples, e.g. 3,5,8,10")
    sim.add_argument("--sweep-n", help="comma list of n/m ratios, e.g. 2,5,10")
    _add_run_flags(sim)

    fw = sub.add_parser("fwer", help="empirical FWER of uniform selection on pure noise")
    fw.add_argument("--M", type=int, default=100)
    fw.add_argument("--N", type=int, default=400)
    fw.add_argument("--n", type=int, default=200)
    fw.add_argument("--m", type=int, default=10)
    fw.add_argument("--alpha", type=float, default=0.05)
    fw.add_argument("--pi-thr", type=float, default=0.5)
    fw.add_argument("--reps", type=int, default=200)
    fw.add_argument("--seed", type=int, default=0)
    fw.add_argument("--out")
    return parser


def _parse_threshold(text: str) -> tuple[str, int | None]:
    if text in ("fixed", "kde"):
        return text, None
    if text.startswith("oracle:"):
        try:
            return "oracle", int(text.split(":", 1)[1])
        except ValueError:
            pass
    raise UsageError("--threshold", f"expected fixed, kde or oracle:K, got {text!r}")


def _parse_selector(text: str, alpha: float) -> SelectorSpec:
    if text == "ols":
        return SelectorSpec("thresholded_ols", alpha_sel=alpha)
    if text.startswith("uni:"):
        try:
            return SelectorSpec("univariate_topk", alpha_sel=alpha, top_k=int(text[4:]))
        except ValueError:
            pass
    raise UsageError("--selector", f"expected ols or uni:K, got {text!r}")


def _parse_list(flag: str, text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(flag, f"expected a comma separated list of numbers, got {text!r}") from None


def engine_config(args, N: int, M: int, n: int | None = None, m: int | None = None,
                  seed: int | None = None) -> EngineConfig:
    """Translate parsed flags to an engine configuration."""
    m = m if m is not None else (args.m if args.m is not None else min(M, 100))
    n = n if n is not None else (args.n if args.n is not None else min(max(N // 2, 1), 5 * m))
    mode, size = _parse_threshold(args.threshold)
    return EngineConfig(
        sampler=SamplerConfig(n=n, m=m, scheme=args.sampler, epochs=args.epochs,
                              pi_active=args.pi_active, gamma_ramp_iters=args.gamma_ramp,
                              seed=args.seed if seed is None else seed),
        selector=_parse_selector(args.selector, args.alpha),
        pi_thr=args.pi_thr, threshold_mode=mode, oracle_size=size,
        tau_l=args.tau_l, tau_u=args.tau_u, patience=args.patience,
        max_iters=args.max_iters, threads=args.threads, verbose=args.verbose,
    )


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_select(args) -> int:
    data = read_binary(args.data) if args.binary else read_text(args.data, args.response)
    N, M = data.X.shape
    cfg = engine_config(args, N, M)
    cfg.validate(data)
    result = run(data, cfg)
    extra = {"data": {"path": args.data, "N": N, "M": M}}
    _emit(args, dumps_report(result_to_report(result, data.names(), extra)))
    return 0


def _score_replicate(args, scen: ScenarioConfig, n=None, m=None) -> dict:
    data, truth = generate_s1(scen)
    cfg = engine_config(args, scen.N, scen.M, n=n, m=m, seed=scen.seed)
    cfg.validate(data)
    result = run(data, cfg)
    oracle = oracle_select(result.frequencies, scen.support_size)
    return {
        "seed": scen.seed,
        "f1_data_driven": f1_score(result.stable_set, truth.support),
        "f1_oracle": f1_score(oracle, truth.support),
        "iterations_run": result.iterations_run,
        "threshold": {"value": result.threshold_used, "mode": result.threshold_mode},
        "stable_set": result.stable_set,
        "ground_truth": {"support": truth.support.tolist(), "beta": truth.beta[truth.support].tolist(),
                         "b": truth.b_used},
        "wall_time": result.wall_time,
        "config": result.config_echo,
    }


def _summary(values: list[float]) -> dict:
    return {"mean": statistics.fmean(values),
            "stdev": statistics.stdev(values) if len(values) > 1 else 0.0}


def cmd_simulate(args) -> int:
    if args.reps < 1:
        raise UsageError("--reps", "must be at least 1")
    scen_kw = dict(N=args.N, M=args.M, support_size=args.support, rho=args.rho, snr=args.snr)
    try:
        ScenarioConfig(**scen_kw, seed=args.seed)
    except ValueError as exc:
        raise UsageError("--support/--rho/--snr", str(exc)) from None
    scenarios = [ScenarioConfig(**scen_kw, seed=args.seed + r) for r in range(args.reps)]
    report = {"scenario": scen_kw, "reps": args.reps}

    if args.sweep_m or args.sweep_n:
        mults = _parse_list("--sweep-m", args.sweep_m or "3,5,8,10")
        ratios = _parse_list("--sweep-n", args.sweep_n or "2,5,10")
        rows = []
        for mult in mults:
            for ratio in ratios:
                m = int(round(mult * args.support))
                n = int(round(ratio * m))
                row = {"m_over_S": mult, "n_over_m": ratio, "m": m, "n": n}
                if m > args.M or n > args.N:
                    row.update(f1_data_driven=None, f1_oracle=None, note="minipatch larger than data")
                else:
                    reps = [_score_replicate(args, s, n=n, m=m) for s in scenarios]
                    row["f1_data_driven"] = _summary([r["f1_data_driven"] for r in reps])
                    row["f1_oracle"] = _summary([r["f1_oracle"] for r in reps])
                    row["wall_time"] = _summary([r["wall_time"] for r in reps])
                rows.append(row)
                logging.getLogger(__name__).info("sweep cell %s", row)
        report["sweep"] = rows
    else:
        reps = [_score_replicate(args, s) for s in scenarios]
        report["replicates"] = reps
        report["f1_data_driven"] = _summary([r["f1_data_driven"] for r in reps])
        report["f1_oracle"] = _summary([r["f1_oracle"] for r in reps])
    _emit(args, dumps_report(report))
    return 0


def cmd_fwer(args) -> int:
    for flag, val, lo in (("--M", args.M, 1), ("--N", args.N, 2), ("--n", args.n, 1),
                          ("--m", args.m, 1), ("--reps", args.reps, 1)):
        if val < lo:
            raise UsageError(flag, f"must be at least {lo}")
    if not 0 < args.alpha <= 1:
        raise UsageError("--alpha", "must lie in (0, 1]")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = fwer_experiment(args.M, args.N, args.n, args.m, args.alpha, args.reps,
                              seed=args.seed, pi_thr=args.pi_thr)
    report = {
        "empirical_fwer": rep.rate,
        "alpha_bound": rep.alpha,
        "binomial_margin": rep.margin,
        "bound_with_margin": rep.bound,
        "within_bound": rep.rate <= rep.bound,
        "replicates": rep.replicates,
        "replicates_with_false_selection": rep.false_selections,
        "selector_level": rep.selector_level,
        "warnings": [str(w.message) for w in caught],
        "config": {"M": args.M, "N": args.N, "n": args.n, "m": args.m, "pi_thr": args.pi_thr,
                   "seed": args.seed},
    }
    _emit(args, dumps_report(report))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "verbose", False):
        logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                            format="%(name)s %(levelname)s %(message)s")
    handler = {"select": cmd_select, "simulate": cmd_simulate, "fwer": cmd_fwer}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"minipatch: error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        flag = _FLAGS.get(exc.option or "", exc.option or "configuration")
        print(f"minipatch: error: {flag}: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"minipatch: data error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
