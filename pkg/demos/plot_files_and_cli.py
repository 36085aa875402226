"""
Files, reports and the command line
===================================

Data can be stored as CSV/TSV with a header row or in a compact binary
format. A finished run serialises to a JSON report, which is also what the
``minipatch select`` command prints.
"""

import json
import tempfile
from pathlib import Path

from minipatch import EngineConfig, SamplerConfig, SelectorSpec, run
from minipatch.cli import main
from minipatch.io import dumps_report, read_binary, read_text, result_to_report, write_binary, write_text
from minipatch.synth import ScenarioConfig, generate_s1

data, truth = generate_s1(ScenarioConfig(N=200, M=100, support_size=4, rho=0.5, snr=5, seed=2))
tmp = Path(tempfile.mkdtemp())

write_text(tmp / "data.csv", data)
write_binary(tmp / "data.bin", data)
assert (read_text(tmp / "data.csv").X == read_binary(tmp / "data.bin").X).all()
print("files:", sorted(p.name for p in tmp.iterdir()))

res = run(read_binary(tmp / "data.bin"),
          EngineConfig(SamplerConfig(n=100, m=20, scheme="ee", seed=0), SelectorSpec()))
report = result_to_report(res, data.names())
print("library run:", report["stable_names"], "after", report["iterations_run"], "iterations")

# the same run from the command line, report written to a file
out = tmp / "report.json"
code = main(["select", "--data", str(tmp / "data.csv"), "--n", "100", "--m", "20",
             "--sampler", "ee", "--seed", "0", "--out", str(out)])
cli_report = json.loads(out.read_text())
print("cli exit code", code, "->", cli_report["stable_names"])
print("true support:", [f"x{j}" for j in truth.support])
print(dumps_report({k: report[k] for k in ("stable_set", "threshold")}))
