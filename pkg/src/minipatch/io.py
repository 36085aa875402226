"""Matrix file formats and JSON run reports.

Binary layout (little endian)::

    b"MPFSMAT1"          8-byte magic
    N, M                 uint64 each
    X                    N*M float64, row-major
    y                    N float64

Delimited text: a header row of column names, one row per observation. One
named column holds the response (the first column unless told otherwise),
the rest are features.
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .data import DataError, DataMatrix, RunResult

MAGIC = b"MPFSMAT1"
_HEADER = struct.Struct("<8sQQ")


def write_binary(path, data: DataMatrix) -> None:
    N, M = data.X.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, N, M))
        fh.write(np.ascontiguousarray(data.X, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(data.y, dtype="<f8").tobytes())


def read_binary(path) -> DataMatrix:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if len(raw) < _HEADER.size:
        raise DataError(f"{path}: file too short for header")
    magic, N, M = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise DataError(f"{path}: bad magic {magic!r}")
    expected = _HEADER.size + 8 * (N * M + N)
    if len(raw) != expected:
        raise DataError(f"{path}: header declares {N}x{M} ({expected} bytes) "
                        f"but file has {len(raw)} bytes")
    body = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    X = body[:N * M].reshape(N, M)
    y = body[N * M:]
    return DataMatrix(y, X)


def _sniff_delimiter(path) -> str:
    return "\t" if str(path).endswith((".tsv", ".tab")) else ","


def write_text(path, data: DataMatrix, response_name: str = "y", delimiter: str | None = None) -> None:
    delimiter = delimiter or _sniff_delimiter(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter=delimiter)
        w.writerow([response_name] + data.names())
        for yi, row in zip(data.y, data.X):
            w.writerow([repr(float(yi))] + [repr(float(v)) for v in row])


def read_text(path, response: str | None = None, delimiter: str | None = None) -> DataMatrix:
    """Read a delimited file with a header row.

    ``response`` names the response column; by default it is the first one.
    """
    delimiter = delimiter or _sniff_delimiter(path)
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh, delimiter=delimiter))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in rows if r]
    if len(rows) < 2:
        raise DataError(f"{path}: need a header row and at least one data row")
    header = [h.strip() for h in rows[0]]
    if response is None:
        ycol = 0
    elif response in header:
        ycol = header.index(response)
    else:
        raise DataError(f"{path}: response column {response!r} not in header")
    if len(header) < 2:
        raise DataError(f"{path}: need a response column and at least one feature")
    for i, r in enumerate(rows[1:], start=2):
        if len(r) != len(header):
            raise DataError(f"{path}: line {i} has {len(r)} cells, header has {len(header)}")
    try:
        values = np.array([[float(c) for c in r] for r in rows[1:]], dtype=np.float64)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc
    feats = [j for j in range(len(header)) if j != ycol]
    return DataMatrix(values[:, ycol], values[:, feats], [header[j] for j in feats])


def _plain(obj):
    """Convert numpy scalars/arrays inside ``obj`` to JSON-native types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def result_to_report(result: RunResult, feature_names: list[str] | None = None,
                     extra: dict | None = None) -> dict:
    """Report document for a run; every field is always present."""
    M = len(result.frequencies)
    names = feature_names or [f"x{j}" for j in range(M)]
    report = {
        "config": _plain(result.config_echo),
        "stable_set": [int(j) for j in result.stable_set],
        "stable_names": [names[j] for j in result.stable_set],
        "frequencies": [float(v) for v in result.frequencies],
        "iterations_run": int(result.iterations_run),
        "threshold": {"value": float(result.threshold_used), "mode": result.threshold_mode},
        "wall_time": float(result.wall_time),
    }
    if extra:
        report.update(_plain(extra))
    return report


REPORT_FIELDS = ("config", "stable_set", "stable_names", "frequencies", "iterations_run",
                 "threshold", "wall_time")


def result_from_report(report: dict) -> RunResult:
    missing = [f for f in REPORT_FIELDS if f not in report]
    if missing:
        raise ValueError(f"report is missing fields {missing}")
    return RunResult(
        stable_set=list(report["stable_set"]),
        frequencies=np.array(report["frequencies"], dtype=np.float64),
        iterations_run=report["iterations_run"],
        threshold_used=report["threshold"]["value"],
        threshold_mode=report["threshold"]["mode"],
        wall_time=report["wall_time"],
        config_echo=report["config"],
    )


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
