"""Deterministic file formats: CSV matrices and 17-significant-digit JSON.

The same in-memory objects always serialize to byte-identical files, so
reruns of a seeded command can be compared with ``cmp``.  Floats are written
with 17 significant digits, which round-trips IEEE doubles exactly.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .criterion import Dataset, make_dataset
from .errors import RangeError
from .groups import GroupPartition, partition_from_dict, partition_to_dict
from .simulate import SimInstance

def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise RangeError(f"refusing to serialize non-finite value {x!r}")
    return format(x, ".17g")


def _write(obj: Any, out: list[str], depth: int) -> None:
    pad = "  " * depth
    inner = "  " * (depth + 1)
    if isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif obj is None:
        out.append("null")
    elif isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        if not items:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(items):
            out.append(inner + json.dumps(k) + ": ")
            _write(v, out, depth + 1)
            out.append(",\n" if i + 1 < len(items) else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray, set, frozenset)):
        seq = sorted(obj) if isinstance(obj, (set, frozenset)) else (
            obj.tolist() if isinstance(obj, np.ndarray) else list(obj)
        )
        if not seq:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(seq):
            out.append(inner)
            _write(v, out, depth + 1)
            out.append(",\n" if i + 1 < len(seq) else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, fixed float format."""
    out: list[str] = []
    _write(obj, out, 0)
    return "".join(out)


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj) + "\n")


def read_json(path: str | Path) -> Any:
    return json.loads(Path(path).read_text())


def save_matrix_csv(path: str | Path, X: np.ndarray) -> None:
    np.savetxt(path, np.atleast_2d(np.asarray(X, dtype=float)),
               fmt="%.17g", delimiter=",")


def _skip_header(path: Path) -> int:
    with open(path) as fh:
        first = fh.readline()
    try:
        float(first.split(",")[0])
        return 0
    except ValueError:
        return 1


def load_matrix_csv(path: str | Path) -> np.ndarray:
    """Read a comma-separated numeric matrix; a single header row is tolerated."""
    path = Path(path)
    return np.loadtxt(path, delimiter=",", skiprows=_skip_header(path), ndmin=2)


def save_vector_csv(path: str | Path, y: np.ndarray) -> None:
    np.savetxt(path, np.asarray(y, dtype=float), fmt="%.17g")


def load_vector_csv(path: str | Path) -> np.ndarray:
    path = Path(path)
    return np.loadtxt(path, skiprows=_skip_header(path), ndmin=1)


def save_bundle(outdir: str | Path, instance: SimInstance) -> None:
    """Write a generated instance as X.csv, y.csv, groups.json, truth.json."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    save_matrix_csv(outdir / "X.csv", instance.dataset.X)
    save_vector_csv(outdir / "y.csv", instance.dataset.y)
    write_json(outdir / "groups.json", partition_to_dict(instance.partition))
    spec = instance.spec
    write_json(outdir / "truth.json", {
        "coefficients": instance.truth,
        "relevant_groups": sorted(instance.relevant),
        "seed": spec.seed,
        "spec": {
            "case": spec.case, "n": spec.n, "kbar": spec.kbar, "beta": spec.beta,
            "p": spec.p, "m": spec.m, "q": spec.q, "rho": spec.rho,
            "noise_variance": spec.noise_variance, "seed": spec.seed,
        },
    })


def load_design(x_path: str | Path, y_path: str | Path) -> Dataset:
    return make_dataset(load_matrix_csv(x_path), load_vector_csv(y_path))


def load_groups(path: str | Path) -> GroupPartition:
    return partition_from_dict(read_json(path))
