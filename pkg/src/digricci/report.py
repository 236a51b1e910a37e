"""Run configuration and serialisable verification reports.

Reports are plain dictionaries rendered by a small JSON writer that
formats every float with 17 significant digits, which round-trips IEEE
doubles exactly and keeps reports byte-stable across runs with the same
seed.  NaN (the curvature diagonal) becomes null.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .certificates import InequalityCertificate

SCHEMA_VERSION = 1
DEFAULT_SEED = 424242


@dataclass
class RunConfig:
    """Knobs shared by the CLI commands."""

    seed: int = DEFAULT_SEED
    time_grid: tuple[float, ...] = (0.01, 0.1, 1.0, 5.0)
    limit_time_grid: tuple[float, ...] = (1e-2, 1e-3, 1e-4)
    eps_grid: tuple[float, ...] = (1e-3, 5e-4)
    lambda_grid: tuple[float, ...] = (0.5, 1.0, 2.0)
    r_grid: tuple[float, ...] = tuple(0.25 * k for k in range(1, 13))
    lipschitz_samples: int = 200
    density_samples: int = 100
    function_samples: int = 100
    jobs: int = 1
    k_override: float | None = None
    curvature_limit_tol: float = 1e-3
    certificate_tol: float = 1e-9
    cross_check: bool = False


def _format_float(x: float) -> str:
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return f"{x:.17g}"


def render_json(value: Any, indent: int = 0) -> str:
    """Deterministic JSON with 17-significant-digit floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        parts = [
            f'{inner}{render_json(str(k))}: {render_json(v, indent + 1)}'
            for k, v in value.items()
        ]
        return "{\n" + ",\n".join(parts) + f"\n{pad}}}"
    if isinstance(value, (list, tuple)):
        seq = list(value)
        if not seq:
            return "[]"
        parts = [f"{inner}{render_json(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(parts) + f"\n{pad}]"
    if isinstance(value, str):
        out = value.replace("\\", "\\\\").replace('"', '\\"')
        out = out.replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")
        return f'"{out}"'
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _format_float(float(value))
    if isinstance(value, np.ndarray):
        return render_json(value.tolist(), indent)
    raise TypeError(f"cannot serialise {type(value)!r}")


def certificate_to_dict(cert: InequalityCertificate) -> dict[str, Any]:
    witness = {k: _jsonable(v) for k, v in cert.witness.items()}
    return {
        "name": cert.name,
        "hypothesis": {k: _jsonable(v) for k, v in cert.hypothesis.items()},
        "lhs": cert.lhs,
        "rhs": cert.rhs,
        "margin": cert.margin,
        "tol": cert.tol,
        "pass": cert.passed,
        "witness": witness,
    }


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, tuple):
        return list(value)
    return value


@dataclass
class VerificationReport:
    """Everything one run established about one graph."""

    command: str
    graph: dict[str, Any]
    seed: int
    tolerances: dict[str, float]
    sections: dict[str, Any] = field(default_factory=dict)
    certificates: list[InequalityCertificate] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.certificates)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "seed": self.seed,
            "graph": self.graph,
            "tolerances": self.tolerances,
            **self.sections,
            "certificates": [certificate_to_dict(c) for c in self.certificates],
            "all_pass": self.all_pass,
        }

    def to_json(self) -> str:
        return render_json(self.to_dict()) + "\n"
