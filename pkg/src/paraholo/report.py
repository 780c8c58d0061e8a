"""Check records and reports, serialized deterministically."""

from __future__ import annotations

import enum
import json
import platform
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import mpmath
import numpy as np
import scipy

from . import __version__
from .exact import ExactMatrix, Poly, Scalar

PASS, FAIL, SKIP = "pass", "fail", "skip"
REPORT_FORMAT = "paraholo-report/1"


class SkipCheck(Exception):
    """Raised inside a check body to record it as skipped."""


def versions() -> dict[str, str]:
    return {
        "paraholo": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "mpmath": mpmath.__version__,
    }


def jsonable(x: Any) -> Any:
    """Convert engine values to JSON-compatible data; exact values become strings."""
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (Scalar, Fraction, Poly)):
        return str(x)
    if isinstance(x, ExactMatrix):
        return x.to_strings()
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, enum.Enum):
        return x.value
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return str(x)


@dataclass
class CheckRecord:
    name: str
    status: str
    mode: str
    claim: str
    values: dict = field(default_factory=dict)
    tolerance: float | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "mode": self.mode,
            "claim": self.claim,
            "values": jsonable(self.values),
            "tolerance": self.tolerance,
            "error": self.error,
        }


@dataclass
class Report:
    command: str
    scenario: str
    seed: int
    tol: float
    checks: list[CheckRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.status == PASS for c in self.checks if c.status != SKIP)

    @property
    def overall(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def check(self, name: str) -> CheckRecord:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def run(self, name: str, claim: str, body: Callable[[], tuple[bool, dict]],
            mode: str = "exact", tolerance: float | None = None) -> CheckRecord:
        """Run ``body`` and append its record; exceptions become failures."""
        try:
            ok, values = body()
            rec = CheckRecord(name, PASS if ok else FAIL, mode, claim, values, tolerance)
        except SkipCheck as exc:
            rec = CheckRecord(name, SKIP, mode, claim, {}, tolerance, str(exc))
        except Exception as exc:  # noqa: BLE001 - a report is most useful complete
            rec = CheckRecord(name, FAIL, mode, claim, {}, tolerance, f"{type(exc).__name__}: {exc}")
        self.checks.append(rec)
        return rec

    def to_dict(self) -> dict:
        counts = {s: sum(c.status == s for c in self.checks) for s in (PASS, FAIL, SKIP)}
        return {
            "format": REPORT_FORMAT,
            "command": self.command,
            "scenario": self.scenario,
            "overall": self.overall,
            "counts": counts,
            "seed": self.seed,
            "tolerance": self.tol,
            "versions": versions(),
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = [f"{self.command} on {self.scenario}: {self.overall}"]
        width = max((len(c.name) for c in self.checks), default=0)
        for c in self.checks:
            line = f"  [{c.status.upper():4}] {c.name.ljust(width)}  ({c.mode}) {c.claim}"
            lines.append(line)
            if c.error:
                lines.append(f"         error: {c.error}")
            elif c.status == FAIL and c.values:
                lines.append(f"         values: {json.dumps(jsonable(c.values), ensure_ascii=False)}")
        counts = {s: sum(c.status == s for c in self.checks) for s in (PASS, FAIL, SKIP)}
        lines.append(f"{counts[PASS]} passed, {counts[FAIL]} failed, {counts[SKIP]} skipped "
                     f"(tol {self.tol:g}, seed {self.seed})")
        return "\n".join(lines) + "\n"
