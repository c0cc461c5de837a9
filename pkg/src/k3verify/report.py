"""Machine-readable verification reports.

A :class:`Report` is the single output record of a verification run.  It is
serialized as JSON with sorted keys, so two runs with the same seed and flags
produce byte-identical documents apart from the ``timestamp`` field.
"""
from __future__ import annotations

import datetime as _dt
import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from fractions import Fraction

SCHEMA_VERSION = 1


class Status(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"

    @property
    def exit_code(self) -> int:
        return {Status.PASS: 0, Status.FAIL: 1, Status.INCONCLUSIVE: 2}[self]


def combine(statuses) -> Status:
    """FAIL dominates INCONCLUSIVE, which dominates PASS."""
    statuses = [Status(s) for s in statuses]
    if Status.FAIL in statuses:
        return Status.FAIL
    if Status.INCONCLUSIVE in statuses:
        return Status.INCONCLUSIVE
    return Status.PASS


def jsonable(obj):
    """Recursively convert numbers to JSON-safe forms (fractions become ``"p/q"``)."""
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return str(obj)
        return obj
    if isinstance(obj, complex) or type(obj).__name__ == "mpc":
        z = complex(obj)
        return {"re": jsonable(z.real), "im": jsonable(z.imag)}
    if type(obj).__name__ == "mpf":
        return float(obj)
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return jsonable(obj.tolist())
    if hasattr(obj, "__float__"):
        return float(obj)
    return str(obj)


@dataclass
class Report:
    """Outcome of one verification run.

    ``checks`` holds named sub-results (each a dict with at least ``name`` and
    ``status``); the overall status is their combination unless set explicitly.
    """

    subcommand: str
    status: Status = Status.PASS
    mode: str = "exact"
    seed: int | None = None
    trials: int = 0
    rejected: int = 0
    max_deviation: float | None = None
    counterexample: dict | None = None
    config: dict | None = None
    conventions: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    message: str = ""
    timestamp: str = field(default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat())
    schema_version: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return Status(self.status) is Status.PASS

    @property
    def exit_code(self) -> int:
        return Status(self.status).exit_code

    def add_check(self, name: str, status, **details) -> dict:
        entry = {"name": name, "status": Status(status)}
        entry.update(details)
        self.checks.append(entry)
        return entry

    def finalize(self) -> "Report":
        """Derive the overall status from the sub-checks (if any)."""
        if self.checks:
            self.status = combine(c["status"] for c in self.checks)
        return self

    def to_dict(self, *, with_timestamp: bool = True) -> dict:
        d = asdict(self)
        d["status"] = Status(self.status).value
        d["passed"] = self.passed
        if not with_timestamp:
            d.pop("timestamp")
        return jsonable(d)

    def to_json(self, *, with_timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(with_timestamp=with_timestamp), sort_keys=True, indent=2)

    def summary(self) -> str:
        line = f"{self.subcommand}: {Status(self.status).value.upper()}"
        if self.trials:
            line += f" ({self.trials} trials"
            line += f", {self.rejected} singular draws rejected)" if self.rejected else ")"
        if self.max_deviation is not None:
            line += f" max deviation {self.max_deviation:.3e}"
        if self.message:
            line += f" -- {self.message}"
        return line
