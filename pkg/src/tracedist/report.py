"""Result container shared by the randomized property checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any


def jsonable(value: Any) -> Any:
    """Convert nested results into JSON-safe values (infinities become strings)."""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (frozenset, set)):
        return sorted((jsonable(v) for v in value), key=repr)
    if hasattr(value, "item") and callable(value.item):  # numpy scalars
        return jsonable(value.item())
    if isinstance(value, (str, int, bool)) or value is None:
        return value
    return repr(value)


@dataclass
class CheckReport:
    """Pass/fail per named condition, with counterexamples when found."""

    name: str
    instances: int = 0
    conditions: dict[str, bool] = field(default_factory=dict)
    counterexamples: list[dict] = field(default_factory=list)
    max_gap: float = 0.0
    info: dict[str, Any] = field(default_factory=dict)
    max_counterexamples: int = 10

    @property
    def passed(self) -> bool:
        return all(self.conditions.values())

    def require(self, condition: str) -> None:
        self.conditions.setdefault(condition, True)

    def fail(self, condition: str, **witness) -> None:
        self.conditions[condition] = False
        if len(self.counterexamples) < self.max_counterexamples:
            self.counterexamples.append({"condition": condition, **witness})

    def gap(self, value: float) -> None:
        if value > self.max_gap:
            self.max_gap = value

    def to_dict(self) -> dict:
        return jsonable({
            "name": self.name,
            "passed": self.passed,
            "instances": self.instances,
            "conditions": self.conditions,
            "max_gap": self.max_gap,
            "counterexamples": self.counterexamples,
            **({"info": self.info} if self.info else {}),
        })

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        conds = ", ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in self.conditions.items())
        return f"{status} {self.name} [{conds}] instances={self.instances} max_gap={self.max_gap:.3g}"
