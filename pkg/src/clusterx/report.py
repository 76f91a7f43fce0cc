"""Condition verdicts and approximation reports shared by the solvers and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field


def complex_pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


@dataclass(frozen=True)
class ConditionItem:
    name: str
    bound: float
    observed: float
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "bound": self.bound, "observed": self.observed,
                "pass": self.passed}


@dataclass(frozen=True)
class ConditionReport:
    """Bound on one host graph and per-item verdicts against it."""

    problem: str
    max_degree: int
    rank: int
    bound: float
    items: tuple[ConditionItem, ...] = ()

    @property
    def passed(self) -> bool:
        return all(it.passed for it in self.items)

    def failures(self) -> list[ConditionItem]:
        return [it for it in self.items if not it.passed]

    def to_dict(self) -> dict:
        return {"problem": self.problem, "max_degree": self.max_degree, "rank": self.rank,
                "bound": self.bound, "pass": self.passed,
                "items": [it.to_dict() for it in self.items]}


@dataclass
class ApproximationReport:
    value: complex
    truncation_order: int
    clusters_evaluated: int
    condition: ConditionReport | None
    elapsed: float
    mode: str = "cluster"             # "cluster" or "oracle"
    forced: bool = False
    strategy: str = ""
    extra: dict = field(default_factory=dict)

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "value": complex_pair(self.value),
            "truncation_order": self.truncation_order,
            "clusters_evaluated": self.clusters_evaluated,
            "condition": [it.to_dict() for it in self.condition.items] if self.condition else [],
            "mode": self.mode,
        }
        if self.condition is not None:
            out["condition_pass"] = self.condition.passed
            out["condition_bound"] = self.condition.bound
        out["forced"] = self.forced
        if self.strategy:
            out["strategy"] = self.strategy
        out.update(self.extra)
        if timing:
            out["elapsed"] = self.elapsed
        return out
