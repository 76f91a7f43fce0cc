"""Condition-gated driver shared by every approximator."""
from __future__ import annotations

import time
from typing import Callable

import numpy as np

from .polymer import ConditionError, ExpansionResult, PolymerUniverse, graded_cluster_sums
from .polymer import truncation_order
from .report import ApproximationReport, ConditionReport


def require(report: ConditionReport, force: bool) -> None:
    """Raise ConditionError on a failed report unless ``force`` is set."""
    if not report.passed and not force:
        worst = report.failures()[0]
        raise ConditionError(f"{report.problem} condition failed: {worst.name} = "
                             f"{worst.observed:.6g} > {worst.bound:.6g}")


def run_expansion(universe: PolymerUniverse, graph_order: int, epsilon: float,
                  order: int | None, strategy: str, workers: int | None
                  ) -> tuple[int, ExpansionResult]:
    m = order if order is not None else truncation_order(graph_order, epsilon)
    if m < 1:
        raise ValueError("truncation order must be >= 1")
    return m, graded_cluster_sums(universe, m - 1, strategy, workers)


def approximate(universe: PolymerUniverse, graph_order: int, epsilon: float,
                report: ConditionReport, *, force: bool = False, order: int | None = None,
                strategy: str = "auto", workers: int | None = None,
                extra: Callable[[complex], dict] | None = None):
    """exp(T_m) for one universe, gated by ``report``."""
    t0 = time.perf_counter()
    require(report, force)
    m, res = run_expansion(universe, graph_order, epsilon, order, strategy, workers)
    log_value = res.truncated(m)
    value = complex(np.exp(log_value))
    info = {"polymers": res.polymers, "log_value": [log_value.real, log_value.imag]}
    if extra is not None:
        info.update(extra(value))
    return value, ApproximationReport(value, m, res.clusters_evaluated, report,
                                      time.perf_counter() - t0,
                                      forced=force and not report.passed,
                                      strategy=res.strategy, extra=info)
