"""Cluster enumeration and the truncated cluster expansion of log Z.

Two strategies compute the same graded sums

    c_n = sum over clusters of total size n of phi_hat(H) prod w^m / m!

``"clusters"`` lists every multiset cluster and evaluates its term.
``"patches"`` groups clusters by the union of their polymer footprints (a
*patch*).  Within a patch S, the clusters whose footprints stay inside S are
exactly the clusters of the polymer model restricted to S, so their graded
sum is the formal series log Z_S(t).  Subtracting sub-patches in increasing
size isolates the clusters whose union is exactly S (the linked-cluster
subtraction).  The total is the same finite sum of cluster terms, but the
work scales with the number of patches instead of the number of clusters.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from ..hypergraph import connected_sets
from .universe import Cluster, PolymerUniverse
from .ursell import IncompatibilityGraph, multiset_graph, multiset_phi_hat

BRUTE_FORCE_MAX_POLYMERS = 64


class ConditionError(RuntimeError):
    """The weight-decay hypothesis was not verified and no override was given."""


class GuardError(RuntimeError):
    """An exact computation would exceed its desk-scale guard."""


def default_workers() -> int:
    raw = os.environ.get("CLUSTERX_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"CLUSTERX_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"CLUSTERX_THREADS must be a positive integer, got {raw!r}")
    return n


def enumerate_polymers(u: PolymerUniverse, m: int) -> list:
    if m < 1:
        raise ValueError("m must be >= 1")
    return list(u.polymers(m))


def _polymer_graph(u: PolymerUniverse, polys: list) -> list[int]:
    n = len(polys)
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if u.incompatible(polys[i], polys[j]):
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return adj


def _multiplicities(sizes: list[int], budget: int) -> Iterator[tuple[int, ...]]:
    """Vectors m >= 1 with sum m_i * sizes_i <= budget."""
    if not sizes:
        yield ()
        return
    head, rest = sizes[0], sizes[1:]
    floor_rest = sum(rest)
    k = 1
    while k * head + floor_rest <= budget:
        for tail in _multiplicities(rest, budget - k * head):
            yield (k,) + tail
        k += 1


def enumerate_clusters(u: PolymerUniverse, m: int) -> Iterator[Cluster]:
    """Every multiset cluster with total size <= m, once each, in canonical order.

    A multiset is a cluster iff its set of distinct polymers is connected in
    the polymer incompatibility graph (copies of one polymer are always
    mutually incompatible).  Connected supports are listed by ESU with a size
    budget, then completed with all admissible multiplicities.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    polys = u.polymers(m)
    sizes = [u.size(p) for p in polys]
    adj = _polymer_graph(u, polys)
    found = []
    for supp in connected_sets(adj, m, sizes=sizes):
        idx = [i for i in range(len(polys)) if supp >> i & 1]
        for mult in _multiplicities([sizes[i] for i in idx], m):
            key = tuple(i for i, k in zip(idx, mult) for _ in range(k))
            found.append((key, idx, mult))
    found.sort(key=lambda t: t[0])
    for _, idx, mult in found:
        total = sum(sizes[i] * k for i, k in zip(idx, mult))
        yield Cluster(tuple((polys[i], k) for i, k in zip(idx, mult)), total)


def cluster_graph(c: Cluster, u: PolymerUniverse) -> IncompatibilityGraph:
    ps = [p for p, _ in c.polymers]
    return multiset_graph(c.multiplicities, lambda i, j: u.incompatible(ps[i], ps[j]))


def cluster_phi_hat(c: Cluster, u: PolymerUniverse) -> int:
    ps = [p for p, _ in c.polymers]
    return multiset_phi_hat(c.multiplicities, lambda i, j: u.incompatible(ps[i], ps[j]))


def cluster_term(c: Cluster, u: PolymerUniverse) -> complex:
    """phi_hat(H) * prod_gamma w_gamma^m / m!."""
    out = 1 + 0j
    for p, k in c.polymers:
        out *= u.weight(p) ** k / math.factorial(k)
    return complex(cluster_phi_hat(c, u)) * out


def series_log(coef) -> np.ndarray:
    """Power-series logarithm of 1 + a_1 t + a_2 t^2 + ... , same truncation."""
    a = np.asarray(coef, dtype=complex)
    if a[0] != 1:
        raise ValueError("series must start with constant term 1")
    n = len(a)
    b = np.zeros(n, dtype=complex)
    for k in range(1, n):
        acc = k * a[k]
        for j in range(1, k):
            acc -= j * b[j] * a[k - j]
        b[k] = acc / k
    return b


@dataclass
class ExpansionResult:
    graded: np.ndarray          # graded[n] = sum of cluster terms of total size n
    clusters_evaluated: int     # clusters (explicit) or patches (grouped)
    strategy: str
    polymers: int = 0
    extra: dict = field(default_factory=dict)

    def truncated(self, m: int) -> complex:
        """T_m: clusters of total size <= m - 1."""
        return complex(self.graded[1:m].sum()) if m > 1 else 0j


def _resolve(u: PolymerUniverse, strategy: str, max_size: int):
    if strategy not in ("auto", "patches", "clusters"):
        raise ValueError(f"unknown strategy {strategy!r}")
    patches = u.patches(max_size) if strategy != "clusters" else None
    if patches is None:
        if strategy == "patches":
            raise ValueError("this polymer universe does not expose patches")
        return "clusters", None
    return "patches", patches


def graded_cluster_sums(u: PolymerUniverse, max_size: int, strategy: str = "auto",
                        workers: int | None = None) -> ExpansionResult:
    """Sums of cluster terms grouped by total size 1..max_size."""
    graded = np.zeros(max_size + 1, dtype=complex)
    if max_size < 1:
        return ExpansionResult(graded, 0, "none")
    strategy, patches = _resolve(u, strategy, max_size)
    workers = default_workers() if workers is None else workers
    polys = u.polymers(max_size)
    u.prefetch(polys, workers)
    count = 0
    if strategy == "clusters":
        for c in enumerate_clusters(u, max_size):
            graded[c.total_size] += cluster_term(c, u)
            count += 1
        return ExpansionResult(graded, count, strategy, len(polys))

    linked: dict[int, np.ndarray] = {}
    for patch in patches:
        w = series_log(u.patch_polynomial(patch, max_size))
        sub = (patch - 1) & patch
        while sub:
            inner = linked.get(sub)
            if inner is not None:
                w -= inner
            sub = (sub - 1) & patch
        linked[patch] = w
        graded += w
        count += 1
    graded[0] = 0
    return ExpansionResult(graded, count, strategy, len(polys))


def truncated_expansion(u: PolymerUniverse, m: int, strategy: str = "auto",
                        workers: int | None = None) -> complex:
    """T_m = sum of cluster terms over clusters of total size at most m - 1."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return graded_cluster_sums(u, m - 1, strategy, workers).truncated(m)


def truncation_order(graph_order: int, epsilon: float) -> int:
    """Smallest m with |G| exp(-m/2) <= epsilon/2, i.e. ceil(2 ln(2|G|/epsilon)).

    Half of the error budget goes to log Z; |e^d - 1| <= 2|d| for |d| <= 1/2
    turns that into a multiplicative epsilon.
    """
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    if graph_order < 1:
        raise ValueError("graph order must be >= 1")
    return max(1, math.ceil(2 * math.log(2 * graph_order / epsilon)))


@dataclass
class DecayReport:
    passed: bool
    bound_base: float
    checked: int
    violation: tuple | None = None   # (polymer, |w|, bound)


def weight_decay_check(u: PolymerUniverse, bound_base: float, m: int) -> DecayReport:
    """Check |w_gamma| <= bound_base ** size(gamma) for every polymer of size <= m."""
    polys = u.polymers(m)
    for p in polys:
        w = abs(u.weight(p))
        b = bound_base ** u.size(p)
        if w > b:
            return DecayReport(False, bound_base, len(polys), (p, w, b))
    return DecayReport(True, bound_base, len(polys))


def approximate_Z(u: PolymerUniverse, graph_order: int, epsilon: float, *, check=None,
                  force: bool = False, order: int | None = None, strategy: str = "auto",
                  workers: int | None = None) -> complex:
    """exp(T_m) with m = truncation_order(graph_order, epsilon) unless ``order`` is given.

    ``check`` is any report with a ``passed`` attribute; without a passing
    check the call refuses to run unless ``force`` is set.
    """
    if not force:
        if check is None:
            raise ConditionError("weight-decay condition not checked; pass a report or force=True")
        if not check.passed:
            raise ConditionError("weight-decay condition failed")
    m = order if order is not None else truncation_order(graph_order, epsilon)
    return complex(np.exp(truncated_expansion(u, m, strategy, workers)))


def brute_force_Z(u: PolymerUniverse, m: int) -> complex:
    """Sum over admissible sets of polymers of size <= m of the weight products."""
    polys = u.polymers(m)
    if len(polys) > BRUTE_FORCE_MAX_POLYMERS:
        raise GuardError(f"{len(polys)} polymers exceed the brute-force guard "
                         f"of {BRUTE_FORCE_MAX_POLYMERS}")
    ws = [u.weight(p) for p in polys]
    adj = _polymer_graph(u, polys)
    n = len(polys)
    total = 0j

    def grow(start: int, blocked: int, prod: complex):
        nonlocal total
        total += prod
        for j in range(start, n):
            if not blocked >> j & 1:
                grow(j + 1, blocked | adj[j], prod * ws[j])

    grow(0, 0, 1 + 0j)
    return total
