"""Classical instances: the Ising model and the hard-core (independence polynomial) model."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hypergraph import GraphValidationError, MultiHypergraph, connected_sets, k_thicken
from .oracle import exact_ising, spin_table
from .polymer import PolymerUniverse, SubgraphPolymerUniverse
from .report import ConditionItem, ConditionReport
from .solver import approximate

E = math.e


def _require_pairs(graph: MultiHypergraph) -> None:
    for lab, vs in graph.edges:
        if len(vs) != 2:
            raise GraphValidationError(f"edge {lab} has {len(vs)} vertices; expected 2")


@dataclass(frozen=True, eq=False)
class IsingSpec:
    """Multigraph, real couplings with |phi| <= 1, complex inverse temperature."""

    graph: MultiHypergraph
    couplings: dict  # label -> float
    beta: complex = 0j

    def __post_init__(self):
        _require_pairs(self.graph)
        for lab in self.graph.labels:
            if lab not in self.couplings:
                raise GraphValidationError(f"edge {lab} has no coupling")
        for lab, phi in self.couplings.items():
            if lab not in self.graph.edge_index:
                raise GraphValidationError(f"coupling given for unknown edge {lab}")
            if isinstance(phi, complex) or not np.isreal(phi):
                raise GraphValidationError(f"coupling on edge {lab} is not real")
            if abs(phi) > 1:
                raise GraphValidationError(f"coupling on edge {lab} has |phi| = {abs(phi)} > 1")
        object.__setattr__(self, "couplings", {k: float(v) for k, v in self.couplings.items()})
        object.__setattr__(self, "beta", complex(self.beta))

    @classmethod
    def uniform(cls, graph: MultiHypergraph, beta: complex, phi: float = 1.0) -> "IsingSpec":
        return cls(graph, {lab: phi for lab in graph.labels}, beta)


@dataclass(frozen=True, eq=False)
class HardCoreSpec:
    """Simple graph and complex activity."""

    graph: MultiHypergraph
    activity: complex = 0j

    def __post_init__(self):
        _require_pairs(self.graph)
        seen = set()
        for lab, vs in self.graph.edges:
            key = frozenset(vs)
            if key in seen:
                raise GraphValidationError(f"edge {lab} duplicates another edge")
            seen.add(key)
        object.__setattr__(self, "activity", complex(self.activity))


# -- Ising ---------------------------------------------------------------------

def ising_weight(s: IsingSpec, gamma) -> complex:
    """2^-|V(gamma)| sum over spins of prod_{e in gamma} (exp(-beta phi_e s_u s_v) - 1)."""
    g = s.graph
    order = g.induced_vertices(gamma)
    pos = {v: i for i, v in enumerate(order)}
    spins = spin_table(len(order))
    prod = np.ones(len(spins), dtype=complex)
    for lab in gamma:
        u, v = g.edge_vertices[lab]
        prod *= np.exp(-s.beta * s.couplings[lab] * spins[:, pos[u]] * spins[:, pos[v]]) - 1
    return complex(prod.mean())


def ising_universe(s: IsingSpec) -> SubgraphPolymerUniverse:
    return SubgraphPolymerUniverse(s.graph, lambda gamma: ising_weight(s, gamma))


def ising_bound(max_degree: int) -> float:
    return 1 / (E ** 4 * max_degree)


def check_ising(s: IsingSpec) -> ConditionReport:
    d = max(1, s.graph.max_degree)
    b = ising_bound(d)
    nb = abs(s.beta)
    return ConditionReport("ising", s.graph.max_degree, s.graph.rank, b,
                           (ConditionItem("|beta|", b, nb, nb <= b),))


def approximate_ising(s: IsingSpec, epsilon: float = 1e-3, *, force: bool = False,
                      order: int | None = None, strategy: str = "auto",
                      workers: int | None = None):
    """Normalised Z_Ising; the report also carries the unnormalised value."""
    n = s.graph.order

    def unnormalised(value):
        u = value * 2 ** n
        return {"unnormalized": [u.real, u.imag]}

    return approximate(ising_universe(s), n, epsilon, check_ising(s), force=force, order=order,
                       strategy=strategy, workers=workers, extra=unnormalised)


@dataclass(frozen=True)
class ThickeningReport:
    k: int
    original: complex
    thickened: complex

    @property
    def difference(self) -> float:
        return abs(self.original - self.thickened)


def thickening_identity_check(s: IsingSpec, k: int) -> ThickeningReport:
    """Compare Z(G; beta) with Z(G_k; beta / k), both by spin enumeration."""
    if s.graph.order > 16:
        raise GraphValidationError("thickening check is limited to 16 vertices")
    gk = k_thicken(s.graph, k)
    couplings = {lab * k + j: s.couplings[lab] for lab in s.graph.labels for j in range(k)}
    sk = IsingSpec(gk, couplings, s.beta / k)
    return ThickeningReport(k, exact_ising(s), exact_ising(sk))


# -- hard-core -------------------------------------------------------------------

class HardCoreUniverse(PolymerUniverse):
    """Polymers are vertices, each of size 1 and weight x; adjacent or equal
    vertices are incompatible.  Patches are connected vertex sets."""

    def __init__(self, spec: HardCoreSpec):
        super().__init__()
        self.spec = spec
        g = spec.graph
        self._idx = g.vertex_index
        adj = [0] * g.order
        for _, (u, v) in g.edges:
            adj[self._idx[u]] |= 1 << self._idx[v]
            adj[self._idx[v]] |= 1 << self._idx[u]
        self._adj = adj

    def _enumerate(self, max_size: int) -> list:
        return list(self.spec.graph.vertex_ids) if max_size >= 1 else []

    def size(self, p) -> int:
        return 1

    def incompatible(self, p, q) -> bool:
        i, j = self._idx[p], self._idx[q]
        return i == j or bool(self._adj[i] >> j & 1)

    def _weight(self, p) -> complex:
        return self.spec.activity

    def patches(self, max_size: int) -> list[int]:
        return sorted(connected_sets(self._adj, max_size), key=lambda m: (bin(m).count("1"), m))

    def patch_polymers(self, patch: int, max_size: int) -> list:
        ids = self.spec.graph.vertex_ids
        return [ids[i] for i in range(len(ids)) if patch >> i & 1]


def hardcore_universe(h: HardCoreSpec) -> HardCoreUniverse:
    return HardCoreUniverse(h)


def hardcore_bound(max_degree: int) -> float:
    # sum over the Delta + 1 incompatible vertices of |x| e^{3/2} <= 1
    return 1 / (E ** 1.5 * (max_degree + 1))


def check_hardcore(h: HardCoreSpec) -> ConditionReport:
    d = h.graph.max_degree
    b = hardcore_bound(d)
    nx = abs(h.activity)
    return ConditionReport("hardcore", d, h.graph.rank, b, (ConditionItem("|x|", b, nx, nx <= b),))


def approximate_hardcore(h: HardCoreSpec, epsilon: float = 1e-3, *, force: bool = False,
                         order: int | None = None, strategy: str = "auto",
                         workers: int | None = None):
    return approximate(hardcore_universe(h), h.graph.order, epsilon, check_hardcore(h),
                       force=force, order=order, strategy=strategy, workers=workers)
