"""Random problem instances: generic operators, bounded-degree hosts and
instances scaled to a fraction of the sufficient condition."""
from __future__ import annotations

import cmath
import math

import numpy as np

from .classical import HardCoreSpec, IsingSpec, hardcore_bound, ising_bound
from .hypergraph import MultiHypergraph, causal_intersection_hypergraph
from .linalg import LocalOperator
from .quantum import (
    CircuitSpec,
    SpinSystemSpec,
    VertexObservables,
    amplitude_bound,
    partition_bound,
)


def random_hermitian(rng, d: int, norm: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = (a + a.conj().T) / 2
    return norm * h / np.linalg.norm(h, 2)


def random_unitary(rng, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def near_identity_unitary(rng, d: int, norm: float) -> np.ndarray:
    """exp(-i t H) with ||U - I|| = norm exactly."""
    vals, vecs = np.linalg.eigh(random_hermitian(rng, d))
    t = 2 * math.asin(norm / 2) / np.abs(vals).max()
    return (vecs * np.exp(-1j * t * vals)) @ vecs.conj().T


def random_psd(rng, d: int) -> np.ndarray:
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    p = a @ a.conj().T
    return p / np.trace(p).real * d


def random_multigraph(rng, n: int, m: int, max_degree: int = 3, rank: int = 2,
                      connected: bool = True) -> MultiHypergraph:
    """Random multihypergraph on n vertices with at most m edges and bounded degree/rank."""
    names = [f"v{i}" for i in range(n)]
    deg = [0] * n
    edges = []
    order = list(rng.permutation(n))
    if connected:
        # spanning path keeps the host connected
        for a, b in zip(order, order[1:]):
            if len(edges) < m and deg[a] < max_degree and deg[b] < max_degree:
                edges.append((names[a], names[b]))
                deg[a] += 1
                deg[b] += 1
    tries = 0
    while len(edges) < m and tries < 200:
        tries += 1
        k = min(int(rng.integers(2, rank + 1)), n)
        vs = [int(x) for x in rng.choice(n, size=k, replace=False)]
        if any(deg[v] >= max_degree for v in vs):
            continue
        for v in vs:
            deg[v] += 1
        edges.append(tuple(names[v] for v in vs))
    return MultiHypergraph.from_edges(edges, vertices=names)


def conditioned_circuit(rng, g: MultiHypergraph, scale: float = 0.9) -> CircuitSpec:
    b = amplitude_bound(max(2, g.max_degree), max(2, g.rank))
    gates = {lab: LocalOperator(vs, near_identity_unitary(rng, 2 ** len(vs), scale * b))
             for lab, vs in g.edges}
    return CircuitSpec(g, gates)


def random_circuit(rng, g: MultiHypergraph) -> CircuitSpec:
    return CircuitSpec(g, {lab: LocalOperator(vs, random_unitary(rng, 2 ** len(vs)))
                           for lab, vs in g.edges})


def conditioned_observables(rng, c: CircuitSpec, scale: float = 0.9) -> VertexObservables:
    cig = causal_intersection_hypergraph(c.graph)
    b = amplitude_bound(max(2, cig.max_degree), max(2, cig.rank))
    ops = {}
    for v in c.graph.vertex_ids:
        ops[v] = LocalOperator((v,), np.eye(2) + random_hermitian(rng, 2, scale * b))
    return VertexObservables(ops, "expectation")


def conditioned_spin_system(rng, g: MultiHypergraph, scale: float = 0.9,
                            phase: float | None = None) -> SpinSystemSpec:
    b = partition_bound(max(2, g.max_degree), max(2, g.rank))
    phase = rng.uniform(0, 2 * math.pi) if phase is None else phase
    inter = {lab: LocalOperator(vs, random_hermitian(rng, 2 ** len(vs))) for lab, vs in g.edges}
    return SpinSystemSpec(g, inter, scale * b * complex(math.cos(phase), math.sin(phase)))


def thermal_observables(rng, g: MultiHypergraph) -> VertexObservables:
    return VertexObservables({v: LocalOperator((v,), random_psd(rng, 2)) for v in g.vertex_ids},
                             "thermal")


def low_cone_circuit_graph(rng, n: int, layers: int = 2) -> MultiHypergraph:
    """Random 2-local layered circuit graph whose causal hypergraph has degree and rank <= 3."""
    for _ in range(500):
        names = [f"q{i}" for i in range(n)]
        edges = []
        for _ in range(layers):
            perm = list(rng.permutation(n))
            for a, b in zip(perm[::2], perm[1::2]):
                if rng.random() < 0.5:
                    edges.append((names[a], names[b]))
        if not edges:
            continue
        g = MultiHypergraph.from_edges(edges, vertices=names)
        cig = causal_intersection_hypergraph(g)
        if cig.max_degree <= 3 and cig.rank <= 3 and g.max_degree <= 3:
            return g
    raise RuntimeError("no low-cone circuit found")


def simple_graph(rng, n: int, m: int, max_degree: int = 3) -> MultiHypergraph:
    """Random simple graph: the multigraph generator with loops and parallels dropped."""
    g = random_multigraph(rng, n, m, max_degree=max_degree)
    seen, edges = set(), []
    for _, vs in g.edges:
        if len(vs) == 2 and frozenset(vs) not in seen:
            seen.add(frozenset(vs))
            edges.append(vs)
    return MultiHypergraph.from_edges(edges, vertices=g.vertex_ids)


def conditioned_ising(rng, g: MultiHypergraph, scale: float = 0.9) -> IsingSpec:
    b = ising_bound(max(1, g.max_degree))
    couplings = {lab: float(rng.uniform(-1, 1)) for lab in g.labels}
    return IsingSpec(g, couplings, scale * b * cmath.exp(1j * rng.uniform(0, 2 * math.pi)))


def conditioned_hardcore(rng, g: MultiHypergraph, scale: float = 0.9) -> HardCoreSpec:
    phase = cmath.exp(1j * rng.uniform(0, 2 * math.pi))
    return HardCoreSpec(g, scale * hardcore_bound(g.max_degree) * phase)
