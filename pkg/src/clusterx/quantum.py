"""Quantum circuit and spin-system polymer weights and the end-to-end approximators.

Conventions
-----------
* ``prod_e U_e`` applies the smallest label first.  The same order governs
  the ``(U_e - I)`` factors of amplitude weights and the cone circuits of
  expectation weights.
* Traces are normalised: ``ntr(I) = 1``.
* Polymer computations only touch the Hilbert space of the polymer's vertices.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .hypergraph import (
    MultiHypergraph,
    _components_mask,
    causal_intersection_hypergraph,
    causal_subgraph,
    cone_root,
)
from .linalg import (
    ADMISSION_TOL,
    LocalOperator,
    OperatorError,
    apply_gate,
    embed_add,
    hermitian_eig,
    identity_plus,
    kron_all,
    pauli_rotation,
    pauli_string,
    spectral_norm,
    zero_state,
)
from .polymer import SubgraphPolymerUniverse
from .report import ApproximationReport, ConditionItem, ConditionReport
from .solver import approximate, require, run_expansion

E = math.e


# -- problem definitions ----------------------------------------------------

def _check_edge_ops(graph: MultiHypergraph, ops: dict, what: str) -> None:
    for lab, vs in graph.edges:
        if lab not in ops:
            raise OperatorError(f"edge {lab} has no {what}")
        op = ops[lab]
        if tuple(op.support) != tuple(vs):
            raise OperatorError(f"{what} on edge {lab} has support {op.support}, edge is {vs}")
        try:
            op.check_dims(graph.dims)
        except OperatorError as exc:
            raise OperatorError(f"{what} on edge {lab}: {exc}") from None
    extra = set(ops) - set(graph.labels)
    if extra:
        raise OperatorError(f"{what} given for unknown edge(s) {sorted(extra)}")


@dataclass(frozen=True, eq=False)
class CircuitSpec:
    graph: MultiHypergraph
    gates: dict  # label -> LocalOperator

    def __post_init__(self):
        _check_edge_ops(self.graph, self.gates, "gate")
        for lab, op in self.gates.items():
            if not op.is_unitary():
                raise OperatorError(f"gate on edge {lab} is not unitary")


@dataclass(frozen=True, eq=False)
class SpinSystemSpec:
    graph: MultiHypergraph
    interactions: dict  # label -> LocalOperator
    beta: complex = 0j

    def __post_init__(self):
        _check_edge_ops(self.graph, self.interactions, "interaction")
        for lab, op in self.interactions.items():
            if not op.is_self_adjoint():
                raise OperatorError(f"interaction on edge {lab} is not self-adjoint")
            if spectral_norm(op) > 1 + ADMISSION_TOL:
                raise OperatorError(f"interaction on edge {lab} has norm {spectral_norm(op):.6g} > 1")
        object.__setattr__(self, "beta", complex(self.beta))

    def with_beta(self, beta: complex) -> "SpinSystemSpec":
        return SpinSystemSpec(self.graph, self.interactions, beta)


@dataclass(frozen=True, eq=False)
class VertexObservables:
    """Single-vertex operators; ``mode`` is ``"expectation"`` or ``"thermal"``.

    Thermal operators must be PSD with normalised trace 1.  Expectation
    operators are not forced to be self-adjoint: the zero-expectation
    fixtures use ``I + i t Z``.
    """

    ops: dict  # vertex -> LocalOperator
    mode: str = "expectation"

    def __post_init__(self):
        if self.mode not in ("expectation", "thermal"):
            raise ValueError(f"unknown observable mode {self.mode!r}")
        for v, op in self.ops.items():
            if tuple(op.support) != (v,):
                raise OperatorError(f"observable for vertex {v!r} has support {op.support}")
            if self.mode == "thermal":
                if not op.is_psd():
                    raise OperatorError(f"thermal operator on vertex {v!r} is not PSD")
                if abs(op.normalized_trace() - 1) > ADMISSION_TOL:
                    raise OperatorError(f"thermal operator on vertex {v!r} has normalised trace "
                                        f"{op.normalized_trace():.6g}, expected 1")

    def check_graph(self, graph: MultiHypergraph) -> None:
        for v in graph.vertex_ids:
            if v not in self.ops:
                raise OperatorError(f"vertex {v!r} has no observable")
            try:
                self.ops[v].check_dims(graph.dims)
            except OperatorError as exc:
                raise OperatorError(f"observable on vertex {v!r}: {exc}") from None
        extra = set(self.ops) - set(graph.vertex_ids)
        if extra:
            raise OperatorError(f"observables given for unknown vertices {sorted(map(str, extra))}")


# -- polymer weights ----------------------------------------------------------

def amplitude_weight(c: CircuitSpec, gamma) -> complex:
    """<0| prod_{e in gamma} (U_e - I) |0> on the vertices of gamma."""
    g = c.graph
    order = g.induced_vertices(gamma)
    psi = zero_state(order, g.dims)
    for lab in sorted(gamma):
        if lab not in c.gates:
            raise OperatorError(f"edge {lab} has no gate")
        op = c.gates[lab]
        psi = apply_gate(psi, order, g.dims, op) - psi
    return complex(psi[0])


def cone_state(c: CircuitSpec, edges, order) -> np.ndarray:
    """U_C |0> on ``order`` for the gate set ``edges``, smallest label first."""
    psi = zero_state(order, c.graph.dims)
    for lab in sorted(edges):
        psi = apply_gate(psi, order, c.graph.dims, c.gates[lab])
    return psi


def expectation_weight(c: CircuitSpec, obs: VertexObservables, gamma,
                       cig: MultiHypergraph | None = None) -> complex:
    """<psi| prod_{v in W} (O_v - I) |psi> with psi the cone state of W.

    ``gamma`` is an edge subset of the causal intersection hypergraph; its
    labels name the vertex set W of the circuit.
    """
    g = c.graph
    cig = causal_intersection_hypergraph(g) if cig is None else cig
    ws = [cone_root(cig, lab) for lab in sorted(gamma)]
    edges, order = causal_subgraph(g, ws)
    psi = cone_state(c, edges, order)
    phi = psi
    for v in ws:
        if v not in obs.ops:
            raise OperatorError(f"vertex {v!r} has no observable")
        phi = apply_gate(phi, order, g.dims, obs.ops[v].minus_identity())
    return complex(np.vdot(psi, phi))


class TraceTable:
    """Memoised normalised traces ntr[Psi e^{-beta H_T}] over connected edge sets T.

    Disconnected T factorise over their components, and vertices outside T
    contribute ntr(Psi_v) = 1, so one table serves every polymer.
    """

    def __init__(self, s: SpinSystemSpec, obs: VertexObservables | None = None):
        self.s = s
        self.obs = obs
        self._connected: dict[int, complex] = {}
        self._traces: dict[int, complex] = {0: 1 + 0j}

    def _connected_trace(self, mask: int) -> complex:
        try:
            return self._connected[mask]
        except KeyError:
            pass
        g = self.s.graph
        labels = g.labels_of(mask)
        order = g.induced_vertices(labels)
        dim = int(np.prod([g.dims[v] for v in order]))
        h = np.zeros((dim, dim), dtype=complex)
        for lab in labels:
            embed_add(h, self.s.interactions[lab], order, g.dims)
        if self.obs is None:
            vals = np.linalg.eigvalsh(h)
            val = complex(np.exp(-self.s.beta * vals).sum() / dim)
        else:
            vals, vecs = hermitian_eig(h)
            psi = kron_all([self.obs.ops[v].matrix for v in order])
            # tr[Psi V diag V^dag] = sum_k e^{-beta l_k} <v_k|Psi|v_k>
            diag = np.einsum("ik,ij,jk->k", vecs.conj(), psi, vecs)
            val = complex((diag * np.exp(-self.s.beta * vals)).sum() / dim)
        self._connected[mask] = val
        return val

    def trace(self, mask: int) -> complex:
        try:
            return self._traces[mask]
        except KeyError:
            pass
        out = 1 + 0j
        for comp in _components_mask(self.s.graph, mask):
            out *= self._connected_trace(comp)
        self._traces[mask] = out
        return out

    def weight(self, gamma) -> complex:
        """sum over T subset of gamma of (-1)^(|gamma|-|T|) ntr[Psi e^{-beta H_T}]."""
        g = self.s.graph
        full = g.mask_of(gamma)
        k = bin(full).count("1")
        total = 0j
        sub = full
        while True:
            sign = -1 if (k - bin(sub).count("1")) % 2 else 1
            total += sign * self.trace(sub)
            if sub == 0:
                break
            sub = (sub - 1) & full
        return total


def partition_weight(s: SpinSystemSpec, gamma, table: TraceTable | None = None) -> complex:
    table = TraceTable(s) if table is None else table
    return table.weight(gamma)


def thermal_weight(s: SpinSystemSpec, obs: VertexObservables, gamma,
                   table: TraceTable | None = None) -> complex:
    table = TraceTable(s, obs) if table is None else table
    return table.weight(gamma)


# -- universes ---------------------------------------------------------------

def amplitude_universe(c: CircuitSpec) -> SubgraphPolymerUniverse:
    return SubgraphPolymerUniverse(c.graph, lambda gamma: amplitude_weight(c, gamma))


def expectation_universe(c: CircuitSpec, obs: VertexObservables) -> SubgraphPolymerUniverse:
    obs.check_graph(c.graph)
    cig = causal_intersection_hypergraph(c.graph)
    return SubgraphPolymerUniverse(cig, lambda gamma: expectation_weight(c, obs, gamma, cig))


def partition_universe(s: SpinSystemSpec, obs: VertexObservables | None = None) -> SubgraphPolymerUniverse:
    if obs is not None:
        obs.check_graph(s.graph)
    table = TraceTable(s, obs)
    return SubgraphPolymerUniverse(s.graph, table.weight)


# -- conditions ---------------------------------------------------------------

def _clamped(graph: MultiHypergraph) -> tuple[int, int]:
    # the bounds are stated for max degree and rank at least 2
    return max(2, graph.max_degree), max(2, graph.rank)


def amplitude_bound(max_degree: int, rank: int) -> float:
    return 1 / (E ** 3 * max_degree * math.comb(rank, 2))


def partition_bound(max_degree: int, rank: int) -> float:
    return 1 / (E ** 4 * max_degree * math.comb(rank, 2))


def check_conditions(problem, obs: VertexObservables | None = None) -> ConditionReport:
    """Verdicts of the sufficient conditions for the four quantum problems.

    ``problem`` is a :class:`CircuitSpec` (amplitude, or expectation when
    ``obs`` is given) or a :class:`SpinSystemSpec` (partition, or thermal
    when ``obs`` is given).
    """
    if isinstance(problem, CircuitSpec):
        if obs is None:
            d, r = _clamped(problem.graph)
            b = amplitude_bound(d, r)
            items = tuple(
                ConditionItem(f"||U_{lab} - I||", b, n, n <= b)
                for lab, n in ((lab, spectral_norm(problem.gates[lab].minus_identity()))
                               for lab in problem.graph.labels))
            return ConditionReport("amplitude", problem.graph.max_degree, problem.graph.rank, b, items)
        obs.check_graph(problem.graph)
        cig = causal_intersection_hypergraph(problem.graph)
        d, r = _clamped(cig)
        b = amplitude_bound(d, r)
        items = tuple(
            ConditionItem(f"||O_{v} - I||", b, n, n <= b)
            for v, n in ((v, spectral_norm(obs.ops[v].minus_identity()))
                         for v in problem.graph.vertex_ids))
        return ConditionReport("expectation", cig.max_degree, cig.rank, b, items)
    if isinstance(problem, SpinSystemSpec):
        kind = "partition" if obs is None else "thermal"
        if obs is not None:
            obs.check_graph(problem.graph)
        d, r = _clamped(problem.graph)
        b = partition_bound(d, r)
        nb = abs(problem.beta)
        items = (ConditionItem("|beta|", b, nb, nb <= b),)
        return ConditionReport(kind, problem.graph.max_degree, problem.graph.rank, b, items)
    raise TypeError(f"no quantum conditions for {type(problem).__name__}")


# -- approximators -------------------------------------------------------------

def approximate_amplitude(c: CircuitSpec, epsilon: float = 1e-3, *, force: bool = False,
                          order: int | None = None, strategy: str = "auto",
                          workers: int | None = None):
    return approximate(amplitude_universe(c), c.graph.order, epsilon, check_conditions(c),
                       force=force, order=order, strategy=strategy, workers=workers)


def approximate_expectation(c: CircuitSpec, obs: VertexObservables, epsilon: float = 1e-3, *,
                            force: bool = False, order: int | None = None,
                            strategy: str = "auto", workers: int | None = None):
    return approximate(expectation_universe(c, obs), c.graph.order, epsilon,
                       check_conditions(c, obs), force=force, order=order, strategy=strategy,
                       workers=workers)


def approximate_partition(s: SpinSystemSpec, epsilon: float = 1e-3, *, force: bool = False,
                          order: int | None = None, strategy: str = "auto",
                          workers: int | None = None):
    return approximate(partition_universe(s), s.graph.order, epsilon, check_conditions(s),
                       force=force, order=order, strategy=strategy, workers=workers)


def approximate_thermal(s: SpinSystemSpec, obs: VertexObservables, epsilon: float = 1e-3, *,
                        force: bool = False, order: int | None = None,
                        strategy: str = "auto", workers: int | None = None):
    """exp(T^Psi_m - T_m); each series gets half of the error budget."""
    t0 = time.perf_counter()
    report = check_conditions(s, obs)
    require(report, force)
    n = s.graph.order
    m_num, num = run_expansion(partition_universe(s, obs), n, epsilon / 2, order, strategy, workers)
    m_den, den = run_expansion(partition_universe(s), n, epsilon / 2, order, strategy, workers)
    log_value = num.truncated(m_num) - den.truncated(m_den)
    value = complex(np.exp(log_value))
    return value, ApproximationReport(
        value, m_num, num.clusters_evaluated + den.clusters_evaluated, report,
        time.perf_counter() - t0, forced=force and not report.passed, strategy=num.strategy,
        extra={"polymers": num.polymers, "log_value": [log_value.real, log_value.imag],
               "numerator_clusters": num.clusters_evaluated,
               "denominator_clusters": den.clusters_evaluated})


# -- zero fixtures and named constructs -------------------------------------------

def fanout_unitary(k: int, hadamard: bool = False) -> np.ndarray:
    """|b, y> -> |b, y xor b...b> on k qubits, optionally after a Hadamard on the first."""
    dim = 2 ** k
    u = np.zeros((dim, dim), dtype=complex)
    flip = dim // 2 - 1  # all-ones on the k - 1 targets
    for x in range(dim):
        b = x >> (k - 1)
        u[x ^ (flip if b else 0), x] = 1
    if hadamard:
        h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
        u = u @ np.kron(h, np.eye(dim // 2))
    return u


def ghz_circuit(k: int, d: int) -> CircuitSpec:
    """Depth-d, k-local tree circuit preparing (|0...0> + |1...1>)/sqrt(2) on k^d qubits."""
    if k < 2 or d < 1:
        raise ValueError("need k >= 2 and d >= 1")
    n = k ** d
    names = [f"q{i}" for i in range(n)]
    edges, gates = [], {}
    first = tuple(names[:k])
    edges.append((1, first))
    gates[1] = LocalOperator(first, fanout_unitary(k, hadamard=True))
    active = list(range(k))
    nxt = k
    for _ in range(1, d):
        grown = []
        for q in active:
            targets = list(range(nxt, nxt + k - 1))
            nxt += k - 1
            lab = len(edges) + 1
            support = (names[q],) + tuple(names[t] for t in targets)
            edges.append((lab, support))
            gates[lab] = LocalOperator(support, fanout_unitary(k))
            grown += [q] + targets
        active = grown
    graph = MultiHypergraph(tuple((v, 2) for v in names), tuple(edges))
    return CircuitSpec(graph, gates)


def ghz_counterexample(k: int = 2, d: int = 2) -> tuple[CircuitSpec, VertexObservables]:
    """GHZ circuit with O_v = I + i tan(pi / (2 k^d)) Z_v, whose expectation vanishes."""
    c = ghz_circuit(k, d)
    t = math.tan(math.pi / (2 * k ** d))
    ops = {v: LocalOperator((v,), identity_plus(1j * t, "Z")) for v in c.graph.vertex_ids}
    return c, VertexObservables(ops, "expectation")


def thermal_counterexample(max_degree: int = 2) -> tuple[SpinSystemSpec, VertexObservables]:
    """Two qubits joined by ``max_degree`` parallel edges, Phi = (XX - YY - ZZ)/4,
    beta = i pi / max_degree and Psi_v = 2|0><0|; the thermal numerator vanishes."""
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    phi = (pauli_string("XX") - pauli_string("YY") - pauli_string("ZZ")) / 4
    edges = tuple((i + 1, ("a", "b")) for i in range(max_degree))
    graph = MultiHypergraph((("a", 2), ("b", 2)), edges)
    inter = {lab: LocalOperator(vs, phi) for lab, vs in edges}
    s = SpinSystemSpec(graph, inter, 1j * math.pi / max_degree)
    psi = np.diag([2, 0]).astype(complex)
    obs = VertexObservables({v: LocalOperator((v,), psi) for v in ("a", "b")}, "thermal")
    return s, obs


def xx_rotation_circuit(graph: MultiHypergraph, thetas: dict | float) -> CircuitSpec:
    """exp(-i theta_e X x X) on every 2-vertex edge."""
    get: Callable = (lambda lab: thetas[lab]) if isinstance(thetas, dict) else (lambda lab: thetas)
    gates = {}
    for lab, vs in graph.edges:
        if len(vs) != 2:
            raise OperatorError(f"edge {lab} is not a 2-vertex edge")
        gates[lab] = LocalOperator(vs, pauli_rotation(get(lab), "XX"))
    return CircuitSpec(graph, gates)
