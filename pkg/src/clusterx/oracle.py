"""Exact brute-force references for every approximated quantity.

Guards are hard errors: an oracle never starts exponential work beyond its
stated size.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .linalg import apply_gate, embed, hermitian_eig, kron_all, zero_state
from .polymer import GuardError

if TYPE_CHECKING:
    from .classical import HardCoreSpec, IsingSpec
    from .quantum import CircuitSpec, SpinSystemSpec, VertexObservables

STATE_GUARD = 2 ** 20
DENSE_GUARD = 2 ** 12
ISING_GUARD = 20
INDEPENDENCE_GUARD = 24


@dataclass
class DenseState:
    order: tuple
    dims: dict
    amplitudes: np.ndarray

    def __post_init__(self):
        want = int(np.prod([self.dims[v] for v in self.order]))
        if self.amplitudes.shape != (want,):
            raise ValueError(f"state has {self.amplitudes.shape} amplitudes, expected {want}")
        if not np.isfinite(np.linalg.norm(self.amplitudes)):
            raise ValueError("state norm is not finite")

    @classmethod
    def zero(cls, order: Sequence, dims: dict) -> "DenseState":
        return cls(tuple(order), dims, zero_state(order, dims))

    def apply(self, op) -> "DenseState":
        return DenseState(self.order, self.dims, apply_gate(self.amplitudes, self.order, self.dims, op))


def _hilbert_dim(graph) -> int:
    return int(np.prod([d for _, d in graph.vertices]))


def _guard(graph, limit: int, what: str) -> None:
    dim = _hilbert_dim(graph)
    if dim > limit:
        raise GuardError(f"{what}: Hilbert dimension {dim} exceeds the oracle guard {limit}")


def circuit_state(c: "CircuitSpec") -> DenseState:
    """U_G |0...0>, smallest label first."""
    g = c.graph
    _guard(g, STATE_GUARD, "statevector oracle")
    st = DenseState.zero(g.vertex_ids, g.dims)
    for lab in g.labels:
        st = st.apply(c.gates[lab])
    return st


def exact_amplitude(c: "CircuitSpec") -> complex:
    return complex(circuit_state(c).amplitudes[0])


def exact_expectation(c: "CircuitSpec", obs: "VertexObservables", vertices=None) -> complex:
    """<psi| prod_{v} O_v |psi> with psi = U_G|0>; ``vertices`` restricts the product."""
    st = circuit_state(c)
    phi = st
    for v in (c.graph.vertex_ids if vertices is None else vertices):
        phi = phi.apply(obs.ops[v])
    return complex(np.vdot(st.amplitudes, phi.amplitudes))


def _hamiltonian(s: "SpinSystemSpec") -> np.ndarray:
    g = s.graph
    _guard(g, DENSE_GUARD, "dense Hamiltonian oracle")
    dim = _hilbert_dim(g)
    h = np.zeros((dim, dim), dtype=complex)
    for lab in g.labels:
        h += embed(s.interactions[lab], g.vertex_ids, g.dims)
    return h


def exact_partition(s: "SpinSystemSpec") -> complex:
    """ntr exp(-beta H_G)."""
    vals = np.linalg.eigvalsh(_hamiltonian(s))
    if vals.size == 0:
        return 1 + 0j
    return complex(np.exp(-s.beta * vals).sum() / vals.size)


def _thermal_sums(s: "SpinSystemSpec", obs: "VertexObservables") -> tuple[complex, complex]:
    """(ntr[Psi_G exp(-beta H_G)], ntr exp(-beta H_G)) from one eigendecomposition."""
    g = s.graph
    vals, vecs = hermitian_eig(_hamiltonian(s))
    weights = np.exp(-s.beta * vals)
    psi = kron_all([obs.ops[v].matrix for v in g.vertex_ids])
    if np.array_equal(psi, np.eye(len(vals))):
        # Psi_G = I: the numerator is the partition function itself
        diag = np.ones(len(vals))
    else:
        diag = np.einsum("ik,ij,jk->k", vecs.conj(), psi, vecs)
    return complex((diag * weights).sum() / len(vals)), complex(weights.sum() / len(vals))


def exact_thermal_numerator(s: "SpinSystemSpec", obs: "VertexObservables") -> complex:
    """ntr[Psi_G exp(-beta H_G)]."""
    return _thermal_sums(s, obs)[0]


def exact_thermal(s: "SpinSystemSpec", obs: "VertexObservables") -> complex:
    """Z^Psi / Z."""
    num, den = _thermal_sums(s, obs)
    if den == 0:
        raise ZeroDivisionError("partition function vanishes; thermal value undefined")
    return num / den


def spin_table(n: int) -> np.ndarray:
    """All 2^n assignments of +-1 spins, one row each."""
    idx = np.arange(2 ** n)[:, None]
    bits = (idx >> np.arange(n - 1, -1, -1)) & 1
    return 1 - 2 * bits


def exact_ising(s: "IsingSpec") -> complex:
    """2^-|V| sum over spins of exp(-beta sum_e phi_e s_u s_v)."""
    g = s.graph
    n = g.order
    if n > ISING_GUARD:
        raise GuardError(f"Ising oracle: {n} spins exceed the guard {ISING_GUARD}")
    if n == 0:
        return 1 + 0j
    spins = spin_table(n)
    idx = g.vertex_index
    energy = np.zeros(len(spins))
    for lab, (u, v) in g.edges:
        energy += s.couplings[lab] * spins[:, idx[u]] * spins[:, idx[v]]
    return complex(np.exp(-s.beta * energy).mean())


def exact_independence_poly(h: "HardCoreSpec") -> complex:
    """I(G; x) = sum over independent sets of x^|I|, by branching on vertices."""
    g = h.graph
    n = g.order
    if n > INDEPENDENCE_GUARD:
        raise GuardError(f"independence oracle: {n} vertices exceed the guard {INDEPENDENCE_GUARD}")
    idx = g.vertex_index
    nbr = [0] * n
    for _, (u, v) in g.edges:
        nbr[idx[u]] |= 1 << idx[v]
        nbr[idx[v]] |= 1 << idx[u]
    x = complex(h.activity)

    @lru_cache(maxsize=None)
    def poly(mask: int) -> complex:
        if not mask:
            return 1 + 0j
        low = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << low)
        # I(G) = I(G - v) + x I(G - N[v])
        return poly(rest) + x * poly(rest & ~nbr[low])

    return poly((1 << n) - 1)
